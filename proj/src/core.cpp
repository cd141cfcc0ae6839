#include "lambmp/core.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include "fft.hpp"
#include "lambmp/error.hpp"

namespace lambmp {

Signal::Signal(std::vector<double> samples, double sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
    if (samples_.empty()) throw PreconditionError("signal must contain at least one sample");
    if (!(sample_rate_hz_ > 0.0) || !std::isfinite(sample_rate_hz_))
        throw PreconditionError("sample rate must be positive and finite");
    for (double v : samples_)
        if (!std::isfinite(v)) throw PreconditionError("signal contains non-finite samples");
}

Signal Signal::zeros(std::size_t n, double sample_rate_hz) {
    return Signal(std::vector<double>(n, 0.0), sample_rate_hz);
}

Signal Signal::resized(std::size_t n) const {
    std::vector<double> out(n, 0.0);
    std::copy_n(samples_.begin(), std::min(n, samples_.size()), out.begin());
    return Signal(std::move(out), sample_rate_hz_);
}

namespace {
void require_compatible(const Signal& a, const Signal& b) {
    if (a.size() != b.size()) throw PreconditionError("signal lengths differ");
    require_same_rate(a.sample_rate_hz(), b.sample_rate_hz());
}
}  // namespace

bool same_rate(double a_hz, double b_hz) noexcept { return std::abs(a_hz - b_hz) <= 1e-9 * std::max(a_hz, b_hz); }

void require_same_rate(double a_hz, double b_hz) {
    if (!same_rate(a_hz, b_hz))
        throw PreconditionError("sample rates differ (" + std::to_string(a_hz) + " Hz vs " + std::to_string(b_hz) +
                                " Hz)");
}

Signal& Signal::operator+=(const Signal& other) {
    require_compatible(*this, other);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] += other.samples_[i];
    return *this;
}

Signal& Signal::operator-=(const Signal& other) {
    require_compatible(*this, other);
    for (std::size_t i = 0; i < samples_.size(); ++i) samples_[i] -= other.samples_[i];
    return *this;
}

Signal& Signal::operator*=(double scale) {
    for (double& v : samples_) v *= scale;
    return *this;
}

Signal operator+(Signal a, const Signal& b) { return a += b; }
Signal operator-(Signal a, const Signal& b) { return a -= b; }
Signal operator*(double scale, Signal x) { return x *= scale; }

double Spectrum::omega(std::size_t k) const noexcept {
    const auto n = static_cast<double>(bins.size());
    const auto kk = static_cast<double>(k);
    const double signed_k = (2 * k <= bins.size()) ? kk : kk - n;
    return 2.0 * std::numbers::pi * signed_k * sample_rate_hz / n;
}

DelayGrid DelayGrid::covering(std::size_t signal_len, std::size_t atom_len, double sample_rate_hz) {
    if (atom_len > signal_len)
        throw PreconditionError("atom is longer than the signal; no delay fits the window");
    const double step = 1.0 / sample_rate_hz;
    return DelayGrid{0.0, static_cast<double>(signal_len - atom_len) * step, step};
}

long delay_to_samples(double tau_s, double sample_rate_hz) {
    const double k = tau_s * sample_rate_hz;
    const double r = std::round(k);
    if (!std::isfinite(k) || std::abs(k - r) > 1e-6)
        throw PreconditionError("delay " + std::to_string(tau_s) + " s is not on the sample grid");
    return static_cast<long>(r);
}

std::size_t DelayGrid::first_index() const {
    return static_cast<std::size_t>(delay_to_samples(min_delay_s, 1.0 / step_s));
}

std::size_t DelayGrid::last_index() const {
    return static_cast<std::size_t>(delay_to_samples(max_delay_s, 1.0 / step_s));
}

void DelayGrid::validate() const {
    if (!(step_s > 0.0)) throw PreconditionError("delay grid step must be positive");
    if (!(min_delay_s >= 0.0) || !(max_delay_s >= min_delay_s))
        throw PreconditionError("delay grid requires 0 <= min_delay <= max_delay");
    (void)first_index();
    (void)last_index();
}

Spectrum forward_transform(const Signal& x, std::size_t pad_len) {
    if (pad_len < x.size())
        throw PreconditionError("pad length " + std::to_string(pad_len) + " is shorter than the signal (" +
                                std::to_string(x.size()) + ")");
    std::vector<Complex> bins(pad_len, Complex{0.0, 0.0});
    const auto s = x.samples();
    std::copy(s.begin(), s.end(), bins.begin());
    detail::fft_inplace(bins, false);
    return Spectrum{std::move(bins), x.size(), x.sample_rate_hz()};
}

std::vector<Complex> inverse_transform_complex(const Spectrum& spectrum) {
    std::vector<Complex> out = spectrum.bins;
    detail::fft_inplace(out, true);
    return out;
}

Signal inverse_transform(const Spectrum& spectrum) {
    if (spectrum.bins.empty()) throw PreconditionError("empty spectrum");
    const auto full = inverse_transform_complex(spectrum);
    std::vector<double> re(full.size());
    std::transform(full.begin(), full.end(), re.begin(), [](Complex c) { return c.real(); });
    return Signal(std::move(re), spectrum.sample_rate_hz);
}

double norm_time(std::span<const double> x, double dt) {
    double acc = 0.0;
    for (double v : x) acc += v * v;
    return std::sqrt(acc * dt);
}

double norm_time(const Signal& x) { return norm_time(x.samples(), x.dt()); }

double norm_freq(const Spectrum& spectrum) {
    if (spectrum.bins.empty()) return 0.0;
    double acc = 0.0;
    for (const auto& b : spectrum.bins) acc += std::norm(b);
    return std::sqrt(acc * spectrum.dt() / static_cast<double>(spectrum.pad_len()));
}

double inner_freq(const Spectrum& a, const Spectrum& b) {
    if (a.pad_len() != b.pad_len() || !same_rate(a.sample_rate_hz, b.sample_rate_hz))
        throw PreconditionError("spectra differ in pad length or sample rate");
    double acc = 0.0;
    for (std::size_t k = 0; k < a.pad_len(); ++k) acc += (std::conj(a.bins[k]) * b.bins[k]).real();
    return acc * a.dt() / static_cast<double>(a.pad_len());
}

Spectrum apply_delay(const Spectrum& spectrum, double tau_s) {
    const double shift = std::abs(tau_s) * spectrum.sample_rate_hz;
    const std::size_t needed = spectrum.source_len + static_cast<std::size_t>(std::ceil(shift - 1e-9));
    if (needed > spectrum.pad_len())
        throw WindowError("delay of " + std::to_string(tau_s) + " s wraps around a padded window of " +
                              std::to_string(spectrum.pad_len()) + " samples; increase padding",
                          needed);
    Spectrum out = spectrum;
    if (tau_s == 0.0) return out;
    for (std::size_t k = 0; k < out.pad_len(); ++k)
        out.bins[k] *= std::polar(1.0, -spectrum.omega(k) * tau_s);
    return out;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

std::size_t pursuit_pad_len(std::size_t signal_len, std::size_t atom_len) {
    return next_pow2(std::max(2 * signal_len, signal_len + atom_len));
}

namespace {
bool parse_double(const std::string& field, double& out) {
    std::size_t pos = 0;
    try {
        out = std::stod(field, &pos);
    } catch (const std::exception&) {
        return false;
    }
    while (pos < field.size() && std::isspace(static_cast<unsigned char>(field[pos]))) ++pos;
    return pos == field.size();
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    return fields;
}
}  // namespace

Signal read_signal_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw FormatError("cannot open signal file " + path.string());
    std::string line;
    if (!std::getline(in, line)) throw FormatError(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        const auto header = split_csv_line(line);
        double probe = 0.0;
        if (header.size() != 2 || parse_double(header[0], probe))
            throw FormatError(path.string() + ": missing header row (expected 'time_s,value')");
    }
    std::vector<double> t, v;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        double a = 0.0, b = 0.0;
        if (fields.size() != 2 || !parse_double(fields[0], a) || !parse_double(fields[1], b))
            throw FormatError(path.string() + ":" + std::to_string(lineno) + ": expected two numeric columns");
        t.push_back(a);
        v.push_back(b);
    }
    if (t.size() < 2) throw FormatError(path.string() + ": need at least two samples to infer the sample rate");
    const double mean_dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    if (!(mean_dt > 0.0)) throw FormatError(path.string() + ": time column must be increasing");
    for (std::size_t i = 1; i < t.size(); ++i) {
        const double step = t[i] - t[i - 1];
        if (std::abs(step - mean_dt) > 1e-9 * mean_dt)
            throw FormatError(path.string() + ": non-uniform time spacing at row " + std::to_string(i + 1));
    }
    // Snap to an integer rate when the text round-trip only perturbed the last digits.
    double rate = 1.0 / mean_dt;
    if (std::abs(rate - std::round(rate)) <= 1e-9 * rate) rate = std::round(rate);
    return Signal(std::move(v), rate);
}

void write_signal_csv(const std::filesystem::path& path, const Signal& x) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out.precision(17);
    out << "time_s,value\n";
    const double dt = x.dt();
    for (std::size_t i = 0; i < x.size(); ++i) out << static_cast<double>(i) * dt << ',' << x[i] << '\n';
    if (!out) throw Error("write failed for " + path.string());
}

}  // namespace lambmp

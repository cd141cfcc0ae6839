#pragma once

// Sampled signals, their spectra, and the operations shared by both pursuit
// algorithms: zero-padded DFT, Riemann-weighted norms, and the delay operator.

#include <complex>
#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace lambmp {

using Complex = std::complex<double>;

/// Uniformly sampled real time series.
class Signal {
public:
    Signal(std::vector<double> samples, double sample_rate_hz);

    static Signal zeros(std::size_t n, double sample_rate_hz);

    std::span<const double> samples() const noexcept { return samples_; }
    std::span<double> samples_mut() noexcept { return samples_; }
    double operator[](std::size_t i) const { return samples_[i]; }

    std::size_t size() const noexcept { return samples_.size(); }
    double sample_rate_hz() const noexcept { return sample_rate_hz_; }
    double dt() const noexcept { return 1.0 / sample_rate_hz_; }
    double duration_s() const noexcept { return static_cast<double>(size()) * dt(); }

    /// Copy truncated or zero-extended to n samples.
    Signal resized(std::size_t n) const;

    Signal& operator+=(const Signal& other);
    Signal& operator-=(const Signal& other);
    Signal& operator*=(double scale);

    friend bool operator==(const Signal&, const Signal&) = default;

private:
    std::vector<double> samples_;
    double sample_rate_hz_;
};

Signal operator+(Signal a, const Signal& b);
Signal operator-(Signal a, const Signal& b);
Signal operator*(double scale, Signal x);

/// Full-length DFT of a zero-padded Signal.
struct Spectrum {
    std::vector<Complex> bins;
    std::size_t source_len = 0;
    double sample_rate_hz = 1.0;

    std::size_t pad_len() const noexcept { return bins.size(); }
    double dt() const noexcept { return 1.0 / sample_rate_hz; }
    /// Signed angular frequency (rad/s) of bin k.
    double omega(std::size_t k) const noexcept;
};

/// Discrete search domain for delays. Delays live on the integer-sample
/// grid min_delay_s + j * step_s.
struct DelayGrid {
    double min_delay_s = 0.0;
    double max_delay_s = 0.0;
    double step_s = 1.0;

    /// Every delay that keeps an atom of atom_len samples inside a window of
    /// signal_len samples.
    static DelayGrid covering(std::size_t signal_len, std::size_t atom_len, double sample_rate_hz);

    std::size_t first_index() const;
    std::size_t last_index() const;
    std::size_t count() const { return last_index() - first_index() + 1; }
    double delay_at(std::size_t sample_index) const noexcept {
        return static_cast<double>(sample_index) * step_s;
    }
    void validate() const;
};

/// Sample rates equal to 1e-9 relative.
bool same_rate(double a_hz, double b_hz) noexcept;
void require_same_rate(double a_hz, double b_hz);

/// Converts a delay to an integer number of samples; throws when tau_s is not
/// on the sample grid (1e-6 sample tolerance).
long delay_to_samples(double tau_s, double sample_rate_hz);

Spectrum forward_transform(const Signal& x, std::size_t pad_len);

/// Real part of the inverse DFT, pad_len samples long.
Signal inverse_transform(const Spectrum& spectrum);

/// Complex inverse DFT; exposes the imaginary residue.
std::vector<Complex> inverse_transform_complex(const Spectrum& spectrum);

/// sqrt(sum x^2 dt).
double norm_time(const Signal& x);
double norm_time(std::span<const double> x, double dt);

/// sqrt(sum |X|^2 dt / pad_len); equals norm_time of the source by Parseval.
double norm_freq(const Spectrum& spectrum);

/// Real part of the frequency-domain inner product, weighted so that it
/// equals the time-domain Riemann inner product.
double inner_freq(const Spectrum& a, const Spectrum& b);

/// Multiplies every bin by exp(-j omega tau). Throws WindowError when the
/// shifted source would wrap around the padded window.
Spectrum apply_delay(const Spectrum& spectrum, double tau_s);

/// Smallest power of two >= n.
std::size_t next_pow2(std::size_t n);

/// Transform length used by the pursuits: a power of two covering at least
/// twice the signal and the signal plus the atom.
std::size_t pursuit_pad_len(std::size_t signal_len, std::size_t atom_len);

/// Two-column CSV (time_s,value) with header.
Signal read_signal_csv(const std::filesystem::path& path);
void write_signal_csv(const std::filesystem::path& path, const Signal& x);

}  // namespace lambmp

#include "lambmp/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "lambmp/error.hpp"

namespace lambmp {

using std::numbers::pi;

double PlateModel::xi() const noexcept { return pi * pi / 12.0; }

double PlateModel::s0_speed() const noexcept { return std::sqrt(Q() / rho); }

void PlateModel::validate() const {
    if (!(E > 0.0)) throw PreconditionError("Young's modulus must be positive");
    if (!(nu > 0.0 && nu < 0.5)) throw PreconditionError("Poisson ratio must lie in (0, 0.5)");
    if (!(rho > 0.0)) throw PreconditionError("density must be positive");
    if (!(h > 0.0)) throw PreconditionError("thickness must be positive");
}

A0Form parse_a0_form(std::string_view name) {
    if (name == "mindlin") return A0Form::Mindlin;
    if (name == "printed") return A0Form::AsPrinted;
    throw PreconditionError("unknown A0 formula '" + std::string(name) + "' (expected mindlin or printed)");
}

std::string_view to_string(A0Form form) noexcept { return form == A0Form::Mindlin ? "mindlin" : "printed"; }

ModeSet ModeSet::parse(std::string_view list) {
    ModeSet m{false, false};
    std::size_t start = 0;
    while (start <= list.size()) {
        const auto comma = list.find(',', start);
        const auto tok = list.substr(start, comma == std::string_view::npos ? list.size() - start : comma - start);
        if (tok == "s0" || tok == "S0")
            m.s0 = true;
        else if (tok == "a0" || tok == "A0")
            m.a0 = true;
        else
            throw PreconditionError("unknown mode '" + std::string(tok) + "' (expected s0 or a0)");
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    m.validate();
    return m;
}

void ModeSet::validate() const {
    if (!s0 && !a0) throw PreconditionError("at least one Lamb mode must be enabled");
}

double k_s0(double f_hz, const PlateModel& plate) { return 2.0 * pi * f_hz * std::sqrt(plate.rho / plate.Q()); }

double k_a0(double f_hz, const PlateModel& plate, A0Form form) {
    if (!(f_hz > 0.0)) throw PreconditionError("A0 wavenumber requires f > 0");
    const double a = plate.rho / plate.Q();
    const double b = plate.rho / (plate.G() * plate.xi());
    const double inner = form == A0Form::Mindlin
                             ? plate.rho * plate.h / (pi * pi * f_hz * f_hz * plate.I() * plate.Q())
                             : (plate.rho + plate.rho / (plate.I() * plate.Q())) / (pi * f_hz * f_hz);
    const double r1 = (a - b) * (a - b) + inner;
    if (r1 < 0.0) throw NumericalError("negative radicand in A0 wavenumber at f = " + std::to_string(f_hz) + " Hz");
    const double r2 = (a + b) + std::sqrt(r1);
    if (r2 < 0.0) throw NumericalError("negative radicand in A0 wavenumber at f = " + std::to_string(f_hz) + " Hz");
    return 2.0 * pi * f_hz / std::sqrt(2.0) * std::sqrt(r2);
}

double wavenumber(LambMode mode, double f_hz, const PlateModel& plate, A0Form form) {
    return mode == LambMode::S0 ? k_s0(f_hz, plate) : k_a0(f_hz, plate, form);
}

Velocities velocities(double f_hz, const PlateModel& plate, LambMode mode, A0Form form, double rel_step) {
    if (!(f_hz > 0.0)) throw PreconditionError("velocities require f > 0");
    const double df = rel_step * f_hz;
    const double k = wavenumber(mode, f_hz, plate, form);
    const double dk = wavenumber(mode, f_hz + df, plate, form) - wavenumber(mode, f_hz - df, plate, form);
    return Velocities{2.0 * pi * f_hz / k, 2.0 * pi * 2.0 * df / dk};
}

double spectral_peak_hz(const Signal& x) {
    const std::size_t pad = next_pow2(std::max<std::size_t>(4 * x.size(), 1024));
    const Spectrum spec = forward_transform(x, pad);
    std::size_t best = 1;
    for (std::size_t k = 1; k <= pad / 2; ++k)
        if (std::abs(spec.bins[k]) > std::abs(spec.bins[best])) best = k;
    return static_cast<double>(best) * x.sample_rate_hz() / static_cast<double>(pad);
}

std::size_t required_length(const Signal& x, double d_m, const PlateModel& plate, const ModeSet& modes,
                            A0Form form) {
    modes.validate();
    const double f_peak = spectral_peak_hz(x);
    double slowest = std::numeric_limits<double>::infinity();
    if (modes.s0) slowest = std::min(slowest, plate.s0_speed());
    if (modes.a0) slowest = std::min(slowest, velocities(f_peak, plate, LambMode::A0, form).c_group);
    const double arrival = d_m / slowest + x.duration_s();
    return static_cast<std::size_t>(std::ceil(arrival * x.sample_rate_hz()));
}

Signal propagate(const Signal& x, double d_m, const PlateModel& plate, const ModeSet& modes,
                 const PropagateOptions& options) {
    plate.validate();
    modes.validate();
    if (!(d_m >= 0.0) || !std::isfinite(d_m)) throw PreconditionError("propagation distance must be nonnegative");
    const std::size_t required = required_length(x, d_m, plate, modes, options.a0_form);
    const std::size_t out_len = options.out_len == 0 ? std::max(required, x.size()) : options.out_len;
    if (out_len < required)
        throw WindowError("window of " + std::to_string(out_len) + " samples is too short for the slowest packet at d = " +
                              std::to_string(d_m) + " m; at least " + std::to_string(required) + " samples required",
                          required);

    // Generous padding keeps slow low-frequency content from wrapping into the window.
    const std::size_t pad = next_pow2(4 * std::max(out_len, x.size()));
    const Spectrum in = forward_transform(x, pad);
    Spectrum out{std::vector<Complex>(pad, Complex{}), in.source_len, in.sample_rate_hz};
    const double df = x.sample_rate_hz() / static_cast<double>(pad);
    const int n_modes = int(modes.s0) + int(modes.a0);

    out.bins[0] = static_cast<double>(n_modes) * in.bins[0];
    out.bins[pad / 2] = static_cast<double>(n_modes) * in.bins[pad / 2];
    for (std::size_t k = 1; k < pad / 2; ++k) {
        const double f = static_cast<double>(k) * df;
        Complex acc{};
        if (modes.s0) acc += std::polar(1.0, -k_s0(f, plate) * d_m);
        if (modes.a0) acc += std::polar(1.0, -k_a0(f, plate, options.a0_form) * d_m);
        out.bins[k] = in.bins[k] * acc;
        out.bins[pad - k] = std::conj(out.bins[k]);
    }
    return inverse_transform(out).resized(out_len);
}

}  // namespace lambmp

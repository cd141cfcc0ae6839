#include "lambmp/atom.hpp"

#include <cmath>
#include <numbers>

#include "lambmp/error.hpp"

namespace lambmp {

void BurstSpec::validate() const {
    if (!(f0_hz > 0.0) || !std::isfinite(f0_hz)) throw PreconditionError("burst centre frequency must be positive");
    if (n_cycles < 1) throw PreconditionError("burst needs at least one cycle");
    if (!(sample_rate_hz > 2.0 * f0_hz))
        throw PreconditionError("sample rate must exceed twice the burst centre frequency (Nyquist)");
    if (!std::isfinite(amplitude)) throw PreconditionError("burst amplitude must be finite");
}

Signal make_tone_burst(const BurstSpec& spec) {
    spec.validate();
    const double tb = spec.duration_s();
    const double dt = 1.0 / spec.sample_rate_hz;
    // Guard against 50e-6 * 2e6 evaluating to 100.00000000000001.
    const auto n = static_cast<std::size_t>(std::ceil(tb * spec.sample_rate_hz - 1e-9)) + 1;
    std::vector<double> x(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double t = static_cast<double>(i) * dt;
        if (t > tb) break;
        x[i] = spec.amplitude * std::sin(2.0 * std::numbers::pi * spec.f0_hz * t) *
               std::sin(std::numbers::pi * t / tb);
    }
    return Signal(std::move(x), spec.sample_rate_hz);
}

Signal load_atom(const std::filesystem::path& path) { return read_signal_csv(path); }

}  // namespace lambmp

#include "lambmp/sampm.hpp"

#include <cmath>
#include <string>

#include "fft.hpp"
#include "lambmp/error.hpp"
#include "pursuit_common.hpp"

namespace lambmp {

std::string_view to_string(StopReason reason) noexcept {
    switch (reason) {
        case StopReason::Tolerance: return "tolerance";
        case StopReason::MaxTerms: return "max_terms";
        case StopReason::Stagnation: return "stagnation";
    }
    return "unknown";
}

void add_delayed(std::span<double> out, std::span<const double> atom, std::size_t delay_samples, double scale) {
    for (std::size_t i = 0; i < atom.size() && delay_samples + i < out.size(); ++i)
        out[delay_samples + i] += scale * atom[i];
}

Signal SampmDecomposition::reconstruction(std::optional<std::size_t> count) const {
    Signal out = Signal::zeros(residual.size(), residual.sample_rate_hz());
    const std::size_t n = std::min(count.value_or(terms.size()), terms.size());
    for (std::size_t i = 0; i < n; ++i)
        add_delayed(out.samples_mut(), atom.samples(),
                    static_cast<std::size_t>(delay_to_samples(terms[i].tau_s, atom.sample_rate_hz())), terms[i].alpha);
    return out;
}

Signal SampmDecomposition::term_signal(std::size_t index) const {
    Signal out = Signal::zeros(residual.size(), residual.sample_rate_hz());
    const auto& t = terms.at(index);
    add_delayed(out.samples_mut(), atom.samples(),
                static_cast<std::size_t>(delay_to_samples(t.tau_s, atom.sample_rate_hz())), t.alpha);
    return out;
}

namespace detail {

double atom_energy(const Spectrum& atom_spec) {
    const double n = norm_freq(atom_spec);
    const double energy = n * n;
    if (!(energy > 0.0)) throw NumericalError("atom has zero energy");
    return energy;
}

void check_grid_fits(const DelayGrid& grid, std::size_t atom_len, std::size_t limit, const char* what) {
    grid.validate();
    const std::size_t last = grid.last_index();
    if (last + atom_len > limit)
        throw WindowError("delay grid reaches sample " + std::to_string(last) + " but the atom (" +
                              std::to_string(atom_len) + " samples) must fit inside the " + what + " of " +
                              std::to_string(limit) + " samples",
                          last + atom_len);
}

std::vector<double> cross_correlation(const Spectrum& atom_spec, const Spectrum& residual_spec) {
    if (atom_spec.pad_len() != residual_spec.pad_len() ||
        !same_rate(atom_spec.sample_rate_hz, residual_spec.sample_rate_hz))
        throw PreconditionError("atom and residual spectra differ in pad length or sample rate");
    std::vector<Complex> prod(atom_spec.pad_len());
    for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = std::conj(atom_spec.bins[k]) * residual_spec.bins[k];
    fft_inplace(prod, true);
    std::vector<double> corr(prod.size());
    const double dt = atom_spec.dt();
    for (std::size_t k = 0; k < prod.size(); ++k) corr[k] = prod[k].real() * dt;
    return corr;
}

DelaySelection select_delay(const Spectrum& atom_spec, const Signal& residual, const DelayGrid& grid) {
    const std::size_t pad = atom_spec.pad_len();
    const Spectrum residual_spec = forward_transform(residual, pad);
    const double energy = atom_energy(atom_spec);
    const auto corr = cross_correlation(atom_spec, residual_spec);
    DelaySelection best{grid.first_index(), 0.0, -1.0};
    for (std::size_t k = grid.first_index(); k <= grid.last_index(); ++k) {
        const double g = corr[k] * corr[k] / energy;
        if (g > best.gain) best = DelaySelection{k, corr[k] / energy, g};
    }
    return best;
}

}  // namespace detail

double optimal_amplitude(const Spectrum& atom_spec, const Spectrum& residual_spec, double tau_s) {
    if (atom_spec.pad_len() != residual_spec.pad_len() ||
        !same_rate(atom_spec.sample_rate_hz, residual_spec.sample_rate_hz))
        throw PreconditionError("atom and residual spectra differ in pad length or sample rate");
    const double energy = detail::atom_energy(atom_spec);
    return inner_freq(apply_delay(atom_spec, tau_s), residual_spec) / energy;
}

std::vector<GainSample> gain_function(const Spectrum& atom_spec, const Spectrum& residual_spec,
                                      const DelayGrid& grid) {
    detail::check_grid_fits(grid, atom_spec.source_len, atom_spec.pad_len(), "padded window");
    const double energy = detail::atom_energy(atom_spec);
    const auto corr = detail::cross_correlation(atom_spec, residual_spec);
    std::vector<GainSample> out;
    out.reserve(grid.count());
    for (std::size_t k = grid.first_index(); k <= grid.last_index(); ++k)
        out.push_back({grid.delay_at(k), corr[k] * corr[k] / energy});
    return out;
}

namespace {

void check_inputs(const Signal& residual, const Signal& atom, const DelayGrid& grid) {
    require_same_rate(residual.sample_rate_hz(), atom.sample_rate_hz());
    if (!same_rate(1.0 / grid.step_s, atom.sample_rate_hz()))
        throw PreconditionError("delay grid step must equal the sampling interval");
    detail::check_grid_fits(grid, atom.size(), residual.size(), "signal window");
}

}  // namespace

SampmTerm sampm_step(const Signal& residual, const Signal& atom, const DelayGrid& grid) {
    check_inputs(residual, atom, grid);
    const Spectrum atom_spec = forward_transform(atom, pursuit_pad_len(residual.size(), atom.size()));
    const auto sel = detail::select_delay(atom_spec, residual, grid);
    const double tau = grid.delay_at(sel.index);
    const Spectrum residual_spec = forward_transform(residual, atom_spec.pad_len());
    return SampmTerm{tau, optimal_amplitude(atom_spec, residual_spec, tau)};
}

SampmDecomposition sampm_decompose(const Signal& s, const Signal& atom, const SampmOptions& options) {
    if (options.max_terms < 1) throw PreconditionError("max_terms must be at least 1");
    if (!(options.tol_pct >= 0.0 && options.tol_pct < 100.0))
        throw PreconditionError("tolerance must lie in [0, 100) percent");
    const DelayGrid grid = options.grid.value_or(DelayGrid::covering(s.size(), atom.size(), s.sample_rate_hz()));
    check_inputs(s, atom, grid);

    SampmDecomposition dec{atom, {}, {}, s, options.tol_pct, options.max_terms, StopReason::MaxTerms};
    const double s_norm = norm_time(s);
    if (s_norm == 0.0) {
        dec.stop = StopReason::Stagnation;
        return dec;
    }
    const Spectrum atom_spec = forward_transform(atom, pursuit_pad_len(s.size(), atom.size()));

    for (int m = 0; m < options.max_terms; ++m) {
        const double r_norm = norm_time(dec.residual);
        const auto sel = detail::select_delay(atom_spec, dec.residual, grid);
        if (!(sel.gain > detail::kStagnationRel * r_norm * r_norm)) {
            dec.stop = StopReason::Stagnation;
            return dec;
        }
        const double tau = grid.delay_at(sel.index);
        const double alpha = optimal_amplitude(atom_spec, forward_transform(dec.residual, atom_spec.pad_len()), tau);
        add_delayed(dec.residual.samples_mut(), atom.samples(), sel.index, -alpha);
        dec.terms.push_back({tau, alpha});
        const double xi = 100.0 * norm_time(dec.residual) / s_norm;
        dec.error_history_pct.push_back(xi);
        if (xi <= options.tol_pct) {
            dec.stop = StopReason::Tolerance;
            return dec;
        }
    }
    return dec;
}

}  // namespace lambmp

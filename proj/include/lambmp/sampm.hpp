#pragma once

// Single-atom matching pursuit: every term is a scaled, delayed copy of one
// atom. The delay maximizes the gain G(tau) (squared correlation over atom
// energy) and the amplitude is the least-squares projection at that delay.

#include <optional>
#include <string_view>
#include <vector>

#include "lambmp/core.hpp"

namespace lambmp {

struct SampmTerm {
    double tau_s = 0.0;
    double alpha = 0.0;
};

enum class StopReason { Tolerance, MaxTerms, Stagnation };

std::string_view to_string(StopReason reason) noexcept;

struct GainSample {
    double tau_s;
    double gain;
};

struct SampmOptions {
    int max_terms = 50;
    double tol_pct = 10.0;
    /// Defaults to DelayGrid::covering(signal, atom).
    std::optional<DelayGrid> grid;
};

struct SampmDecomposition {
    Signal atom;
    std::vector<SampmTerm> terms;
    std::vector<double> error_history_pct;
    Signal residual;
    double tol_pct = 0.0;
    int max_terms = 0;
    StopReason stop = StopReason::MaxTerms;

    /// Sum of alpha * atom(t - tau) over the first `count` terms (all by default).
    Signal reconstruction(std::optional<std::size_t> count = std::nullopt) const;
    /// Individual term alpha * atom(t - tau) on the residual's time base.
    Signal term_signal(std::size_t index) const;
};

/// Least-squares amplitude of the delayed atom against the residual.
double optimal_amplitude(const Spectrum& atom_spec, const Spectrum& residual_spec, double tau_s);

/// G(tau) at every delay of the grid, computed through one FFT cross-correlation.
std::vector<GainSample> gain_function(const Spectrum& atom_spec, const Spectrum& residual_spec,
                                      const DelayGrid& grid);

/// One greedy step: argmax of G (smallest tau on ties), amplitude at that tau.
SampmTerm sampm_step(const Signal& residual, const Signal& atom, const DelayGrid& grid);

SampmDecomposition sampm_decompose(const Signal& s, const Signal& atom, const SampmOptions& options = {});

/// Adds scale * atom delayed by delay_samples into out, clipping at the window end.
void add_delayed(std::span<double> out, std::span<const double> atom, std::size_t delay_samples, double scale);

}  // namespace lambmp

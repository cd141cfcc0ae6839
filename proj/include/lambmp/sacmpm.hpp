#pragma once

// Single-atom convolutional matching pursuit. Each term is a short impulse
// response alpha_m(t), expanded on second-kind Chebyshev polynomials over the
// atom support, convolved with the atom delayed by tau_m:
//
//   s(t) ~ sum_m [alpha_m * atom(. - tau_m)](t),  alpha_m(t) = sum_i U_{i-1}(x(t)) beta_i
//
// tau_m comes from the scalar-amplitude gain search of the SAMPM; beta solves
// the Galerkin system M beta = F with M = int B B^T dt and F = int B r dt.

#include <Eigen/Dense>
#include <optional>
#include <vector>

#include "lambmp/core.hpp"
#include "lambmp/sampm.hpp"

namespace lambmp {

struct ChebyshevBasis {
    int n_funcs = 40;
    double support_s = 50e-6;
    double sample_rate_hz = 2e6;

    /// Samples covering [0, support_s] inclusive.
    std::size_t support_samples() const;
    void validate() const;

    /// Basis whose support matches the atom's: its duration between first and last sample.
    static ChebyshevBasis for_atom(const Signal& atom, int n_funcs);
};

struct SacmpmTerm {
    double tau_s = 0.0;
    Eigen::VectorXd beta;
};

struct SacmpmOptions {
    int n_funcs = 40;
    int max_terms = 50;
    double tol_pct = 10.0;
    double ridge_lambda = 1e-10;
    std::optional<DelayGrid> grid;
};

struct SacmpmDecomposition {
    Signal atom;
    ChebyshevBasis basis;
    std::vector<SacmpmTerm> terms;
    std::vector<double> error_history_pct;
    Signal residual;
    double ridge_lambda = 0.0;
    double tol_pct = 0.0;
    int max_terms = 0;
    StopReason stop = StopReason::MaxTerms;

    Signal reconstruction(std::optional<std::size_t> count = std::nullopt) const;
    Signal term_signal(std::size_t index) const;
    /// alpha_m(t) sampled over the basis support.
    Signal impulse_response(std::size_t index) const;
};

struct GalerkinSystem {
    Eigen::MatrixXd M;
    Eigen::VectorXd F;
};

/// Row i holds U_{i-1}(2t/support - 1) sampled over [0, support].
Eigen::MatrixXd eval_basis(const ChebyshevBasis& basis);

/// Linear convolution scaled by dt; length len(a) + len(b) - 1.
Signal convolve(const Signal& a, const Signal& b);

/// Row i = basis row i convolved with the atom delayed by tau, on [0, out_len).
Eigen::MatrixXd build_B(const Signal& atom, double tau_s, const ChebyshevBasis& basis, std::size_t out_len);

GalerkinSystem assemble_system(const Eigen::MatrixXd& B, const Signal& residual);

/// Solves (M + lambda * trace(M)/N * I) beta = F. Throws NumericalError on a
/// singular system.
Eigen::VectorXd solve_beta(const Eigen::MatrixXd& M, const Eigen::VectorXd& F, double ridge_lambda);

/// Same solution as solve_beta(assemble_system(B, r), lambda), computed by a
/// column-pivoted QR of the ridge-augmented least-squares problem
/// [sqrt(dt) B^T; sqrt(mu) I] beta ~ [sqrt(dt) r; 0], mu = lambda * trace(M) / N.
/// Avoids forming M, whose condition number is the square of B's.
Eigen::VectorXd solve_galerkin(const Eigen::MatrixXd& B, const Signal& residual, double ridge_lambda);

SacmpmTerm sacmpm_step(const Signal& residual, const Signal& atom, const ChebyshevBasis& basis,
                       const DelayGrid& grid, double ridge_lambda);

SacmpmDecomposition sacmpm_decompose(const Signal& s, const Signal& atom, const SacmpmOptions& options = {});

/// The term's contribution [alpha * atom(. - tau)] on [0, out_len).
Signal sacmpm_term_signal(const Signal& atom, const ChebyshevBasis& basis, const SacmpmTerm& term,
                          std::size_t out_len);

}  // namespace lambmp

#include "lambmp/sacmpm.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lambmp/error.hpp"
#include "pursuit_common.hpp"

namespace lambmp {

std::size_t ChebyshevBasis::support_samples() const {
    return static_cast<std::size_t>(std::llround(support_s * sample_rate_hz)) + 1;
}

void ChebyshevBasis::validate() const {
    if (n_funcs < 1) throw PreconditionError("Chebyshev basis needs at least one function");
    if (!(support_s > 0.0) || !std::isfinite(support_s)) throw PreconditionError("basis support must be positive");
    if (!(sample_rate_hz > 0.0)) throw PreconditionError("basis sample rate must be positive");
}

ChebyshevBasis ChebyshevBasis::for_atom(const Signal& atom, int n_funcs) {
    if (atom.size() < 2) throw PreconditionError("atom needs at least two samples to define a support");
    return ChebyshevBasis{n_funcs, static_cast<double>(atom.size() - 1) / atom.sample_rate_hz(), atom.sample_rate_hz()};
}

Eigen::MatrixXd eval_basis(const ChebyshevBasis& basis) {
    basis.validate();
    const auto n = static_cast<Eigen::Index>(basis.n_funcs);
    const auto cols = static_cast<Eigen::Index>(basis.support_samples());
    Eigen::MatrixXd u(n, cols);
    for (Eigen::Index j = 0; j < cols; ++j) {
        const double t = static_cast<double>(j) / basis.sample_rate_hz;
        const double x = 2.0 * t / basis.support_s - 1.0;
        // U_0 = 1, U_1 = 2x, U_{k+1} = 2x U_k - U_{k-1}
        u(0, j) = 1.0;
        if (n > 1) u(1, j) = 2.0 * x;
        for (Eigen::Index i = 2; i < n; ++i) u(i, j) = 2.0 * x * u(i - 1, j) - u(i - 2, j);
    }
    return u;
}

Signal convolve(const Signal& a, const Signal& b) {
    require_same_rate(a.sample_rate_hz(), b.sample_rate_hz());
    const auto sa = a.samples();
    const auto sb = b.samples();
    std::vector<double> out(sa.size() + sb.size() - 1, 0.0);
    for (std::size_t i = 0; i < sa.size(); ++i) {
        if (sa[i] == 0.0) continue;
        for (std::size_t j = 0; j < sb.size(); ++j) out[i + j] += sa[i] * sb[j];
    }
    const double dt = a.dt();
    for (double& v : out) v *= dt;
    return Signal(std::move(out), a.sample_rate_hz());
}

namespace {

/// Basis functions convolved with the undelayed atom, one row per function.
Eigen::MatrixXd basis_kernels(const Signal& atom, const ChebyshevBasis& basis) {
    require_same_rate(atom.sample_rate_hz(), basis.sample_rate_hz);
    const Eigen::MatrixXd u = eval_basis(basis);
    const auto width = static_cast<Eigen::Index>(u.cols() + static_cast<Eigen::Index>(atom.size()) - 1);
    Eigen::MatrixXd k(u.rows(), width);
    for (Eigen::Index i = 0; i < u.rows(); ++i) {
        std::vector<double> row(static_cast<std::size_t>(u.cols()));
        for (Eigen::Index j = 0; j < u.cols(); ++j) row[static_cast<std::size_t>(j)] = u(i, j);
        const Signal c = convolve(Signal(std::move(row), basis.sample_rate_hz), atom);
        for (Eigen::Index j = 0; j < width; ++j) k(i, j) = c[static_cast<std::size_t>(j)];
    }
    return k;
}

Eigen::MatrixXd shift_kernels(const Eigen::MatrixXd& kernels, std::size_t delay, std::size_t out_len) {
    if (delay >= out_len)
        throw WindowError("delay of " + std::to_string(delay) + " samples places the term entirely outside the " +
                              std::to_string(out_len) + "-sample window",
                          delay + 1);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(kernels.rows(), static_cast<Eigen::Index>(out_len));
    const auto d = static_cast<Eigen::Index>(delay);
    const Eigen::Index width = std::min<Eigen::Index>(kernels.cols(), static_cast<Eigen::Index>(out_len) - d);
    b.middleCols(d, width) = kernels.leftCols(width);
    return b;
}

Eigen::Map<const Eigen::VectorXd> as_vector(const Signal& x) {
    return {x.samples().data(), static_cast<Eigen::Index>(x.size())};
}

void check_inputs(const Signal& residual, const Signal& atom, const ChebyshevBasis& basis, const DelayGrid& grid) {
    require_same_rate(residual.sample_rate_hz(), atom.sample_rate_hz());
    require_same_rate(basis.sample_rate_hz, atom.sample_rate_hz());
    basis.validate();
    if (!same_rate(1.0 / grid.step_s, atom.sample_rate_hz()))
        throw PreconditionError("delay grid step must equal the sampling interval");
    detail::check_grid_fits(grid, atom.size(), residual.size(), "signal window");
}

Signal apply_term(const Eigen::MatrixXd& b, const Eigen::VectorXd& beta, double rate) {
    const Eigen::VectorXd y = b.transpose() * beta;
    return Signal(std::vector<double>(y.data(), y.data() + y.size()), rate);
}

}  // namespace

Eigen::MatrixXd build_B(const Signal& atom, double tau_s, const ChebyshevBasis& basis, std::size_t out_len) {
    const long delay = delay_to_samples(tau_s, atom.sample_rate_hz());
    if (delay < 0) throw PreconditionError("delays must be nonnegative");
    return shift_kernels(basis_kernels(atom, basis), static_cast<std::size_t>(delay), out_len);
}

GalerkinSystem assemble_system(const Eigen::MatrixXd& B, const Signal& residual) {
    if (static_cast<std::size_t>(B.cols()) != residual.size())
        throw PreconditionError("B column count must equal the residual length");
    const double dt = residual.dt();
    Eigen::MatrixXd m(B.rows(), B.rows());
    m.setZero();
    m.selfadjointView<Eigen::Lower>().rankUpdate(B, dt);
    m = m.selfadjointView<Eigen::Lower>();
    return GalerkinSystem{std::move(m), B * as_vector(residual) * dt};
}

Eigen::VectorXd solve_beta(const Eigen::MatrixXd& M, const Eigen::VectorXd& F, double ridge_lambda) {
    if (M.rows() != M.cols() || M.rows() != F.size()) throw PreconditionError("Galerkin system dimensions differ");
    if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda))
        throw PreconditionError("ridge parameter must be nonnegative");
    const auto n = M.rows();
    const double trace = M.trace();
    if (!(trace > 0.0)) throw NumericalError("Galerkin matrix is zero; the delayed atom leaves no energy in the window");
    Eigen::MatrixXd a = M;
    a.diagonal().array() += ridge_lambda * trace / static_cast<double>(n);

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
    const auto d = ldlt.vectorD();
    const double d_max = d.cwiseAbs().maxCoeff();
    const double floor = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * d_max;
    if (ldlt.info() != Eigen::Success || !(d.minCoeff() > floor))
        throw NumericalError("Galerkin system is singular to working precision; use a ridge parameter > 0");
    Eigen::VectorXd beta = ldlt.solve(F);
    if (!beta.allFinite()) throw NumericalError("Galerkin solve produced non-finite coefficients");
    return beta;
}

Eigen::VectorXd solve_galerkin(const Eigen::MatrixXd& B, const Signal& residual, double ridge_lambda) {
    if (static_cast<std::size_t>(B.cols()) != residual.size())
        throw PreconditionError("B column count must equal the residual length");
    if (!(ridge_lambda >= 0.0) || !std::isfinite(ridge_lambda))
        throw PreconditionError("ridge parameter must be nonnegative");
    const auto n = B.rows();
    // Columns outside the term's support do not influence the solution.
    Eigen::Index c0 = 0, c1 = B.cols();
    while (c0 < c1 && B.col(c0).isZero(0.0)) ++c0;
    while (c1 > c0 && B.col(c1 - 1).isZero(0.0)) --c1;
    if (c0 == c1) throw NumericalError("Galerkin matrix is zero; the delayed atom leaves no energy in the window");

    const double w = std::sqrt(residual.dt());
    const Eigen::Index rows = c1 - c0;
    const bool ridge = ridge_lambda > 0.0;
    Eigen::MatrixXd a(rows + (ridge ? n : 0), n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
    a.topRows(rows) = w * B.middleCols(c0, rows).transpose();
    rhs.head(rows) = w * as_vector(residual).segment(c0, rows);
    if (ridge) {
        const double mu = ridge_lambda * a.topRows(rows).squaredNorm() / static_cast<double>(n);
        a.bottomRows(n) = std::sqrt(mu) * Eigen::MatrixXd::Identity(n, n);
    }
    const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
    if (qr.rank() < n)
        throw NumericalError("Galerkin system is singular to working precision; use a ridge parameter > 0");
    Eigen::VectorXd beta = qr.solve(rhs);
    if (!beta.allFinite()) throw NumericalError("Galerkin solve produced non-finite coefficients");
    return beta;
}

SacmpmTerm sacmpm_step(const Signal& residual, const Signal& atom, const ChebyshevBasis& basis,
                       const DelayGrid& grid, double ridge_lambda) {
    check_inputs(residual, atom, basis, grid);
    const Spectrum atom_spec = forward_transform(atom, pursuit_pad_len(residual.size(), atom.size()));
    const auto sel = detail::select_delay(atom_spec, residual, grid);
    const Eigen::MatrixXd b = shift_kernels(basis_kernels(atom, basis), sel.index, residual.size());
    return SacmpmTerm{grid.delay_at(sel.index), solve_galerkin(b, residual, ridge_lambda)};
}

Signal sacmpm_term_signal(const Signal& atom, const ChebyshevBasis& basis, const SacmpmTerm& term,
                          std::size_t out_len) {
    if (term.beta.size() != basis.n_funcs) throw PreconditionError("coefficient count differs from basis size");
    return apply_term(build_B(atom, term.tau_s, basis, out_len), term.beta, atom.sample_rate_hz());
}

SacmpmDecomposition sacmpm_decompose(const Signal& s, const Signal& atom, const SacmpmOptions& options) {
    if (options.n_funcs < 1) throw PreconditionError("N must be at least 1");
    if (options.max_terms < 1) throw PreconditionError("max_terms must be at least 1");
    if (!(options.tol_pct >= 0.0 && options.tol_pct < 100.0))
        throw PreconditionError("tolerance must lie in [0, 100) percent");
    const ChebyshevBasis basis = ChebyshevBasis::for_atom(atom, options.n_funcs);
    const DelayGrid grid = options.grid.value_or(DelayGrid::covering(s.size(), atom.size(), s.sample_rate_hz()));
    check_inputs(s, atom, basis, grid);

    SacmpmDecomposition dec{atom, basis, {}, {}, s, options.ridge_lambda, options.tol_pct, options.max_terms,
                            StopReason::MaxTerms};
    const double s_norm = norm_time(s);
    if (s_norm == 0.0) {
        dec.stop = StopReason::Stagnation;
        return dec;
    }
    const Spectrum atom_spec = forward_transform(atom, pursuit_pad_len(s.size(), atom.size()));
    const Eigen::MatrixXd kernels = basis_kernels(atom, basis);

    for (int m = 0; m < options.max_terms; ++m) {
        const double r_norm = norm_time(dec.residual);
        const auto sel = detail::select_delay(atom_spec, dec.residual, grid);
        if (!(sel.gain > detail::kStagnationRel * r_norm * r_norm)) {
            dec.stop = StopReason::Stagnation;
            return dec;
        }
        const Eigen::MatrixXd b = shift_kernels(kernels, sel.index, s.size());
        Eigen::VectorXd beta = solve_galerkin(b, dec.residual, options.ridge_lambda);
        Signal next = dec.residual - apply_term(b, beta, s.sample_rate_hz());
        const double next_norm = norm_time(next);
        if (!(r_norm * r_norm - next_norm * next_norm > detail::kStagnationRel * r_norm * r_norm)) {
            dec.stop = StopReason::Stagnation;
            return dec;
        }
        dec.residual = std::move(next);
        dec.terms.push_back({grid.delay_at(sel.index), std::move(beta)});
        const double xi = 100.0 * next_norm / s_norm;
        dec.error_history_pct.push_back(xi);
        if (xi <= options.tol_pct) {
            dec.stop = StopReason::Tolerance;
            return dec;
        }
    }
    return dec;
}

Signal SacmpmDecomposition::reconstruction(std::optional<std::size_t> count) const {
    Signal out = Signal::zeros(residual.size(), residual.sample_rate_hz());
    const std::size_t n = std::min(count.value_or(terms.size()), terms.size());
    for (std::size_t i = 0; i < n; ++i) out += sacmpm_term_signal(atom, basis, terms[i], residual.size());
    return out;
}

Signal SacmpmDecomposition::term_signal(std::size_t index) const {
    return sacmpm_term_signal(atom, basis, terms.at(index), residual.size());
}

Signal SacmpmDecomposition::impulse_response(std::size_t index) const {
    const Eigen::VectorXd a = eval_basis(basis).transpose() * terms.at(index).beta;
    return Signal(std::vector<double>(a.data(), a.data() + a.size()), basis.sample_rate_hz);
}

}  // namespace lambmp

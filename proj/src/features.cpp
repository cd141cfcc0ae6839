#include "lambmp/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "lambmp/error.hpp"

namespace lambmp {

Method parse_method(std::string_view name) {
    if (name == "sampm") return Method::Sampm;
    if (name == "sacmpm") return Method::Sacmpm;
    throw PreconditionError("unknown method '" + std::string(name) + "' (expected sampm or sacmpm)");
}

std::string_view to_string(Method method) noexcept { return method == Method::Sampm ? "sampm" : "sacmpm"; }

std::vector<std::string> FeatureSchema::column_names() const {
    std::vector<std::string> names;
    names.reserve(length());
    for (std::size_t p = 0; p < paths; ++p) {
        for (int t = 0; t < m; ++t) {
            const std::string prefix = "p" + std::to_string(p) + "_t" + std::to_string(t) + "_";
            names.push_back(prefix + "tau");
            if (method == Method::Sampm)
                names.push_back(prefix + "alpha");
            else
                for (int i = 1; i <= n_funcs; ++i) names.push_back(prefix + "beta" + std::to_string(i));
        }
    }
    return names;
}

namespace {

void require_terms(std::size_t available, int m, std::size_t path) {
    if (m < 1) throw PreconditionError("m must be at least 1");
    if (available < static_cast<std::size_t>(m))
        throw PreconditionError("path " + std::to_string(path) + " holds " + std::to_string(available) +
                                " terms but " + std::to_string(m) +
                                " are required; re-run the pursuit with tol 0 and max_terms >= m");
}

/// Indices of the first m terms ordered by ascending tau (stable on ties).
template <typename Term>
std::vector<std::size_t> tau_order(const std::vector<Term>& terms, int m) {
    std::vector<std::size_t> idx(static_cast<std::size_t>(m));
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t a, std::size_t b) { return terms[a].tau_s < terms[b].tau_s; });
    return idx;
}

}  // namespace

FeatureVector extract(std::span<const SampmDecomposition> per_path, int m) {
    FeatureSchema schema{Method::Sampm, m, 0, per_path.size(), "tau_ascending"};
    FeatureVector out{{}, schema};
    for (std::size_t p = 0; p < per_path.size(); ++p) {
        const auto& terms = per_path[p].terms;
        require_terms(terms.size(), m, p);
        for (std::size_t i : tau_order(terms, m)) {
            out.values.push_back(terms[i].tau_s);
            out.values.push_back(terms[i].alpha);
        }
    }
    return out;
}

FeatureVector extract(std::span<const SacmpmDecomposition> per_path, int m) {
    const int n = per_path.empty() ? 0 : per_path.front().basis.n_funcs;
    FeatureSchema schema{Method::Sacmpm, m, n, per_path.size(), "tau_ascending"};
    FeatureVector out{{}, schema};
    for (std::size_t p = 0; p < per_path.size(); ++p) {
        const auto& terms = per_path[p].terms;
        if (per_path[p].basis.n_funcs != n) throw PreconditionError("paths use different basis sizes");
        require_terms(terms.size(), m, p);
        for (std::size_t i : tau_order(terms, m)) {
            out.values.push_back(terms[i].tau_s);
            out.values.insert(out.values.end(), terms[i].beta.data(), terms[i].beta.data() + terms[i].beta.size());
        }
    }
    return out;
}

Standardizer Standardizer::fit(const Eigen::MatrixXd& rows) {
    if (rows.rows() < 2) throw PreconditionError("standardization needs at least two training rows");
    Standardizer s;
    s.mean = rows.colwise().mean().transpose();
    s.scale.resize(rows.cols());
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        const double var = (rows.col(j).array() - s.mean(j)).square().mean();
        // Columns whose spread is round-off relative to their magnitude count as constant.
        const double tiny = 1e-24 * s.mean(j) * s.mean(j);
        s.scale(j) = var > tiny ? std::sqrt(var) : 0.0;
    }
    return s;
}

Eigen::MatrixXd Standardizer::apply(const Eigen::MatrixXd& rows) const {
    if (rows.cols() != mean.size()) throw PreconditionError("column count differs from the fitted standardizer");
    Eigen::MatrixXd out(rows.rows(), rows.cols());
    for (Eigen::Index j = 0; j < rows.cols(); ++j) {
        if (scale(j) == 0.0)
            out.col(j).setZero();
        else
            out.col(j) = (rows.col(j).array() - mean(j)) / scale(j);
    }
    return out;
}

Eigen::MatrixXd Standardizer::invert(const Eigen::MatrixXd& rows) const {
    if (rows.cols() != mean.size()) throw PreconditionError("column count differs from the fitted standardizer");
    Eigen::MatrixXd out(rows.rows(), rows.cols());
    for (Eigen::Index j = 0; j < rows.cols(); ++j) out.col(j) = rows.col(j).array() * scale(j) + mean(j);
    return out;
}

Standardized standardize(const Eigen::MatrixXd& train) {
    Standardizer s = Standardizer::fit(train);
    Eigen::MatrixXd applied = s.apply(train);
    return {std::move(s), std::move(applied)};
}

}  // namespace lambmp

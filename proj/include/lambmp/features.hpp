#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "lambmp/sacmpm.hpp"
#include "lambmp/sampm.hpp"

namespace lambmp {

enum class Method { Sampm, Sacmpm };

Method parse_method(std::string_view name);
std::string_view to_string(Method method) noexcept;

struct FeatureSchema {
    Method method = Method::Sampm;
    int m = 6;
    int n_funcs = 0;  ///< 0 for SAMPM
    std::size_t paths = 0;
    std::string ordering = "tau_ascending";

    std::size_t per_term() const noexcept { return method == Method::Sampm ? 2 : static_cast<std::size_t>(n_funcs) + 1; }
    std::size_t length() const noexcept { return paths * static_cast<std::size_t>(m) * per_term(); }
    /// Column names p<path>_t<term>_<tau|alpha|beta<i>>.
    std::vector<std::string> column_names() const;

    friend bool operator==(const FeatureSchema&, const FeatureSchema&) = default;
};

struct FeatureVector {
    std::vector<double> values;
    FeatureSchema schema;
};

/// Per path, the first m greedy terms sorted by ascending tau, each emitted as
/// [tau_s, alpha]. Throws PreconditionError when a path holds fewer than m terms.
FeatureVector extract(std::span<const SampmDecomposition> per_path, int m);

/// As above with [tau_s, beta_1..beta_N] per term.
FeatureVector extract(std::span<const SacmpmDecomposition> per_path, int m);

/// Per-column affine map to zero mean and unit (population) variance, fitted on training rows.
struct Standardizer {
    Eigen::VectorXd mean;
    Eigen::VectorXd scale;  ///< 0 marks a constant column, which maps to 0

    static Standardizer fit(const Eigen::MatrixXd& rows);
    Eigen::MatrixXd apply(const Eigen::MatrixXd& rows) const;
    Eigen::MatrixXd invert(const Eigen::MatrixXd& rows) const;
};

struct Standardized {
    Standardizer transform;
    Eigen::MatrixXd applied;
};

Standardized standardize(const Eigen::MatrixXd& train);

}  // namespace lambmp

#pragma once

// Feed-forward damage localizer: standardized features -> three tanh hidden
// layers of 150 units -> linear (x, y) output in standardized target units,
// mapped back to meters at inference.

#include <Eigen/Dense>
#include <cstdint>
#include <span>
#include <vector>

#include "lambmp/features.hpp"

namespace lambmp {

inline constexpr int kHiddenLayers = 3;
inline constexpr int kHiddenWidth = 150;

struct NNModel {
    std::vector<int> layer_dims;           ///< [input, 150, 150, 150, 2]
    std::vector<Eigen::MatrixXd> weights;  ///< weights[l] is dims[l+1] x dims[l]
    std::vector<Eigen::VectorXd> biases;
    Standardizer input;
    Eigen::Vector2d target_mean = Eigen::Vector2d::Zero();
    Eigen::Vector2d target_scale = Eigen::Vector2d::Ones();

    /// Fan-in scaled symmetric uniform weights, zero biases, identity standardization.
    static NNModel initialize(int input_dim, std::uint64_t seed);

    int input_dim() const noexcept { return layer_dims.empty() ? 0 : layer_dims.front(); }
    std::size_t parameter_count() const;
    std::vector<double> parameters() const;
    void set_parameters(std::span<const double> flat);
    void validate() const;
};

struct TrainConfig {
    int max_epochs = 20000;
    double learning_rate = 1e-3;
    std::uint64_t seed = 1;
    /// Training stops once the standardized MSE falls below this value.
    double loss_target = 1e-10;
};

struct LossGradient {
    double loss = 0.0;
    std::vector<double> gradient;  ///< same layout as NNModel::parameters()
};

/// Loss 1/(2n) sum ||net(x_i) - y_i||^2 on already standardized inputs and
/// targets (one sample per row), with its backpropagated gradient.
LossGradient nn_loss_and_gradient(const NNModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets);

/// Raw network output (standardized units) for standardized inputs, one row per sample.
Eigen::MatrixXd nn_network(const NNModel& model, const Eigen::MatrixXd& inputs);

/// Hidden-layer activations for one standardized input (used to check saturation).
std::vector<Eigen::VectorXd> nn_hidden_activations(const NNModel& model, std::span<const double> standardized_input);

/// Prediction in meters for raw features.
Eigen::Vector2d nn_forward(const NNModel& model, std::span<const double> features);
Eigen::MatrixXd nn_forward(const NNModel& model, const Eigen::MatrixXd& features);

struct TrainResult {
    NNModel model;
    std::vector<double> loss_history;  ///< accepted loss after every epoch
};

/// Full-batch gradient descent with a bold-driver step: growth by 5% after
/// an accepted step, rejection and halving after a loss increase.
TrainResult nn_train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, const TrainConfig& config);

struct EvalRow {
    Eigen::Vector2d truth;
    Eigen::Vector2d prediction;
};

struct EvalReport {
    double x_error_pct = 0.0;
    double y_error_pct = 0.0;
    std::vector<EvalRow> rows;
};

/// 100 * mean |pred - true| / coordinate range, per coordinate.
EvalReport nn_evaluate(const NNModel& model, const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                       double x_range_m, double y_range_m);

}  // namespace lambmp

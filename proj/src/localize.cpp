#include "lambmp/localize.hpp"

#include <cmath>
#include <random>
#include <string>

#include "lambmp/error.hpp"

namespace lambmp {

NNModel NNModel::initialize(int input_dim, std::uint64_t seed) {
    if (input_dim < 1) throw PreconditionError("network input dimension must be positive");
    NNModel model;
    model.layer_dims = {input_dim};
    for (int l = 0; l < kHiddenLayers; ++l) model.layer_dims.push_back(kHiddenWidth);
    model.layer_dims.push_back(2);

    std::mt19937_64 rng(seed);
    for (std::size_t l = 0; l + 1 < model.layer_dims.size(); ++l) {
        const int fan_in = model.layer_dims[l];
        const int fan_out = model.layer_dims[l + 1];
        const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        std::uniform_real_distribution<double> u(-bound, bound);
        Eigen::MatrixXd w(fan_out, fan_in);
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = u(rng);
        model.weights.push_back(std::move(w));
        model.biases.push_back(Eigen::VectorXd::Zero(fan_out));
    }
    model.input.mean = Eigen::VectorXd::Zero(input_dim);
    model.input.scale = Eigen::VectorXd::Ones(input_dim);
    return model;
}

std::size_t NNModel::parameter_count() const {
    std::size_t n = 0;
    for (std::size_t l = 0; l < weights.size(); ++l)
        n += static_cast<std::size_t>(weights[l].size() + biases[l].size());
    return n;
}

std::vector<double> NNModel::parameters() const {
    std::vector<double> flat;
    flat.reserve(parameter_count());
    for (std::size_t l = 0; l < weights.size(); ++l) {
        // Row-major weights, then biases.
        for (Eigen::Index i = 0; i < weights[l].rows(); ++i)
            for (Eigen::Index j = 0; j < weights[l].cols(); ++j) flat.push_back(weights[l](i, j));
        flat.insert(flat.end(), biases[l].data(), biases[l].data() + biases[l].size());
    }
    return flat;
}

void NNModel::set_parameters(std::span<const double> flat) {
    if (flat.size() != parameter_count()) throw PreconditionError("parameter vector has the wrong length");
    std::size_t k = 0;
    for (std::size_t l = 0; l < weights.size(); ++l) {
        for (Eigen::Index i = 0; i < weights[l].rows(); ++i)
            for (Eigen::Index j = 0; j < weights[l].cols(); ++j) weights[l](i, j) = flat[k++];
        for (Eigen::Index i = 0; i < biases[l].size(); ++i) biases[l](i) = flat[k++];
    }
}

void NNModel::validate() const {
    if (layer_dims.size() != static_cast<std::size_t>(kHiddenLayers) + 2)
        throw PreconditionError("network must have exactly three hidden layers");
    for (int l = 1; l <= kHiddenLayers; ++l)
        if (layer_dims[static_cast<std::size_t>(l)] != kHiddenWidth)
            throw PreconditionError("hidden layers must have 150 units");
    if (layer_dims.back() != 2) throw PreconditionError("network output must be (x, y)");
    if (weights.size() != layer_dims.size() - 1 || biases.size() != weights.size())
        throw PreconditionError("layer count does not match the weight arrays");
    for (std::size_t l = 0; l < weights.size(); ++l) {
        if (weights[l].rows() != layer_dims[l + 1] || weights[l].cols() != layer_dims[l] ||
            biases[l].size() != layer_dims[l + 1])
            throw PreconditionError("weight shape mismatch in layer " + std::to_string(l));
        if (!weights[l].allFinite() || !biases[l].allFinite()) throw NumericalError("non-finite network parameter");
    }
    if (input.mean.size() != layer_dims.front() || input.scale.size() != layer_dims.front())
        throw PreconditionError("input standardization does not match the input dimension");
}

namespace {

/// Activations per layer with samples as columns; acts[0] is the input.
std::vector<Eigen::MatrixXd> forward_all(const NNModel& model, const Eigen::MatrixXd& inputs_by_col) {
    std::vector<Eigen::MatrixXd> acts;
    acts.reserve(model.weights.size() + 1);
    acts.push_back(inputs_by_col);
    for (std::size_t l = 0; l < model.weights.size(); ++l) {
        Eigen::MatrixXd z = model.weights[l] * acts.back();
        z.colwise() += model.biases[l];
        if (l + 1 < model.weights.size()) z = z.array().tanh();
        acts.push_back(std::move(z));
    }
    return acts;
}

void check_dims(const NNModel& model, Eigen::Index cols) {
    if (cols != model.input_dim())
        throw PreconditionError("feature length " + std::to_string(cols) + " does not match the network input (" +
                                std::to_string(model.input_dim()) + ")");
}

}  // namespace

Eigen::MatrixXd nn_network(const NNModel& model, const Eigen::MatrixXd& inputs) {
    check_dims(model, inputs.cols());
    return forward_all(model, inputs.transpose()).back().transpose();
}

std::vector<Eigen::VectorXd> nn_hidden_activations(const NNModel& model, std::span<const double> standardized_input) {
    check_dims(model, static_cast<Eigen::Index>(standardized_input.size()));
    const Eigen::Map<const Eigen::VectorXd> x(standardized_input.data(), static_cast<Eigen::Index>(standardized_input.size()));
    const auto acts = forward_all(model, x);
    std::vector<Eigen::VectorXd> hidden;
    for (std::size_t l = 1; l + 1 < acts.size(); ++l) hidden.emplace_back(acts[l].col(0));
    return hidden;
}

LossGradient nn_loss_and_gradient(const NNModel& model, const Eigen::MatrixXd& inputs, const Eigen::MatrixXd& targets) {
    check_dims(model, inputs.cols());
    if (targets.rows() != inputs.rows() || targets.cols() != 2)
        throw PreconditionError("targets must be an n x 2 matrix matching the inputs");
    const auto n = static_cast<double>(inputs.rows());
    const auto acts = forward_all(model, inputs.transpose());
    const Eigen::MatrixXd diff = acts.back() - targets.transpose();

    LossGradient out;
    out.loss = 0.5 * diff.squaredNorm() / n;

    const std::size_t layers = model.weights.size();
    std::vector<Eigen::MatrixXd> dw(layers);
    std::vector<Eigen::VectorXd> db(layers);
    Eigen::MatrixXd delta = diff / n;
    for (std::size_t l = layers; l-- > 0;) {
        dw[l] = delta * acts[l].transpose();
        db[l] = delta.rowwise().sum();
        if (l > 0) delta = (model.weights[l].transpose() * delta).array() * (1.0 - acts[l].array().square());
    }
    out.gradient.reserve(model.parameter_count());
    for (std::size_t l = 0; l < layers; ++l) {
        for (Eigen::Index i = 0; i < dw[l].rows(); ++i)
            for (Eigen::Index j = 0; j < dw[l].cols(); ++j) out.gradient.push_back(dw[l](i, j));
        out.gradient.insert(out.gradient.end(), db[l].data(), db[l].data() + db[l].size());
    }
    return out;
}

Eigen::MatrixXd nn_forward(const NNModel& model, const Eigen::MatrixXd& features) {
    const Eigen::MatrixXd raw = nn_network(model, model.input.apply(features));
    Eigen::MatrixXd out(raw.rows(), 2);
    for (Eigen::Index i = 0; i < raw.rows(); ++i)
        out.row(i) = (raw.row(i).transpose().array() * model.target_scale.array() + model.target_mean.array()).transpose();
    return out;
}

Eigen::Vector2d nn_forward(const NNModel& model, std::span<const double> features) {
    const Eigen::Map<const Eigen::RowVectorXd> row(features.data(), static_cast<Eigen::Index>(features.size()));
    return nn_forward(model, Eigen::MatrixXd(row)).row(0).transpose();
}

TrainResult nn_train(const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets, const TrainConfig& config) {
    if (config.max_epochs < 1) throw PreconditionError("max_epochs must be positive");
    if (!(config.learning_rate > 0.0)) throw PreconditionError("learning rate must be positive");
    if (features.rows() < 1 || targets.rows() != features.rows() || targets.cols() != 2)
        throw PreconditionError("training data must hold matching feature and (x, y) target rows");

    NNModel model = NNModel::initialize(static_cast<int>(features.cols()), config.seed);
    Eigen::MatrixXd x = features;
    Eigen::MatrixXd y = targets;
    if (features.rows() >= 2) {
        model.input = Standardizer::fit(features);
        x = model.input.apply(features);
        const Standardizer ts = Standardizer::fit(targets);
        for (int c = 0; c < 2; ++c) {
            model.target_mean(c) = ts.mean(c);
            model.target_scale(c) = ts.scale(c) > 0.0 ? ts.scale(c) : 1.0;
        }
    } else {
        model.target_mean = targets.row(0).transpose();
    }
    for (int c = 0; c < 2; ++c)
        y.col(c) = (targets.col(c).array() - model.target_mean(c)) / model.target_scale(c);

    std::vector<double> params = model.parameters();
    LossGradient current = nn_loss_and_gradient(model, x, y);
    if (!std::isfinite(current.loss))
        throw NumericalError("initial training loss is not finite; reduce the learning rate or check the features");

    TrainResult result{model, {}};
    double rate = config.learning_rate;
    std::vector<double> trial(params.size());
    NNModel work = model;
    for (int epoch = 0; epoch < config.max_epochs && current.loss > config.loss_target; ++epoch) {
        for (std::size_t i = 0; i < params.size(); ++i) trial[i] = params[i] - rate * current.gradient[i];
        work.set_parameters(trial);
        LossGradient next = nn_loss_and_gradient(work, x, y);
        if (std::isfinite(next.loss) && next.loss < current.loss) {
            params.swap(trial);
            current = std::move(next);
            rate *= 1.05;
        } else {
            rate *= 0.5;
            if (rate < 1e-300)
                throw NumericalError("training diverged (step size collapsed); use a smaller learning rate");
        }
        result.loss_history.push_back(current.loss);
    }
    model.set_parameters(params);
    result.model = std::move(model);
    return result;
}

EvalReport nn_evaluate(const NNModel& model, const Eigen::MatrixXd& features, const Eigen::MatrixXd& targets,
                       double x_range_m, double y_range_m) {
    if (!(x_range_m > 0.0) || !(y_range_m > 0.0)) throw PreconditionError("coordinate ranges must be positive");
    if (targets.rows() != features.rows() || targets.cols() != 2)
        throw PreconditionError("targets must be an n x 2 matrix matching the features");
    EvalReport report;
    if (features.rows() == 0) return report;
    const Eigen::MatrixXd pred = nn_forward(model, features);
    double ex = 0.0, ey = 0.0;
    for (Eigen::Index i = 0; i < pred.rows(); ++i) {
        report.rows.push_back({targets.row(i).transpose(), pred.row(i).transpose()});
        ex += std::abs(pred(i, 0) - targets(i, 0));
        ey += std::abs(pred(i, 1) - targets(i, 1));
    }
    const auto n = static_cast<double>(pred.rows());
    report.x_error_pct = 100.0 * ex / n / x_range_m;
    report.y_error_pct = 100.0 * ey / n / y_range_m;
    return report;
}

}  // namespace lambmp

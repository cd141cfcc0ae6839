#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "lambmp/error.hpp"
#include "lambmp/localize.hpp"

using namespace lambmp;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index r, Eigen::Index c) {
    const auto v = oracle::random_vector(rng, static_cast<std::size_t>(r * c));
    return Eigen::Map<const Eigen::MatrixXd>(v.data(), r, c);
}

/// Straightforward per-sample evaluation written without the library's batching.
Eigen::Vector2d reference_forward(const NNModel& m, const Eigen::VectorXd& raw) {
    std::vector<double> a(static_cast<std::size_t>(raw.size()));
    for (Eigen::Index j = 0; j < raw.size(); ++j)
        a[static_cast<std::size_t>(j)] = m.input.scale(j) == 0.0 ? 0.0 : (raw(j) - m.input.mean(j)) / m.input.scale(j);
    for (std::size_t l = 0; l < m.weights.size(); ++l) {
        std::vector<double> z(static_cast<std::size_t>(m.weights[l].rows()));
        for (Eigen::Index i = 0; i < m.weights[l].rows(); ++i) {
            double acc = m.biases[l](i);
            for (Eigen::Index j = 0; j < m.weights[l].cols(); ++j) acc += m.weights[l](i, j) * a[static_cast<std::size_t>(j)];
            z[static_cast<std::size_t>(i)] = l + 1 < m.weights.size() ? std::tanh(acc) : acc;
        }
        a = z;
    }
    return {a[0] * m.target_scale(0) + m.target_mean(0), a[1] * m.target_scale(1) + m.target_mean(1)};
}

}  // namespace

TEST_CASE("model shape and validation") {
    NNModel m = NNModel::initialize(10, 1);
    CHECK(m.layer_dims == std::vector<int>{10, 150, 150, 150, 2});
    CHECK(m.parameter_count() == 10 * 150 + 150 + 2 * (150 * 150 + 150) + 150 * 2 + 2);
    CHECK_NOTHROW(m.validate());
    for (const auto& w : m.weights) CHECK(w.cwiseAbs().maxCoeff() <= 1.0 / std::sqrt(static_cast<double>(w.cols())));
    m.layer_dims[2] = 100;
    CHECK_THROWS_AS(m.validate(), PreconditionError);
    CHECK_THROWS_AS(NNModel::initialize(0, 1), PreconditionError);
}

TEST_CASE("zero network predicts the target mean") {
    NNModel m = NNModel::initialize(4, 1);
    m.set_parameters(std::vector<double>(m.parameter_count(), 0.0));
    m.target_mean = {0.12, 0.14};
    m.target_scale = {0.05, 0.01};
    const Eigen::Vector2d p = nn_forward(m, std::vector<double>{1, 2, 3, 4});
    CHECK(p(0) == doctest::Approx(0.12));
    CHECK(p(1) == doctest::Approx(0.14));
    CHECK_THROWS_AS(nn_forward(m, std::vector<double>{1, 2}), PreconditionError);
}

TEST_CASE("hidden activations saturate but stay bounded") {
    const NNModel m = NNModel::initialize(6, 3);
    const std::vector<double> x{1e6, -1e6, 2e6, 0.5e6, -3e6, 1e6};
    for (const auto& h : nn_hidden_activations(m, x)) CHECK(h.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("forward pass matches a per-sample reference") {
    std::mt19937_64 rng(41);
    NNModel m = NNModel::initialize(7, 5);
    for (auto& b : m.biases) b = random_matrix(rng, b.size(), 1) * 0.1;
    m.input.mean = random_matrix(rng, 7, 1);
    m.input.scale = random_matrix(rng, 7, 1).cwiseAbs();
    m.input.scale(3) = 0.0;
    m.target_mean = {0.1, 0.2};
    m.target_scale = {0.3, 0.4};
    const Eigen::MatrixXd x = random_matrix(rng, 6, 7);
    const Eigen::MatrixXd y = nn_forward(m, x);
    for (Eigen::Index i = 0; i < 6; ++i) {
        const Eigen::Vector2d r = reference_forward(m, x.row(i).transpose());
        CHECK(std::abs(y(i, 0) - r(0)) < 1e-12);
        CHECK(std::abs(y(i, 1) - r(1)) < 1e-12);
    }
    // Inputs passed through the standardizer and its inverse give the same prediction.
    const Eigen::MatrixXd round = m.input.invert(m.input.apply(x));
    Eigen::MatrixXd masked = x;
    masked.col(3) = round.col(3);
    CHECK((nn_forward(m, round) - nn_forward(m, masked)).cwiseAbs().maxCoeff() < 1e-12);
    CHECK((nn_forward(m, masked) - y).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("backpropagation matches finite differences") {
    std::mt19937_64 rng(42);
    NNModel m = NNModel::initialize(5, 2);
    for (auto& b : m.biases) b = random_matrix(rng, b.size(), 1) * 0.1;
    const Eigen::MatrixXd x = random_matrix(rng, 8, 5), y = random_matrix(rng, 8, 2);
    const LossGradient lg = nn_loss_and_gradient(m, x, y);
    const auto p = m.parameters();
    std::uniform_int_distribution<std::size_t> pick(0, p.size() - 1);
    NNModel probe = m;
    for (int k = 0; k < 20; ++k) {
        const std::size_t i = pick(rng);
        const double h = 1e-6 * (1.0 + std::abs(p[i]));
        auto q = p;
        q[i] += h;
        probe.set_parameters(q);
        const double up = nn_loss_and_gradient(probe, x, y).loss;
        q[i] = p[i] - h;
        probe.set_parameters(q);
        const double down = nn_loss_and_gradient(probe, x, y).loss;
        const double fd = (up - down) / (2 * h);
        CHECK(std::abs(fd - lg.gradient[i]) / std::max({std::abs(fd), std::abs(lg.gradient[i]), 1e-8}) < 1e-5);
    }
}

TEST_CASE("single sample is memorized") {
    Eigen::MatrixXd x(1, 3), y(1, 2);
    x << 0.3, -1.2, 2.0;
    y << 0.1, 0.14;
    const TrainResult r = nn_train(x, y, TrainConfig{5000, 1e-3, 1, 1e-20});
    CHECK(r.loss_history.back() < 1e-12);
    const Eigen::Vector2d p = nn_forward(r.model, std::vector<double>{0.3, -1.2, 2.0});
    CHECK(p(0) == doctest::Approx(0.1).epsilon(1e-5));
    CHECK(p(1) == doctest::Approx(0.14).epsilon(1e-5));
}

TEST_CASE("linear ground truth generalizes") {
    std::mt19937_64 rng(43);
    Eigen::MatrixXd A(2, 4);
    A << 0.02, -0.01, 0.005, 0.03, 0.004, 0.002, -0.003, 0.001;
    const Eigen::MatrixXd xtr = random_matrix(rng, 60, 4), xte = random_matrix(rng, 10, 4);
    Eigen::MatrixXd ytr = xtr * A.transpose(), yte = xte * A.transpose();
    ytr.rowwise() += Eigen::RowVector2d(0.12, 0.14);
    yte.rowwise() += Eigen::RowVector2d(0.12, 0.14);
    const TrainResult r = nn_train(xtr, ytr, TrainConfig{3000, 1e-3, 7, 1e-10});
    CHECK(r.loss_history.back() < r.loss_history.front());
    const double rx = ytr.col(0).maxCoeff() - ytr.col(0).minCoeff();
    const double ry = ytr.col(1).maxCoeff() - ytr.col(1).minCoeff();
    const EvalReport e = nn_evaluate(r.model, xte, yte, rx, ry);
    CHECK(e.x_error_pct < 2.0);
    CHECK(e.y_error_pct < 2.0);
}

TEST_CASE("training is deterministic") {
    std::mt19937_64 rng(44);
    const Eigen::MatrixXd x = random_matrix(rng, 10, 3), y = random_matrix(rng, 10, 2);
    const TrainConfig c{200, 1e-3, 11, 1e-10};
    const TrainResult a = nn_train(x, y, c), b = nn_train(x, y, c);
    CHECK(a.model.parameters() == b.model.parameters());
    CHECK_THROWS_AS(nn_train(x, y, TrainConfig{0, 1e-3, 1, 0}), PreconditionError);
    CHECK_THROWS_AS(nn_train(x, y, TrainConfig{10, -1.0, 1, 0}), PreconditionError);
}

TEST_CASE("evaluation") {
    std::mt19937_64 rng(45);
    const Eigen::MatrixXd x = random_matrix(rng, 10, 3), y = random_matrix(rng, 10, 2);
    const TrainResult r = nn_train(x, y, TrainConfig{50, 1e-3, 1, 1e-10});
    const Eigen::MatrixXd pred = nn_forward(r.model, x);
    const EvalReport perfect = nn_evaluate(r.model, x, pred, 1.0, 1.0);
    CHECK(perfect.x_error_pct < 1e-12);
    CHECK(perfect.y_error_pct < 1e-12);
    CHECK(perfect.rows.size() == 10);

    Eigen::MatrixXd off = pred;
    off.col(0).array() += 0.01;
    CHECK(nn_evaluate(r.model, x, off, 0.5, 1.0).x_error_pct == doctest::Approx(2.0));
    CHECK_THROWS_AS(nn_evaluate(r.model, x, y, 0.0, 1.0), PreconditionError);
}

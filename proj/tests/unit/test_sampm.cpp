#include <doctest.h>

#include <cmath>
#include <random>

#include "../oracles.hpp"
#include "lambmp/atom.hpp"
#include "lambmp/dispersion.hpp"
#include "lambmp/error.hpp"
#include "lambmp/sampm.hpp"

using namespace lambmp;

namespace {

std::vector<double> vec(const Signal& s) { return {s.samples().begin(), s.samples().end()}; }

Signal echo(const Signal& atom, std::size_t n, std::size_t k, double a) {
    auto v = oracle::shifted(vec(atom), k, n);
    for (double& x : v) x *= a;
    return Signal(v, atom.sample_rate_hz());
}

}  // namespace

TEST_CASE("optimal amplitude") {
    const Signal atom = make_tone_burst(BurstSpec{});
    const std::size_t pad = pursuit_pad_len(512, atom.size());
    const Spectrum A = forward_transform(atom, pad);
    const Signal r = echo(atom, 512, 40, 3.0);
    CHECK(optimal_amplitude(A, forward_transform(r, pad), 40 / 2e6) == doctest::Approx(3.0).epsilon(1e-10));
    CHECK(std::abs(optimal_amplitude(A, forward_transform(r, pad), 300 / 2e6)) < 1e-10);

    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 5; ++trial) {
        const Signal rr(oracle::random_vector(rng, 512), 2e6);
        const std::size_t k = 17 + 60 * static_cast<std::size_t>(trial);
        const double ref = oracle::ls_amplitude(vec(rr), oracle::shifted(vec(atom), k, 512));
        const double got = optimal_amplitude(A, forward_transform(rr, pad), static_cast<double>(k) / 2e6);
        CHECK(oracle::rel_diff(got, ref) < 1e-8);
    }

    const Signal zero = Signal::zeros(101, 2e6);
    CHECK_THROWS_AS(optimal_amplitude(forward_transform(zero, pad), forward_transform(r, pad), 0.0), NumericalError);
}

TEST_CASE("gain function matches direct evaluation") {
    const Signal atom = make_tone_burst(BurstSpec{});
    std::mt19937_64 rng(22);
    const Signal r(oracle::random_vector(rng, 400), 2e6);
    const std::size_t pad = pursuit_pad_len(400, atom.size());
    const DelayGrid grid = DelayGrid::covering(400, atom.size(), 2e6);
    const auto g = gain_function(forward_transform(atom, pad), forward_transform(r, pad), grid);
    REQUIRE(g.size() == grid.count());
    const auto a = vec(atom);
    double energy = 0.0;
    for (double v : a) energy += v * v / 2e6;
    double gmax = 0.0;
    for (const auto& s : g) gmax = std::max(gmax, s.gain);
    for (std::size_t k = 0; k < g.size(); k += 7) {
        const auto ak = oracle::shifted(a, k, 400);
        double c = 0.0;
        for (std::size_t i = 0; i < 400; ++i) c += ak[i] * r[i] / 2e6;
        CHECK(std::abs(g[k].gain - c * c / energy) <= 1e-9 * gmax);
        CHECK(g[k].tau_s == doctest::Approx(static_cast<double>(k) / 2e6));
    }
}

TEST_CASE("gain peak sits at the echo delay") {
    const Signal atom = make_tone_burst(BurstSpec{});
    const DelayGrid grid = DelayGrid::covering(600, atom.size(), 2e6);
    const std::size_t pad = pursuit_pad_len(600, atom.size());
    const Spectrum A = forward_transform(atom, pad);
    for (double sign : {1.0, -1.0}) {
        const auto g = gain_function(A, forward_transform(echo(atom, 600, 123, sign), pad), grid);
        const auto best = std::max_element(g.begin(), g.end(), [](auto& x, auto& y) { return x.gain < y.gain; });
        CHECK(best->tau_s == doctest::Approx(123 / 2e6));
    }
    Signal two = echo(atom, 600, 50, 2.0) + echo(atom, 600, 350, 1.0);
    const auto g = gain_function(A, forward_transform(two, pad), grid);
    const auto best = std::max_element(g.begin(), g.end(), [](auto& x, auto& y) { return x.gain < y.gain; });
    CHECK(best->tau_s == doctest::Approx(50 / 2e6));
}

TEST_CASE("single step") {
    const Signal atom = make_tone_burst(BurstSpec{});
    const DelayGrid grid = DelayGrid::covering(300, atom.size(), 2e6);
    const SampmTerm t = sampm_step(echo(atom, 300, 10, 2.0), atom, grid);
    CHECK(t.tau_s == doctest::Approx(10 / 2e6));
    CHECK(t.alpha == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(sampm_step(Signal::zeros(300, 2e6), atom, grid).alpha == 0.0);
    CHECK_THROWS_AS(sampm_step(Signal::zeros(300, 1e6), atom, grid), PreconditionError);
}

TEST_CASE("step equals exhaustive search") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 10; ++trial) {
        const Signal r(oracle::random_vector(rng, 100 + 10 * static_cast<std::size_t>(trial)), 1.0);
        const Signal atom(oracle::random_vector(rng, 9), 1.0);
        const SampmTerm t = sampm_step(r, atom, DelayGrid::covering(r.size(), atom.size(), 1.0));
        const auto b = oracle::brute_force_step(vec(r), vec(atom), 0, r.size() - atom.size(), 1.0);
        CHECK(static_cast<std::size_t>(std::llround(t.tau_s)) == b.delay);
        CHECK(t.alpha == doctest::Approx(b.alpha).epsilon(1e-9));
    }
}

TEST_CASE("decomposition of exact echoes") {
    const Signal atom = make_tone_burst(BurstSpec{});
    const Signal s = echo(atom, 1024, 30, 1.5) + echo(atom, 1024, 400, -0.8) + echo(atom, 1024, 800, 0.25);
    const auto d = sampm_decompose(s, atom, SampmOptions{50, 0.1, std::nullopt});
    REQUIRE(d.terms.size() == 3);
    CHECK(d.terms[0].tau_s == doctest::Approx(30 / 2e6));
    CHECK(d.terms[1].alpha == doctest::Approx(-0.8).epsilon(1e-10));
    CHECK(d.error_history_pct.back() < 1e-6);
    CHECK(d.stop == StopReason::Tolerance);

    const auto self = sampm_decompose(atom, atom);
    REQUIRE(self.terms.size() == 1);
    CHECK(self.terms[0].tau_s == 0.0);
    CHECK(self.terms[0].alpha == doctest::Approx(1.0));
}

TEST_CASE("decomposition invariants on a plate signal") {
    const Signal atom = make_tone_burst(BurstSpec{});
    const Signal s = propagate(atom, 0.45, PlateModel{}, ModeSet{}, PropagateOptions{1024, A0Form::Mindlin});
    const auto d = sampm_decompose(s, atom, SampmOptions{30, 0.0, std::nullopt});
    CHECK(d.error_history_pct.size() == d.terms.size());
    for (std::size_t i = 1; i < d.error_history_pct.size(); ++i)
        CHECK(d.error_history_pct[i] < d.error_history_pct[i - 1]);

    // Pythagorean update: energy removed by a term equals alpha^2 * atom energy.
    const double ea = norm_time(atom) * norm_time(atom);
    const double es = norm_time(s) * norm_time(s);
    for (std::size_t i = 1; i < d.terms.size(); ++i) {
        const double drop = es * (std::pow(d.error_history_pct[i - 1] / 100, 2) - std::pow(d.error_history_pct[i] / 100, 2));
        CHECK(oracle::rel_diff(drop, d.terms[i].alpha * d.terms[i].alpha * ea) < 1e-8);
    }

    const Signal sum = d.reconstruction() + d.residual;
    double err = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) err = std::max(err, std::abs(sum[i] - s[i]));
    CHECK(err < 1e-12 * norm_time(s) * std::sqrt(2e6));

    CHECK(oracle::rel_diff(100 * norm_time(d.residual) / norm_time(s), d.error_history_pct.back()) < 1e-9);
}

TEST_CASE("decompose options") {
    const Signal atom = make_tone_burst(BurstSpec{});
    const Signal s = echo(atom, 300, 5, 1.0);
    CHECK_THROWS_AS(sampm_decompose(s, atom, SampmOptions{0, 10.0, std::nullopt}), PreconditionError);
    CHECK_THROWS_AS(sampm_decompose(s, atom, SampmOptions{5, 100.0, std::nullopt}), PreconditionError);
    CHECK_THROWS_AS(sampm_decompose(Signal::zeros(300, 1e6), atom), PreconditionError);
    const auto z = sampm_decompose(Signal::zeros(300, 2e6), atom);
    CHECK(z.terms.empty());
    CHECK(z.stop == StopReason::Stagnation);
}

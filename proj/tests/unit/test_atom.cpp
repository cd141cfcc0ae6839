#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "../oracles.hpp"
#include "lambmp/atom.hpp"
#include "lambmp/dispersion.hpp"
#include "lambmp/error.hpp"

using namespace lambmp;

TEST_CASE("tone burst shape") {
    const Signal b = make_tone_burst(BurstSpec{});
    CHECK(b.size() == 101);
    CHECK(b.sample_rate_hz() == 2e6);
    CHECK(std::abs(b[0]) < 1e-15);
    CHECK(std::abs(b[100]) < 1e-12);
    CHECK(b[25] == doctest::Approx(std::sin(2 * std::numbers::pi * 1e5 * 12.5e-6) * std::sin(std::numbers::pi * 0.25)));
}

TEST_CASE("envelope peaks at the burst centre") {
    const Signal b = make_tone_burst(BurstSpec{});
    // Analytic envelope by brute-force discrete Hilbert transform of the padded burst.
    const std::size_t n = 512;
    std::vector<double> x(b.samples().begin(), b.samples().end());
    auto X = oracle::direct_dft(x, n);
    for (std::size_t k = 1; k < n / 2; ++k) X[k] *= 2.0;
    for (std::size_t k = n / 2 + 1; k < n; ++k) X[k] = 0.0;
    std::size_t best = 0;
    double peak = 0.0;
    for (std::size_t t = 0; t < b.size(); ++t) {
        std::complex<double> acc = 0.0;
        for (std::size_t k = 0; k < n; ++k)
            acc += X[k] * std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(k * t) / static_cast<double>(n));
        if (std::abs(acc) / static_cast<double>(n) > peak) {
            peak = std::abs(acc) / static_cast<double>(n);
            best = t;
        }
    }
    CHECK(std::abs(static_cast<double>(best) - 50.0) <= 1.0);
}

TEST_CASE("burst energy scales with amplitude squared") {
    const double e1 = norm_time(make_tone_burst(BurstSpec{100e3, 5, 2e6, 1.0}));
    const double e3 = norm_time(make_tone_burst(BurstSpec{100e3, 5, 2e6, 3.0}));
    CHECK(e1 > 0.0);
    CHECK(oracle::rel_diff(e3 * e3, 9.0 * e1 * e1) < 1e-12);
}

TEST_CASE("spectral peak near the centre frequency") {
    const Signal b = make_tone_burst(BurstSpec{});
    CHECK(std::abs(spectral_peak_hz(b) - 100e3) <= 100e3 / 5);
}

TEST_CASE("burst validation") {
    CHECK_THROWS_AS(make_tone_burst(BurstSpec{1e6, 5, 2e6, 1.0}), PreconditionError);
    CHECK_THROWS_AS(make_tone_burst(BurstSpec{1e5, 0, 2e6, 1.0}), PreconditionError);
}

TEST_CASE("atom round trip through CSV") {
    const auto path = std::filesystem::temp_directory_path() / "lambmp_unit_atom.csv";
    const Signal b = make_tone_burst(BurstSpec{});
    write_signal_csv(path, b);
    CHECK(load_atom(path) == b);
}

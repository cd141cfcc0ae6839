#pragma once

// Synthetic damage database: direct-path and point-scatterer echoes
// synthesized with the analytic plate model, on a rectangular grid of damage
// positions, with a seeded train/test split.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "lambmp/atom.hpp"
#include "lambmp/core.hpp"
#include "lambmp/dispersion.hpp"

namespace lambmp {

struct Point {
    double x_m = 0.0;
    double y_m = 0.0;
};

double distance(const Point& a, const Point& b) noexcept;

struct SensorLayout {
    std::vector<Point> pzt_positions;
    std::size_t actuator_index = 0;
    double plate_width_m = 0.3;
    double plate_height_m = 0.3;

    /// Four PZTs inset 50 mm from the corners plus one at the bottom centre.
    static SensorLayout default_layout();
    bool contains(const Point& p) const noexcept;
    void validate() const;
    std::size_t path_count() const noexcept { return pzt_positions.size() - 1; }
};

struct DamageCase {
    double x_m = 0.0;
    double y_m = 0.0;
    double reflection_coeff = 0.1;
    std::string label;

    Point position() const noexcept { return {x_m, y_m}; }
};

struct PathRecord {
    std::size_t actuator = 0;
    std::size_t sensor = 0;
    Signal baseline;
    Signal damaged;
    Signal residual;
    double snr_db = 0.0;
};

enum class Split { Train, Test };

struct CaseRecord {
    DamageCase damage;
    std::vector<PathRecord> paths;
    Split split = Split::Train;
};

struct DatabaseConfig {
    PlateModel plate{60e9, 0.3, 1554.0, 2.4e-3};
    BurstSpec burst{200e3, 5, 1.0 / 0.3e-6, 1.0};
    SensorLayout layout = SensorLayout::default_layout();
    std::vector<double> damage_x_m{0.050, 0.075, 0.100, 0.125, 0.150, 0.175, 0.200};
    std::vector<double> damage_y_m{0.125, 0.130, 0.135, 0.140, 0.145, 0.150};
    double reflection_coeff = 0.1;
    double snr_db = 150.0;
    bool add_noise = true;
    std::uint64_t seed = 42;
    std::size_t signal_len = 1024;
    std::size_t n_test = 5;
    A0Form a0_form = A0Form::Mindlin;
};

struct Database {
    DatabaseConfig config;
    std::vector<CaseRecord> cases;

    std::vector<std::size_t> indices(Split split) const;
};

Signal gen_baseline(const Point& actuator, const Point& sensor, const PlateModel& plate, const Signal& burst,
                    std::size_t out_len, A0Form form = A0Form::Mindlin);

/// baseline + reflection_coeff * propagate(burst, |actuator - damage| + |damage - sensor|).
Signal gen_damaged(const Point& actuator, const Point& sensor, const DamageCase& damage, const PlateModel& plate,
                   const Signal& burst, std::size_t out_len, A0Form form = A0Form::Mindlin);

/// x + white Gaussian noise whose power is the signal power times 10^(-snr/10).
Signal add_noise(const Signal& x, double snr_db, std::uint64_t seed);

std::string case_label(double x_m, double y_m);

Database gen_database(const DatabaseConfig& config);

/// db/<label>/<actuator>-<sensor>.csv residuals plus db/manifest.json.
void write_database(const Database& db, const std::filesystem::path& dir);

/// Reads a directory written by write_database (residuals only; baselines are
/// not stored and come back as zero signals).
Database read_database(const std::filesystem::path& dir);

}  // namespace lambmp

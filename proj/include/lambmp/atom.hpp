#pragma once

#include <filesystem>

#include "lambmp/core.hpp"

namespace lambmp {

/// Half-sine windowed tone burst.
struct BurstSpec {
    double f0_hz = 100e3;
    int n_cycles = 5;
    double sample_rate_hz = 2e6;
    double amplitude = 1.0;

    double duration_s() const noexcept { return n_cycles / f0_hz; }
    void validate() const;
};

/// amplitude * sin(2 pi f0 t) * sin(pi t / Tb) on [0, Tb], Tb = n_cycles / f0,
/// sampled with ceil(Tb * fs) + 1 samples.
Signal make_tone_burst(const BurstSpec& spec);

/// Reads a user-supplied atom from a signal CSV.
Signal load_atom(const std::filesystem::path& path);

}  // namespace lambmp

#pragma once

#include <cstddef>
#include <vector>

#include "lambmp/core.hpp"

namespace lambmp::detail {

/// A greedy step whose energy reduction falls below this fraction of the
/// current residual energy is treated as stagnation.
inline constexpr double kStagnationRel = 1e-14;

struct DelaySelection {
    std::size_t index;
    double alpha;
    double gain;
};

double atom_energy(const Spectrum& atom_spec);

void check_grid_fits(const DelayGrid& grid, std::size_t atom_len, std::size_t limit, const char* what);

/// Delta-t weighted linear cross-correlation c[k] = sum_n r[n] atom[n - k] dt.
std::vector<double> cross_correlation(const Spectrum& atom_spec, const Spectrum& residual_spec);

/// Scalar-amplitude delay search shared by both pursuits.
DelaySelection select_delay(const Spectrum& atom_spec, const Signal& residual, const DelayGrid& grid);

}  // namespace lambmp::detail

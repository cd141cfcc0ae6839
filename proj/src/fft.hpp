#pragma once

#include <complex>
#include <vector>

namespace lambmp::detail {

/// In-place unnormalized DFT (sign -1) or its inverse scaled by 1/n.
void fft_inplace(std::vector<std::complex<double>>& data, bool inverse);

}  // namespace lambmp::detail

#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

namespace lambmp::detail {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}
}  // namespace

void fft_inplace(std::vector<std::complex<double>>& data, bool inverse) {
    const int n = static_cast<int>(data.size());
    if (n == 0) return;
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_1d(n, buf, buf, inverse ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    if (inverse) {
        const double scale = 1.0 / n;
        for (auto& v : data) v *= scale;
    }
}

}  // namespace lambmp::detail

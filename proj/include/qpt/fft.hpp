// fft.hpp: minimal RAII wrapper over an FFTW forward complex DFT

#pragma once

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

#include <fftw3.h>

namespace qpt::detail {

inline std::mutex& fftw_planner_mutex() {
    static std::mutex m;
    return m;
}

/// X_m = sum_j x_j exp(-2 pi i m j / n). Buffers come from fftw_malloc so the
/// planner sees the same alignment on every call, which keeps results
/// bitwise reproducible.
inline std::vector<std::complex<double>> forward_dft(std::span<const std::complex<double>> input) {
    const std::size_t n = input.size();
    if (n == 0) return {};
    auto* buf = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n));
    if (buf == nullptr) throw std::bad_alloc();
    struct Guard {
        fftw_complex* p;
        fftw_plan plan{nullptr};
        ~Guard() {
            if (plan != nullptr) {
                std::lock_guard lock(fftw_planner_mutex());
                fftw_destroy_plan(plan);
            }
            fftw_free(p);
        }
    } guard{buf};
    {
        std::lock_guard lock(fftw_planner_mutex());
        guard.plan = fftw_plan_dft_1d(static_cast<int>(n), buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    }
    if (guard.plan == nullptr) throw std::runtime_error("FFTW planning failed");
    auto* data = reinterpret_cast<std::complex<double>*>(buf);
    for (std::size_t j = 0; j < n; ++j) data[j] = input[j];
    fftw_execute(guard.plan);
    return {data, data + n};
}

} // namespace qpt::detail

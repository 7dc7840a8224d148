#pragma once

#include <fftw3.h>

#include <map>
#include <mutex>

#include "mrt/core.hpp"

namespace mrt {

// Plans are cached per (size, sign) and created with FFTW_UNALIGNED so they
// can be executed on ordinary vectors via the new-array interface.
namespace detail {

inline std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

inline fftw_plan plan_1d(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cplx> tmp(n);
    fftw_plan p = fftw_plan_dft_1d(n, reinterpret_cast<fftw_complex*>(tmp.data()),
                                   reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[key] = p;
    return p;
}

inline fftw_plan plan_2d(int n, int sign) {
    static std::map<std::pair<int, int>, fftw_plan> cache;
    std::lock_guard<std::mutex> lock(fftw_mutex());
    auto key = std::make_pair(n, sign);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    std::vector<cplx> tmp(static_cast<std::size_t>(n) * n);
    fftw_plan p = fftw_plan_dft_2d(n, n, reinterpret_cast<fftw_complex*>(tmp.data()),
                                   reinterpret_cast<fftw_complex*>(tmp.data()), sign,
                                   FFTW_ESTIMATE | FFTW_UNALIGNED);
    cache[key] = p;
    return p;
}

} // namespace detail

inline void fft_1d(std::vector<cplx>& data, int sign) {
    fftw_plan p = detail::plan_1d(static_cast<int>(data.size()), sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

inline void fft_2d_square(std::vector<cplx>& data, int n, int sign) {
    fftw_plan p = detail::plan_2d(n, sign);
    fftw_execute_dft(p, reinterpret_cast<fftw_complex*>(data.data()),
                     reinterpret_cast<fftw_complex*>(data.data()));
}

// Smallest 5-smooth size >= n (FFTW stays fast on these).
inline int next_fast_size(int n) {
    for (int s = n;; ++s) {
        int r = s;
        for (int f : {2, 3, 5})
            while (r % f == 0) r /= f;
        if (r == 1) return s;
    }
}

} // namespace mrt

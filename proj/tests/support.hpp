#pragma once

#include <random>

#include "mrt/tensor_field.hpp"
#include "mrt/tensor_modes.hpp"

namespace mrt_test {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline double uniform(std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(g);
}

// Random tensor with smooth compactly supported components.
inline mrt::SymmetricTensorField random_tensor(const mrt::DiscGrid& g, int m, std::uint64_t seed) {
    auto r = rng(seed);
    std::vector<mrt::Bump> bumps;
    for (int k = 0; k <= m; ++k)
        bumps.push_back({uniform(r, 0.3, 1.0), uniform(r, -0.15, 0.15), uniform(r, -0.15, 0.15),
                         uniform(r, 0.4, 0.6)});
    return mrt::make_phantom_tensor(g, m, mrt::PhantomKind::polynomial_bump, bumps);
}

// Independent mode oracle: uniform-angle trigonometric quadrature of the
// action, exact for the band-limited integrand.
inline std::vector<mrt::cplx> modes_by_angle_sampling(const mrt::SymmetricTensorField& f,
                                                      std::size_t node, int samples = 64) {
    std::vector<mrt::cplx> out(f.m + 1, mrt::cplx(0, 0));
    for (int s = 0; s < samples; ++s) {
        double theta = 2.0 * mrt::pi * s / samples;
        double c = std::cos(theta), sn = std::sin(theta);
        double act = 0.0;
        for (int k = 0; k <= f.m; ++k)
            act += static_cast<double>(mrt::binomial(f.m, k)) * std::pow(c, f.m - k) *
                   std::pow(sn, k) * f.comp[k][node];
        for (int n = 0; n <= f.m; ++n)
            out[n] += act * std::exp(mrt::cplx(0.0, n * theta)) / static_cast<double>(samples);
    }
    return out;
}

} // namespace mrt_test

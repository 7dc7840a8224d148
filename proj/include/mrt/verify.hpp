#pragma once

#include <random>

#include "mrt/a_analytic.hpp"
#include "mrt/attenuation.hpp"
#include "mrt/reconstruct.hpp"

namespace mrt {

struct VerifyResult {
    std::string name;
    double metric = 0.0;
    double tol = 0.0;
    bool pass = false;
};

// Smooth compactly supported random mode data: low-order polynomials times a
// C^inf bump, mode amplitude decaying geometrically.
inline ModeSequenceField random_smooth_modes(const DiscGrid& g, int N, double support_radius,
                                             std::uint64_t seed, double decay = 0.7) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    ModeSequenceField u = make_interior_modes(g, N);
    double amp = 1.0;
    for (int n = 0; n <= N; ++n) {
        double c[6][2];
        for (auto& row : c)
            for (double& v : row) v = coef(rng);
        for (std::uint32_t id : g.active_nodes) {
            double x = g.x(id % g.n), y = g.y(id / g.n);
            double r = std::hypot(x, y) / support_radius;
            double cut = detail::smooth_cut(r, 0.55);
            if (cut == 0.0) continue;
            double re = c[0][0] + c[1][0] * x + c[2][0] * y + c[3][0] * x * y + c[4][0] * (x * x - y * y) +
                        c[5][0] * (x * x + y * y);
            double im = c[0][1] + c[1][1] * x + c[2][1] * y + c[3][1] * x * y + c[4][1] * (x * x - y * y) +
                        c[5][1] * (x * x + y * y);
            u.mode[n][id] = amp * cut * cplx(re, im);
        }
        amp *= decay;
    }
    return u;
}

inline VerifyResult verify_pompeiu_identity(int grid_n = 129, double tol = 5e-3) {
    DiscGrid g = make_disc_grid(grid_n);
    ModeSequenceField w = make_interior_modes(g, 0);
    for (std::uint32_t id : g.active_nodes) w.mode[0][id] = 1.0;
    ModeSequenceField t = pompeiu_T(w, g);
    double err = 0.0;
    for (std::uint32_t id : g.active_nodes) {
        cplx z = g.z(id % g.n, id / g.n);
        if (std::abs(z) > 0.8) continue;
        err = std::max(err, std::abs(t.mode[0][id] - std::conj(z)));
    }
    return {"pompeiu z-bar identity (grid " + std::to_string(grid_n) + ")", err, tol, err <= tol};
}

inline VerifyResult verify_cauchy_holomorphic(int n_beta = 512, int grid_n = 129,
                                              double tol = 1e-6) {
    DiscGrid g = make_disc_grid(grid_n);
    BoundaryGrid bg = make_boundary_grid(n_beta);
    ModeSequenceField gb = make_boundary_modes(n_beta, 2);
    for (int j = 0; j < n_beta; ++j) gb.mode[0][j] = bg.node[j];
    std::vector<cplx> targets;
    for (std::uint32_t id : g.active_nodes) {
        cplx z = g.z(id % g.n, id / g.n);
        if (std::abs(z) <= 0.8) targets.push_back(z);
    }
    auto vals = bukhgeim_cauchy_at(gb, bg, targets);
    double err = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        err = std::max(err, std::abs(vals[0][t] - targets[t]));
        err = std::max(err, std::abs(vals[1][t]));
        err = std::max(err, std::abs(vals[2][t]));
    }
    return {"cauchy reproduction of <zeta,0,...>", err, tol, err <= tol};
}

// v = <z-bar, 0, -z, 0, ...> satisfies dbar v + L^2 d v = 0; B must reproduce
// it from its boundary trace.
inline VerifyResult verify_cauchy_l2_analytic(int n_beta = 512, int grid_n = 129,
                                              double tol = 1e-4) {
    DiscGrid g = make_disc_grid(grid_n);
    BoundaryGrid bg = make_boundary_grid(n_beta);
    ModeSequenceField gb = make_boundary_modes(n_beta, 4);
    for (int j = 0; j < n_beta; ++j) {
        gb.mode[0][j] = std::conj(bg.node[j]);
        gb.mode[2][j] = -bg.node[j];
    }
    std::vector<cplx> targets;
    for (std::uint32_t id : g.active_nodes) {
        cplx z = g.z(id % g.n, id / g.n);
        if (std::abs(z) <= 0.8) targets.push_back(z);
    }
    auto vals = bukhgeim_cauchy_at(gb, bg, targets);
    double err = 0.0;
    for (std::size_t t = 0; t < targets.size(); ++t) {
        err = std::max(err, std::abs(vals[0][t] - std::conj(targets[t])));
        err = std::max(err, std::abs(vals[1][t]));
        err = std::max(err, std::abs(vals[2][t] + targets[t]));
        err = std::max(err, std::abs(vals[3][t]));
        err = std::max(err, std::abs(vals[4][t]));
    }
    return {"cauchy reproduction of <zbar,0,-z,...>", err, tol, err <= tol};
}

inline VerifyResult verify_eG_inverse(int grid_n = 65, int N = 24, double tol = 1e-8) {
    DiscGrid g = make_disc_grid(grid_n);
    BoundaryGrid bg = make_boundary_grid(64);
    AttenuationMap a = make_attenuation(g, PhantomKind::gaussian_bump, {0.5, 0.05, -0.1, 0.7});
    IntegratingFactor fac = integrating_factor(a, g, bg, N, 512);
    ModeSequenceField u = random_smooth_modes(g, N, 0.9, 42);
    ModeSequenceField round = apply_eG(+1, fac, apply_eG(-1, fac, u));
    double err = 0.0;
    // the truncated convolution pair is exact only away from the tail
    for (int n = 0; n <= N / 2; ++n)
        for (std::uint32_t id : g.active_nodes)
            err = std::max(err, std::abs(round.mode[n][id] - u.mode[n][id]));
    return {"e^G e^-G identity on random sequences", err, tol, err <= tol};
}

inline VerifyResult verify_triangular_roundtrip(int m = 4, double tol = 1e-13) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    FluxTrace tr;
    tr.m = m;
    tr.n_beta = 32;
    tr.n_theta = 48;
    tr.g.assign(m + 1, Field(static_cast<std::size_t>(32) * 48, 0.0));
    for (int j = 0; j < tr.n_beta; ++j) {
        double beta = 2.0 * pi * j / tr.n_beta;
        Vec2 x{std::cos(beta), std::sin(beta)};
        for (int l = 0; l < tr.n_theta; ++l) {
            Vec2 d = dir_vec(2.0 * pi * l / tr.n_theta);
            if (dot(x, d) <= outgoing_eps) continue;
            for (int k = 0; k <= m; ++k) tr.at(k, j, l) = dist(rng);
        }
    }
    FluxTrace back = traces_from_sinogram(sinogram_from_traces(tr));
    double err = 0.0;
    for (int k = 0; k <= m; ++k)
        for (std::size_t i = 0; i < tr.g[k].size(); ++i)
            err = std::max(err, std::abs(back.g[k][i] - tr.g[k][i]));
    return {"trace/moment triangular round trip (m=4)", err, tol, err <= tol};
}

inline std::vector<VerifyResult> run_verify_suite(int grid_n = 129) {
    return {verify_pompeiu_identity(grid_n), verify_cauchy_holomorphic(512, grid_n),
            verify_cauchy_l2_analytic(512, grid_n), verify_eG_inverse(),
            verify_triangular_roundtrip()};
}

} // namespace mrt

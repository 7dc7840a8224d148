#pragma once

#include "mrt/mode_sequence.hpp"

namespace mrt {

// Finite-difference x/y derivatives on the active node set: centered where
// both neighbours are active, one-sided at the rim. Values elsewhere are 0.
template <typename T>
inline void fd_xy(const DiscGrid& g, const std::vector<T>& f, std::vector<T>& dx,
                  std::vector<T>& dy) {
    dx.assign(g.size(), T{});
    dy.assign(g.size(), T{});
    const double inv2h = 0.5 / g.h, invh = 1.0 / g.h;
    for (std::uint32_t id : g.active_nodes) {
        int ix = id % g.n, iy = id / g.n;
        bool xl = ix > 0 && g.qw[id - 1] > 0.0;
        bool xr = ix + 1 < g.n && g.qw[id + 1] > 0.0;
        bool yl = iy > 0 && g.qw[id - g.n] > 0.0;
        bool yr = iy + 1 < g.n && g.qw[id + g.n] > 0.0;
        if (xl && xr) dx[id] = (f[id + 1] - f[id - 1]) * inv2h;
        else if (xr) dx[id] = (f[id + 1] - f[id]) * invh;
        else if (xl) dx[id] = (f[id] - f[id - 1]) * invh;
        if (yl && yr) dy[id] = (f[id + g.n] - f[id - g.n]) * inv2h;
        else if (yr) dy[id] = (f[id + g.n] - f[id]) * invh;
        else if (yl) dy[id] = (f[id] - f[id - g.n]) * invh;
    }
}

// Cauchy-Riemann operators: dbar = (d_x + i d_y)/2, d = (d_x - i d_y)/2.
// Second-order centered stencils; higher-order variants buy nothing here
// because the flux modes only carry C^{m+1} regularity across the support
// tangent band.
inline void cr_derivatives(const DiscGrid& g, const CField& f, CField& dbar, CField& d) {
    CField dx, dy;
    fd_xy(g, f, dx, dy);
    dbar.assign(g.size(), cplx(0, 0));
    d.assign(g.size(), cplx(0, 0));
    const cplx ih(0.0, 0.5);
    for (std::uint32_t id : g.active_nodes) {
        dbar[id] = 0.5 * dx[id] + ih * dy[id];
        d[id] = 0.5 * dx[id] - ih * dy[id];
    }
}

// Residual of the sequence system: (dbar u + L^2 d u)[n] - rhs[n], n = 0..u.N-2.
inline ModeSequenceField beltrami_residual(const DiscGrid& g, const ModeSequenceField& u,
                                           const ModeSequenceField* rhs) {
    ModeSequenceField r = make_interior_modes(g, std::max(0, u.N - 2));
    CField dbar_n, d_n, dbar_n2, d_n2;
    for (int n = 0; n + 2 <= u.N; ++n) {
        cr_derivatives(g, u.mode[n], dbar_n, d_n);
        cr_derivatives(g, u.mode[n + 2], dbar_n2, d_n2);
        for (std::uint32_t id : g.active_nodes) {
            cplx v = dbar_n[id] + d_n2[id];
            if (rhs && n <= rhs->N) v -= rhs->mode[n][id];
            r.mode[n][id] = v;
        }
    }
    return r;
}

} // namespace mrt

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>

#include "mrt/core.hpp"

namespace mrt {

using Field = std::vector<double>;
using CField = std::vector<cplx>;

namespace detail {

inline double circ_antideriv(double x) {
    x = std::clamp(x, -1.0, 1.0);
    return 0.5 * (x * std::sqrt(std::max(0.0, 1.0 - x * x)) + std::asin(x));
}

} // namespace detail

// Exact area of [x0,x1]x[y0,y1] intersected with the unit disc.
inline double disc_cell_area(double x0, double x1, double y0, double y1) {
    x0 = std::max(x0, -1.0);
    x1 = std::min(x1, 1.0);
    if (x0 >= x1 || y0 >= 1.0 || y1 <= -1.0) return 0.0;
    double bp[8];
    int nbp = 0;
    bp[nbp++] = x0;
    bp[nbp++] = x1;
    for (double y : {y0, y1}) {
        if (std::abs(y) < 1.0) {
            double r = std::sqrt(1.0 - y * y);
            if (r > x0 && r < x1) bp[nbp++] = r;
            if (-r > x0 && -r < x1) bp[nbp++] = -r;
        }
    }
    std::sort(bp, bp + nbp);
    double area = 0.0;
    for (int s = 0; s + 1 < nbp; ++s) {
        double a = bp[s], b = bp[s + 1];
        if (b - a <= 0.0) continue;
        double xm = 0.5 * (a + b);
        double c = std::sqrt(std::max(0.0, 1.0 - xm * xm));
        bool top_flat = y1 <= c;   // top = y1, else top = c
        bool bot_flat = y0 >= -c;  // bottom = y0, else bottom = -c
        double top_m = top_flat ? y1 : c;
        double bot_m = bot_flat ? y0 : -c;
        if (top_m <= bot_m) continue;
        double ic = detail::circ_antideriv(b) - detail::circ_antideriv(a);
        double val = 0.0;
        if (top_flat && bot_flat) val = (y1 - y0) * (b - a);
        else if (!top_flat && bot_flat) val = ic - y0 * (b - a);
        else if (top_flat && !bot_flat) val = y1 * (b - a) + ic;
        else val = 2.0 * ic;
        area += val;
    }
    return area;
}

// Uniform Cartesian grid on [-1,1]^2 with a circular mask.
// Quadrature weights are exact cell/disc intersection areas; nodes with
// positive weight form the "active" set, a one-cell rim wider than the mask.
struct DiscGrid {
    int n = 0;            // nodes per axis
    double h = 0.0;       // spacing 2/(n-1)
    std::vector<double> coord;        // node coordinate per axis index
    std::vector<std::uint8_t> inside; // |z| < 1
    std::vector<double> qw;           // cell-area quadrature weight
    std::vector<std::uint32_t> active_nodes;
    std::vector<std::uint16_t> depth; // 4-neighbor erosion depth of active set

    int idx(int ix, int iy) const { return iy * n + ix; }
    double x(int ix) const { return coord[ix]; }
    double y(int iy) const { return coord[iy]; }
    cplx z(int ix, int iy) const { return {coord[ix], coord[iy]}; }
    std::size_t size() const { return static_cast<std::size_t>(n) * n; }
    bool is_inside(int ix, int iy) const { return inside[idx(ix, iy)] != 0; }
    bool is_active(int ix, int iy) const { return qw[idx(ix, iy)] > 0.0; }
};

inline DiscGrid make_disc_grid(int n) {
    if (n < 16) throw ConfigError("make_disc_grid: n must be >= 16, got " + std::to_string(n));
    DiscGrid g;
    g.n = n;
    g.h = 2.0 / (n - 1);
    g.coord.resize(n);
    for (int i = 0; i < n; ++i) g.coord[i] = -1.0 + i * g.h;
    g.inside.assign(g.size(), 0);
    g.qw.assign(g.size(), 0.0);
    const double hh = 0.5 * g.h;
    for (int iy = 0; iy < n; ++iy) {
        double yv = g.coord[iy];
        for (int ix = 0; ix < n; ++ix) {
            double xv = g.coord[ix];
            int id = g.idx(ix, iy);
            g.inside[id] = (xv * xv + yv * yv < 1.0) ? 1 : 0;
            if (xv * xv + yv * yv < (1.0 + 2.0 * g.h) * (1.0 + 2.0 * g.h))
                g.qw[id] = disc_cell_area(xv - hh, xv + hh, yv - hh, yv + hh);
            if (g.qw[id] > 0.0) g.active_nodes.push_back(static_cast<std::uint32_t>(id));
        }
    }
    // Two-pass chamfer transform: depth 1 at the active rim, growing inward.
    g.depth.assign(g.size(), 0);
    auto act = [&](int ix, int iy) {
        return ix >= 0 && iy >= 0 && ix < n && iy < n && g.qw[g.idx(ix, iy)] > 0.0;
    };
    const std::uint16_t big = 60000;
    for (int iy = 0; iy < n; ++iy)
        for (int ix = 0; ix < n; ++ix) {
            int id = g.idx(ix, iy);
            if (!act(ix, iy)) { g.depth[id] = 0; continue; }
            std::uint16_t d = big;
            if (!act(ix - 1, iy) || !act(ix, iy - 1) || !act(ix + 1, iy) || !act(ix, iy + 1))
                d = 1;
            else
                d = static_cast<std::uint16_t>(std::min<int>({big, g.depth[g.idx(ix - 1, iy)] + 1,
                                                              g.depth[g.idx(ix, iy - 1)] + 1}));
            g.depth[id] = d;
        }
    for (int iy = n - 1; iy >= 0; --iy)
        for (int ix = n - 1; ix >= 0; --ix) {
            int id = g.idx(ix, iy);
            if (!g.depth[id]) continue;
            int d = g.depth[id];
            if (ix + 1 < n && act(ix + 1, iy)) d = std::min<int>(d, g.depth[g.idx(ix + 1, iy)] + 1);
            if (iy + 1 < n && act(ix, iy + 1)) d = std::min<int>(d, g.depth[g.idx(ix, iy + 1)] + 1);
            g.depth[id] = static_cast<std::uint16_t>(d);
        }
    return g;
}

// Boundary nodes e^{i beta_j}, beta_j = 2 pi j / n_beta.
struct BoundaryGrid {
    int n_beta = 0;
    std::vector<double> beta;
    std::vector<cplx> node;

    double dbeta() const { return 2.0 * pi / n_beta; }
};

inline BoundaryGrid make_boundary_grid(int n_beta) {
    if (n_beta < 8) throw ConfigError("make_boundary_grid: n_beta must be >= 8");
    BoundaryGrid b;
    b.n_beta = n_beta;
    b.beta.resize(n_beta);
    b.node.resize(n_beta);
    for (int j = 0; j < n_beta; ++j) {
        b.beta[j] = 2.0 * pi * j / n_beta;
        b.node[j] = {std::cos(b.beta[j]), std::sin(b.beta[j])};
    }
    return b;
}

struct Vec2 {
    double x = 0.0, y = 0.0;
};

inline Vec2 dir_vec(double theta) { return {std::cos(theta), std::sin(theta)}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }

// Parameter interval {t : |p + t d| <= 1}; degenerate (s,s) when the line
// misses or touches the disc.
inline std::pair<double, double> ray_disc_interval(Vec2 p, Vec2 d) {
    double b = dot(p, d);
    double c = p.x * p.x + p.y * p.y - 1.0;
    double disc = b * b - c;
    if (disc <= 0.0) return {-b, -b};
    double r = std::sqrt(disc);
    return {-b - r, -b + r};
}

// Chord interval for a boundary source point |x| = 1.
inline std::pair<double, double> line_disc_chord(Vec2 x, Vec2 theta) {
    double t0 = 0.0;
    double t1 = -2.0 * dot(x, theta);
    if (t1 < t0) std::swap(t0, t1);
    return {t0, t1};
}

// Bilinear sample of a node field; zero outside the [-1,1]^2 square.
inline double bilinear(const DiscGrid& g, const Field& f, double px, double py) {
    double u = (px + 1.0) / g.h;
    double v = (py + 1.0) / g.h;
    int i0 = static_cast<int>(std::floor(u));
    int j0 = static_cast<int>(std::floor(v));
    if (i0 < -1 || j0 < -1 || i0 > g.n - 1 || j0 > g.n - 1) return 0.0;
    double fu = u - i0;
    double fv = v - j0;
    auto at = [&](int i, int j) -> double {
        if (i < 0 || j < 0 || i >= g.n || j >= g.n) return 0.0;
        return f[g.idx(i, j)];
    };
    return (1 - fu) * (1 - fv) * at(i0, j0) + fu * (1 - fv) * at(i0 + 1, j0) +
           (1 - fu) * fv * at(i0, j0 + 1) + fu * fv * at(i0 + 1, j0 + 1);
}

} // namespace mrt

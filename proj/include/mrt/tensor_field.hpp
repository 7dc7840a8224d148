#pragma once

#include <cmath>
#include <string>

#include "mrt/grid.hpp"

namespace mrt {

// Symmetric m-tensor on the grid, stored as the m+1 packed components
// f_[k] = f_{1..1 2..2} (k = number of 2-indices).
struct SymmetricTensorField {
    int m = 0;
    std::vector<Field> comp; // m+1 fields, grid layout

    const Field& operator[](int k) const { return comp[k]; }
    Field& operator[](int k) { return comp[k]; }
};

struct AttenuationMap {
    Field a; // >= 0, zero outside the disc
};

enum class PhantomKind { zero, polynomial_bump, gaussian_bump };

inline PhantomKind phantom_kind_from_string(const std::string& s) {
    if (s == "zero") return PhantomKind::zero;
    if (s == "polynomial-bump") return PhantomKind::polynomial_bump;
    if (s == "gaussian-bump") return PhantomKind::gaussian_bump;
    throw ConfigError("unknown phantom kind: " + s);
}

// One radial bump: scale * profile(|z - c| / radius).
struct Bump {
    double scale = 1.0;
    double cx = 0.0, cy = 0.0;
    double radius = 0.5;
};

namespace detail {

// C^inf cutoff: 1 for t <= a, 0 for t >= 1.
inline double smooth_cut(double t, double a = 0.7) {
    if (t <= a) return 1.0;
    if (t >= 1.0) return 0.0;
    auto s = [](double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; };
    double num = s((1.0 - t) / (1.0 - a));
    return num / (num + s((t - a) / (1.0 - a)));
}

inline double bump_value(PhantomKind kind, const Bump& b, int m, double x, double y) {
    double dx = x - b.cx, dy = y - b.cy;
    double r2 = (dx * dx + dy * dy) / (b.radius * b.radius);
    switch (kind) {
        case PhantomKind::zero:
            return 0.0;
        case PhantomKind::polynomial_bump: {
            if (r2 >= 1.0) return 0.0;
            return b.scale * std::pow(1.0 - r2, m + 2);
        }
        case PhantomKind::gaussian_bump: {
            double t = std::sqrt(r2);
            if (t >= 1.0) return 0.0;
            // sigma tied to the truncation radius so the cut acts far in the tail
            double sig = b.radius / 3.0;
            double g = std::exp(-(dx * dx + dy * dy) / (2.0 * sig * sig));
            return b.scale * g * smooth_cut(t);
        }
    }
    return 0.0;
}

inline void check_margin(const Bump& b, double margin) {
    double reach = std::hypot(b.cx, b.cy) + b.radius;
    if (reach > 1.0 - margin + 1e-12)
        throw ConfigError("phantom support reaches |z| = " + std::to_string(reach) +
                          ", must stay inside |z| <= " + std::to_string(1.0 - margin));
}

} // namespace detail

inline constexpr double phantom_support_margin = 0.05;

// Components cycle through the given bump list; an empty list selects a
// default mildly asymmetric family.
inline SymmetricTensorField make_phantom_tensor(const DiscGrid& g, int m, PhantomKind kind,
                                                std::vector<Bump> bumps = {}) {
    if (m < 1) throw ConfigError("tensor order m must be >= 1");
    if (bumps.empty()) {
        for (int k = 0; k <= m; ++k)
            bumps.push_back({1.0 / (1.0 + 0.5 * k), 0.12 * ((k % 3) - 1), -0.1 + 0.08 * (k % 2), 0.6});
    }
    if (kind != PhantomKind::zero)
        for (const Bump& b : bumps) detail::check_margin(b, phantom_support_margin);

    SymmetricTensorField f;
    f.m = m;
    f.comp.assign(m + 1, Field(g.size(), 0.0));
    for (int k = 0; k <= m; ++k) {
        const Bump& b = bumps[k % bumps.size()];
        for (int iy = 0; iy < g.n; ++iy)
            for (int ix = 0; ix < g.n; ++ix)
                f.comp[k][g.idx(ix, iy)] = detail::bump_value(kind, b, m, g.x(ix), g.y(iy));
    }
    return f;
}

inline AttenuationMap make_attenuation(const DiscGrid& g, PhantomKind kind, const Bump& b) {
    if (kind != PhantomKind::zero) {
        detail::check_margin(b, phantom_support_margin);
        if (b.scale < 0.0) throw ConfigError("attenuation must be non-negative");
    }
    AttenuationMap am;
    am.a.assign(g.size(), 0.0);
    for (int iy = 0; iy < g.n; ++iy)
        for (int ix = 0; ix < g.n; ++ix)
            am.a[g.idx(ix, iy)] = detail::bump_value(kind, b, 2, g.x(ix), g.y(iy));
    return am;
}

inline AttenuationMap zero_attenuation(const DiscGrid& g) {
    AttenuationMap am;
    am.a.assign(g.size(), 0.0);
    return am;
}

} // namespace mrt

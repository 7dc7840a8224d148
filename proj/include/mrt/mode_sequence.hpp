#pragma once

#include <cmath>

#include "mrt/grid.hpp"

namespace mrt {

// Truncated sequence of non-positive angular Fourier modes: plane n holds
// u_{-n}(z) for n = 0..N, over the disc grid or the boundary circle.
struct ModeSequenceField {
    bool on_boundary = false;
    int N = 0;
    std::size_t nodes = 0;
    std::vector<CField> mode; // N+1 planes of `nodes` values

    CField& operator[](int n) { return mode[n]; }
    const CField& operator[](int n) const { return mode[n]; }
    int mode_count() const { return N + 1; }
};

inline ModeSequenceField make_interior_modes(const DiscGrid& g, int N) {
    ModeSequenceField u;
    u.on_boundary = false;
    u.N = N;
    u.nodes = g.size();
    u.mode.assign(N + 1, CField(u.nodes, cplx(0.0, 0.0)));
    return u;
}

inline ModeSequenceField make_boundary_modes(int n_beta, int N) {
    ModeSequenceField u;
    u.on_boundary = true;
    u.N = N;
    u.nodes = static_cast<std::size_t>(n_beta);
    u.mode.assign(N + 1, CField(u.nodes, cplx(0.0, 0.0)));
    return u;
}

// L^s u: drop the first s planes, truncation shrinks by s. No padding.
inline ModeSequenceField left_shift(const ModeSequenceField& u, int s) {
    if (s < 0 || s > u.N) throw std::out_of_range("left_shift: shift " + std::to_string(s) +
                                                  " outside [0, " + std::to_string(u.N) + "]");
    ModeSequenceField out;
    out.on_boundary = u.on_boundary;
    out.N = u.N - s;
    out.nodes = u.nodes;
    out.mode.assign(u.mode.begin() + s, u.mode.end());
    return out;
}

inline double max_abs(const ModeSequenceField& u) {
    double m = 0.0;
    for (const auto& plane : u.mode)
        for (const cplx& v : plane) m = std::max(m, std::abs(v));
    return m;
}

inline double plane_max_abs(const ModeSequenceField& u, int n) {
    double m = 0.0;
    for (const cplx& v : u.mode[n]) m = std::max(m, std::abs(v));
    return m;
}

// |u_{-N}|_inf / max_n |u_{-n}|_inf; logged as a truncation-quality diagnostic.
inline double tail_ratio(const ModeSequenceField& u) {
    double peak = max_abs(u);
    if (peak == 0.0) return 0.0;
    return plane_max_abs(u, u.N) / peak;
}

inline void axpy(ModeSequenceField& y, cplx a, const ModeSequenceField& x) {
    int nm = std::min(y.N, x.N);
    for (int n = 0; n <= nm; ++n)
        for (std::size_t i = 0; i < y.nodes; ++i) y.mode[n][i] += a * x.mode[n][i];
}

} // namespace mrt

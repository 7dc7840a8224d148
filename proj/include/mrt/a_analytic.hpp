#pragma once

#include "mrt/angular.hpp"
#include "mrt/fft.hpp"
#include "mrt/mode_sequence.hpp"
#include "mrt/parallel.hpp"

namespace mrt {

struct BOpStats {
    std::size_t extrapolated_targets = 0; // targets inside the standoff annulus
};

// Default standoff from the boundary: two boundary-node spacings.
inline double default_standoff(const BoundaryGrid& bg) { return 2.0 * bg.dbeta(); }

namespace detail {

// Accumulate the Bukhgeim-Cauchy trapezoid sum for one interior target.
// For each boundary node, the mode series sum_{j>=1} g_{-n-2j} r^j is folded
// by the descending recursion s_n = g_n + r s_{n+2}, so all output modes cost
// O(N) per (target, boundary node) pair.
inline void bc_accumulate(const ModeSequenceField& g, const BoundaryGrid& bg, cplx z, cplx* out) {
    const int N = g.N;
    const double c = bg.dbeta() / (2.0 * pi);
    thread_local std::vector<cplx> s;
    s.assign(N + 3, cplx(0, 0));
    for (int n = 0; n <= N; ++n) out[n] = cplx(0, 0);
    for (int b = 0; b < bg.n_beta; ++b) {
        cplx zeta = bg.node[b];
        cplx dz = zeta - z;
        cplx q = zeta / dz;
        cplx r = std::conj(dz) / dz;
        double k2 = 2.0 * q.real();
        cplx k1m = std::conj(q); // K1 - K2 = -conj(q) (times c)
        for (int n = N; n >= 0; --n) {
            cplx gn = g.mode[n][b];
            s[n] = gn + r * s[n + 2];
            out[n] += c * (k2 * s[n] - k1m * gn);
        }
    }
}

} // namespace detail

// Bukhgeim-Cauchy integral of boundary mode data at arbitrary interior targets.
inline std::vector<CField> bukhgeim_cauchy_at(const ModeSequenceField& g, const BoundaryGrid& bg,
                                              const std::vector<cplx>& targets) {
    if (!g.on_boundary || g.nodes != static_cast<std::size_t>(bg.n_beta))
        throw DataError("bukhgeim_cauchy: boundary data does not match the boundary grid");
    std::vector<CField> out(g.N + 1, CField(targets.size(), cplx(0, 0)));
    parallel_for(targets.size(), [&](std::size_t t) {
        std::vector<cplx> acc(g.N + 1);
        detail::bc_accumulate(g, bg, targets[t], acc.data());
        for (int n = 0; n <= g.N; ++n) out[n][t] = acc[n];
    });
    return out;
}

// B on the whole grid. Inside the standoff annulus the trapezoid rule loses
// accuracy against the near-singular Cauchy kernel, so values there come
// from a radial Hermite fill anchored at the evaluation and radial slope at
// |z| = 1 - standoff and at the known boundary trace on |z| = 1.
inline ModeSequenceField bukhgeim_cauchy(const ModeSequenceField& g, const BoundaryGrid& bg,
                                         const DiscGrid& grid, double standoff = -1.0,
                                         BOpStats* stats = nullptr) {
    if (standoff < 0.0) standoff = default_standoff(bg);
    const double r_cut = 1.0 - standoff;
    ModeSequenceField out = make_interior_modes(grid, g.N);
    std::size_t extrapolated = 0;
    for (std::uint32_t id : grid.active_nodes) {
        int ix = id % grid.n;
        if (std::abs(grid.z(ix, id / grid.n)) > r_cut) ++extrapolated;
    }
    const double dr = 1.5 * grid.h; // slope probe offset at the seam
    parallel_for(grid.active_nodes.size(), [&](std::size_t t) {
        std::uint32_t id = grid.active_nodes[t];
        cplx z = grid.z(id % grid.n, id / grid.n);
        double r = std::abs(z);
        if (r <= r_cut) {
            std::vector<cplx> acc(g.N + 1);
            detail::bc_accumulate(g, bg, z, acc.data());
            for (int n = 0; n <= g.N; ++n) out.mode[n][id] = acc[n];
            return;
        }
        cplx dir = z / r;
        std::vector<cplx> acc(g.N + 1), acc_in(g.N + 1);
        detail::bc_accumulate(g, bg, dir * r_cut, acc.data());
        detail::bc_accumulate(g, bg, dir * (r_cut - dr), acc_in.data());
        double fb = std::arg(z) / bg.dbeta();
        int b0 = static_cast<int>(std::floor(fb));
        double fr = fb - b0;
        b0 = ((b0 % bg.n_beta) + bg.n_beta) % bg.n_beta;
        int b1 = (b0 + 1) % bg.n_beta;
        double s = std::min(1.0, (r - r_cut) / standoff);
        for (int n = 0; n <= g.N; ++n) {
            cplx trace = (1.0 - fr) * g.mode[n][b0] + fr * g.mode[n][b1];
            cplx slope = (acc[n] - acc_in[n]) / dr * standoff; // d/ds at the seam
            cplx curv = trace - acc[n] - slope;
            out.mode[n][id] = acc[n] + slope * s + curv * s * s;
        }
    });
    if (stats) stats->extrapolated_targets = extrapolated;
    return out;
}

// Direct masked-grid quadrature of the Pompeiu operator at arbitrary targets.
// The cell containing the target contributes zero: the kernel's exact average
// over any centrally symmetric neighbourhood vanishes.
inline std::vector<CField> pompeiu_T_at(const ModeSequenceField& w, const DiscGrid& g,
                                        const std::vector<cplx>& targets) {
    if (w.on_boundary) throw DataError("pompeiu_T expects interior data");
    std::vector<CField> out(w.N + 1, CField(targets.size(), cplx(0, 0)));
    parallel_for(targets.size(), [&](std::size_t t) {
        cplx z = targets[t];
        std::vector<cplx> acc(w.N + 1, cplx(0, 0));
        std::vector<cplx> s(w.N + 3, cplx(0, 0));
        for (std::uint32_t id : g.active_nodes) {
            cplx zeta = g.z(id % g.n, id / g.n);
            cplx dz = zeta - z;
            double d2 = std::norm(dz);
            if (d2 < 0.25 * g.h * g.h) continue; // singular cell rule
            cplx r = std::conj(dz) / dz;
            cplx f = (-g.qw[id] / pi) * (std::conj(dz) / d2); // qw/( zeta - z )
            for (int n = w.N; n >= 0; --n) {
                s[n] = w.mode[n][id] + r * s[n + 2];
                acc[n] += f * s[n];
            }
        }
        for (int n = 0; n <= w.N; ++n) out[n][t] = acc[n];
    });
    return out;
}

namespace detail {

// Grid-to-grid Pompeiu application as a lattice correlation, evaluated with
// padded FFTs. Identical sum to pompeiu_T_at on grid targets, up to rounding.
inline ModeSequenceField pompeiu_fft(const ModeSequenceField& w, const DiscGrid& g) {
    const int n = g.n;
    const int P = next_fast_size(2 * n - 1);
    const std::size_t PP = static_cast<std::size_t>(P) * P;
    const int N = w.N;

    // forward transforms of the weighted source planes
    std::vector<std::vector<cplx>> What(N + 1);
    std::vector<double> plane_scale(N + 1, 0.0);
    for (int p = 0; p <= N; ++p) {
        for (const cplx& v : w.mode[p]) plane_scale[p] = std::max(plane_scale[p], std::abs(v));
        if (plane_scale[p] == 0.0) continue;
        What[p].assign(PP, cplx(0, 0));
        for (std::uint32_t id : g.active_nodes) {
            int ix = id % n, iy = id / n;
            What[p][static_cast<std::size_t>(iy) * P + ix] = w.mode[p][id] * g.qw[id];
        }
        fft_2d_square(What[p], P, FFTW_FORWARD);
    }

    std::vector<std::vector<cplx>> Yhat(N + 1);
    for (int q = 0; q <= N; ++q) Yhat[q].assign(PP, cplx(0, 0));

    // kernel tables K~_j(d) = K_j(-d h) stored at wrapped offsets; K_j(u) =
    // conj(u)^j / u^{j+1} with K_j(0) = 0, advanced by the ratio conj(u)/u.
    std::vector<cplx> phys(PP, cplx(0, 0)), ratio(PP, cplx(0, 0)), spec(PP);
    for (int dy = -(n - 1); dy <= n - 1; ++dy) {
        for (int dx = -(n - 1); dx <= n - 1; ++dx) {
            std::size_t pos = static_cast<std::size_t>((dy + P) % P) * P + (dx + P) % P;
            if (dx == 0 && dy == 0) continue;
            cplx u(-dx * g.h, -dy * g.h); // reflected offset
            phys[pos] = 1.0 / u;
            ratio[pos] = std::conj(u) / u;
        }
    }
    const int jmax = N / 2;
    for (int j = 0; j <= jmax; ++j) {
        if (j > 0)
            for (std::size_t i = 0; i < PP; ++i) phys[i] *= ratio[i];
        bool used = false;
        for (int q = 0; q + 2 * j <= N; ++q)
            if (plane_scale[q + 2 * j] != 0.0) used = true;
        if (!used) continue;
        spec = phys;
        fft_2d_square(spec, P, FFTW_FORWARD);
        for (int q = 0; q + 2 * j <= N; ++q) {
            int p = q + 2 * j;
            if (plane_scale[p] == 0.0) continue;
            const std::vector<cplx>& Wp = What[p];
            std::vector<cplx>& Yq = Yhat[q];
            for (std::size_t i = 0; i < PP; ++i) Yq[i] += spec[i] * Wp[i];
        }
    }

    ModeSequenceField out = make_interior_modes(g, N);
    const double scale = -1.0 / (pi * PP);
    for (int q = 0; q <= N; ++q) {
        fft_2d_square(Yhat[q], P, FFTW_BACKWARD);
        for (std::uint32_t id : g.active_nodes) {
            int ix = id % n, iy = id / n;
            out.mode[q][id] = scale * Yhat[q][static_cast<std::size_t>(iy) * P + ix];
        }
        Yhat[q].clear();
        Yhat[q].shrink_to_fit();
    }
    return out;
}

} // namespace detail

// Pompeiu operator on the whole grid; the FFT path is used for large grids.
inline ModeSequenceField pompeiu_T(const ModeSequenceField& w, const DiscGrid& g,
                                   bool force_direct = false) {
    if (w.on_boundary) throw DataError("pompeiu_T expects interior data");
    if (!force_direct && g.n >= 48) return detail::pompeiu_fft(w, g);
    std::vector<cplx> targets;
    targets.reserve(g.active_nodes.size());
    for (std::uint32_t id : g.active_nodes) targets.push_back(g.z(id % g.n, id / g.n));
    std::vector<CField> vals = pompeiu_T_at(w, g, targets);
    ModeSequenceField out = make_interior_modes(g, w.N);
    for (int nmode = 0; nmode <= w.N; ++nmode)
        for (std::size_t t = 0; t < targets.size(); ++t)
            out.mode[nmode][g.active_nodes[t]] = vals[nmode][t];
    return out;
}

// Bukhgeim-Pompeiu solve: v = B g + T w satisfies dbar v + L^2 d v = w with
// v|Gamma ~ g. Truncation is the shorter of the two parts.
inline ModeSequenceField solve_inhomogeneous(const ModeSequenceField& g_boundary,
                                             const ModeSequenceField& w, const BoundaryGrid& bg,
                                             const DiscGrid& grid, double standoff = -1.0,
                                             BOpStats* stats = nullptr) {
    ModeSequenceField bpart = bukhgeim_cauchy(g_boundary, bg, grid, standoff, stats);
    ModeSequenceField tpart = pompeiu_T(w, grid);
    int N = std::min(bpart.N, tpart.N);
    ModeSequenceField out = make_interior_modes(grid, N);
    for (int n = 0; n <= N; ++n)
        for (std::size_t i = 0; i < out.nodes; ++i)
            out.mode[n][i] = bpart.mode[n][i] + tpart.mode[n][i];
    return out;
}

} // namespace mrt

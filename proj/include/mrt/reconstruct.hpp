#pragma once

#include <chrono>
#include <optional>

#include "mrt/a_analytic.hpp"
#include "mrt/attenuation.hpp"
#include "mrt/diffops.hpp"
#include "mrt/norms.hpp"

namespace mrt {

// Sweep-down state: level k holds the shifted sequence L^{m-k} v^k.
struct SweepState {
    int m = 0;
    std::vector<ModeSequenceField> shifted;
    std::vector<double> level_sup;  // per-level sup norm diagnostics
    std::vector<double> level_tail; // per-level truncation tail ratios
    BOpStats bstats;
};

struct ReconstructionReport {
    SymmetricTensorField tensor;
    double rel_l2_error = -1.0; // against ground truth when available
    double error_radius = 0.85;
    double stability_ratio = 0.0;
    bool stability_anomaly = false; // nonzero field against zero data norms
    double off_parity_residual = 0.0;
    double f0_imag_residual = 0.0;
    std::vector<double> level_sup, level_tail;
    std::size_t standoff_extrapolated = 0;
    double l11_alpha = 0.0, l11_beta = 0.0, neg_mode_residual = 0.0;
    double seconds_total = 0.0;
};

// Sinogram -> boundary mode data for the sweep. For attenuated data the
// traces are converted with e^{-G} on the boundary nodes.
inline BoundaryTrace preprocess(const MomentaSinogram& sino, const IntegratingFactor* fac, int N) {
    FluxTrace tr = traces_from_sinogram(sino);
    BoundaryTrace bt = angular_modes(tr, N);
    if (fac)
        for (int k = 0; k <= bt.m; ++k) bt.g[k] = apply_eG(-1, *fac, bt.g[k]);
    return bt;
}

// Step I: level by level from k = 0 to m, recover L^{m-k} v^k. Level 0 is the
// homogeneous Bukhgeim-Cauchy solve of the m-shifted data; each next level
// feeds the previous one through the Pompeiu operator:
//   L^{m-k} v^k = B [L^{m-k} g^k] + T [L^{m-k+1} v^{k-1}].
// The smooth boundary data is trigonometrically upsampled first, which
// narrows the Cauchy-kernel standoff annulus accordingly.
inline SweepState sweep_down(const BoundaryTrace& bt, const BoundaryGrid& bg, const DiscGrid& grid,
                             int m, double standoff = -1.0, int boundary_oversample = 2) {
    SweepState st;
    st.m = m;
    st.shifted.resize(m + 1);
    BoundaryGrid bg_f = boundary_oversample > 1
                            ? make_boundary_grid(bg.n_beta * boundary_oversample)
                            : bg;
    for (int k = 0; k <= m; ++k) {
        ModeSequenceField bdata =
            trig_upsample_boundary(left_shift(bt.g[k], m - k), boundary_oversample);
        BOpStats stats;
        ModeSequenceField bpart = bukhgeim_cauchy(bdata, bg_f, grid, standoff, &stats);
        if (k == 0) {
            st.shifted[k] = std::move(bpart);
            st.bstats = stats;
        } else {
            // the Pompeiu part of modes beyond the previous level's truncation
            // is zero (tail treated as zero), so the sum keeps B's truncation
            ModeSequenceField tpart = pompeiu_T(st.shifted[k - 1], grid);
            ModeSequenceField sum = std::move(bpart);
            for (int n = 0; n <= std::min(sum.N, tpart.N); ++n)
                for (std::size_t i = 0; i < sum.nodes; ++i)
                    sum.mode[n][i] += tpart.mode[n][i];
            st.shifted[k] = std::move(sum);
        }
        st.level_sup.push_back(max_abs(st.shifted[k]));
        st.level_tail.push_back(tail_ratio(st.shifted[k]));
    }
    return st;
}

namespace detail {

// One sweep-up level: from the full flux sequence at level k produce level
// k-1. Positions >= 1 come from the componentwise transport system,
//   u^{k-1}_{-(p)} = dbar u^k_{-(p-1)} + d u^k_{-(p+1)} + a u^k_{-p},
// position 0 from the angular mode-0 equation and the reality of the flux,
//   u^{k-1}_0 = 2 Re[d u^k_{-1}] + a u^k_0.
inline ModeSequenceField sweep_up_level(const DiscGrid& g, const ModeSequenceField& cur,
                                        const Field* a) {
    ModeSequenceField next = make_interior_modes(g, cur.N - 1);
    CField dbar_p, d_p;
    for (int j = 0; j <= cur.N; ++j) {
        cr_derivatives(g, cur.mode[j], dbar_p, d_p);
        if (j + 1 <= next.N)
            for (std::uint32_t id : g.active_nodes) next.mode[j + 1][id] += dbar_p[id];
        if (j == 1)
            for (std::uint32_t id : g.active_nodes) next.mode[0][id] += 2.0 * d_p[id].real();
        else if (j >= 2 && j - 1 <= next.N)
            for (std::uint32_t id : g.active_nodes) next.mode[j - 1][id] += d_p[id];
    }
    if (a)
        for (int p = 0; p <= next.N && p <= cur.N; ++p)
            for (std::uint32_t id : g.active_nodes) next.mode[p][id] += (*a)[id] * cur.mode[p][id];
    return next;
}

} // namespace detail

// Step II: from v^m down to the zero level. In the attenuated case the state
// is converted once with e^{+G} at level m and the recursion then runs on the
// real flux sequences u^k, absorbing the attenuation term exactly.
inline ModeSequenceField sweep_up(const SweepState& st, const DiscGrid& g,
                                  const Field* a = nullptr,
                                  const IntegratingFactor* fac = nullptr) {
    if (st.shifted[st.m].N < st.m + 1)
        throw ConfigError("sweep_up: truncation too small for m sweep levels");
    ModeSequenceField cur = st.shifted[st.m];
    if (fac) cur = apply_eG(+1, *fac, cur);
    for (int k = st.m; k >= 1; --k) cur = detail::sweep_up_level(g, cur, a);
    return cur;
}

struct SourceRecovery {
    TensorModeVector modes;
    double off_parity_residual = 0.0;
    double f0_imag_residual = 0.0;
};

// Source extraction from the zero-level flux: f_p = dbar u0_{-(p-1)} +
// d u0_{-(p+1)} + a u0_{-p} for p >= 1 and, for even m,
// f_0 = 2 Re[d u0_{-1}] + a u0_0. Off-parity content is measured inside
// |z| <= residual_radius (the rim carries standoff-seam artifacts), then zeroed.
inline SourceRecovery recover_source(const ModeSequenceField& u0, const DiscGrid& g, int m,
                                     const Field* a = nullptr, double residual_radius = 0.85) {
    if (u0.N < m + 1) throw ConfigError("recover_source: needs truncation >= m+1");
    SourceRecovery out;
    out.modes.m = m;
    out.modes.mode.assign(m + 1, CField(g.size(), cplx(0, 0)));
    CField dbar_lo, d_lo, dbar_hi, d_hi;
    for (int p = 0; p <= m; ++p) {
        CField val(g.size(), cplx(0, 0));
        if (p == 0) {
            // for odd m this is a consistency residual, not data
            cr_derivatives(g, u0.mode[1], dbar_hi, d_hi);
            for (std::uint32_t id : g.active_nodes) {
                cplx v = 2.0 * d_hi[id].real();
                if (a) v += (*a)[id] * u0.mode[0][id];
                val[id] = v;
            }
        } else {
            cr_derivatives(g, u0.mode[p - 1], dbar_lo, d_lo);
            cr_derivatives(g, u0.mode[p + 1], dbar_hi, d_hi);
            for (std::uint32_t id : g.active_nodes) {
                cplx v = dbar_lo[id] + d_hi[id];
                if (a) v += (*a)[id] * u0.mode[p][id];
                val[id] = v;
            }
        }
        bool on_parity = ((m - p) % 2 == 0);
        if (on_parity) {
            if (p == 0) {
                for (std::uint32_t id : g.active_nodes) {
                    if (std::abs(g.z(id % g.n, id / g.n)) <= residual_radius)
                        out.f0_imag_residual =
                            std::max(out.f0_imag_residual, std::abs(val[id].imag()));
                    out.modes.mode[0][id] = val[id].real();
                }
            } else {
                out.modes.mode[p] = std::move(val);
            }
        } else {
            for (std::uint32_t id : g.active_nodes)
                if (std::abs(g.z(id % g.n, id / g.n)) <= residual_radius)
                    out.off_parity_residual = std::max(out.off_parity_residual, std::abs(val[id]));
        }
    }
    return out;
}

// Right side of the stability estimate, from the (unattenuated) boundary data:
//   |L^m g^0|^2_{m+1/2,1/2} + sum_j |L^{m-j} g^j|^2_{m-j+3/2, j+1/2}.
inline double stability_denominator(const BoundaryTrace& bt, int m) {
    double acc = 0.0;
    double n0 = weighted_norm(left_shift(bt.g[0], m), m + 0.5, 1.0);
    acc += n0 * n0;
    for (int j = 1; j <= m; ++j) {
        double nj = weighted_norm(left_shift(bt.g[j], m - j), m - j + 1.5, j + 1.0);
        acc += nj * nj;
    }
    return acc;
}

inline double stability_ratio(const DiscGrid& g, const SymmetricTensorField& f,
                              const BoundaryTrace& bt, bool* anomaly = nullptr) {
    double num = tensor_l2_norm(g, f);
    num *= num;
    double den = stability_denominator(bt, f.m);
    if (anomaly) *anomaly = (den <= 0.0 && num > 0.0);
    if (num == 0.0) return 0.0;
    if (den <= 0.0) return std::numeric_limits<double>::infinity();
    return num / den;
}

struct PipelineConfig {
    int N = 64;
    double standoff = -1.0;        // default: 2 (upsampled) boundary spacings
    double error_radius = 0.85;
    int fac_n_theta = 512;         // angular sampling of the integrating factor
    double neg_mode_tol = 1e-4;
    int boundary_oversample = 2;   // trig upsampling factor for the sweep data
};

// Full inversion: preprocess -> sweep down -> sweep up -> source -> tensor.
inline ReconstructionReport reconstruct(const MomentaSinogram& sino, const AttenuationMap* a,
                                        int m, const DiscGrid& grid, const PipelineConfig& cfg,
                                        const SymmetricTensorField* truth = nullptr) {
    auto t0 = std::chrono::steady_clock::now();
    if (sino.m != m) throw DataError("reconstruct: sinogram order does not match m");
    BoundaryGrid bg = make_boundary_grid(sino.n_beta);

    std::optional<IntegratingFactor> fac;
    bool attenuated = false;
    if (a) {
        for (double v : a->a)
            if (v != 0.0) { attenuated = true; break; }
    }
    if (attenuated)
        fac = integrating_factor(*a, grid, bg, cfg.N, cfg.fac_n_theta, cfg.neg_mode_tol);

    BoundaryTrace bt_plain = preprocess(sino, nullptr, cfg.N);
    BoundaryTrace bt = bt_plain;
    if (fac)
        for (int k = 0; k <= bt.m; ++k) bt.g[k] = apply_eG(-1, *fac, bt.g[k]);

    SweepState st = sweep_down(bt, bg, grid, m, cfg.standoff, cfg.boundary_oversample);
    ModeSequenceField u0 = sweep_up(st, grid, attenuated ? &a->a : nullptr,
                                    fac ? &*fac : nullptr);
    SourceRecovery src =
        recover_source(u0, grid, m, attenuated ? &a->a : nullptr, cfg.error_radius);

    ReconstructionReport rep;
    rep.tensor = modes_to_components(src.modes, 1.0); // parity already enforced
    rep.error_radius = cfg.error_radius;
    rep.off_parity_residual = src.off_parity_residual;
    rep.f0_imag_residual = src.f0_imag_residual;
    rep.level_sup = st.level_sup;
    rep.level_tail = st.level_tail;
    rep.standoff_extrapolated = st.bstats.extrapolated_targets;
    if (fac) {
        rep.l11_alpha = fac->l11_alpha;
        rep.l11_beta = fac->l11_beta;
        rep.neg_mode_residual = fac->neg_mode_residual;
    }
    rep.stability_ratio = stability_ratio(grid, rep.tensor, bt_plain, &rep.stability_anomaly);
    if (truth) rep.rel_l2_error = tensor_rel_l2_error(grid, rep.tensor, *truth, cfg.error_radius);
    rep.seconds_total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

} // namespace mrt

#pragma once

#include "mrt/fft.hpp"
#include "mrt/forward.hpp"
#include "mrt/mode_sequence.hpp"

namespace mrt {

// Truncated mode sequences g^k of the traces on the boundary circle.
struct BoundaryTrace {
    int m = 0, n_beta = 0;
    std::vector<ModeSequenceField> g; // m+1 boundary sequences
};

// g^k_{-n}(e^{i beta}) = (1/2pi) int u^k(e^{i beta}, theta) e^{i n theta} dtheta,
// n = 0..N, by the uniform-grid discrete transform. Exact on band-limited data.
inline BoundaryTrace angular_modes(const FluxTrace& tr, int N) {
    if (tr.n_theta < 2 * N + 2)
        throw ConfigError("angular_modes: n_theta = " + std::to_string(tr.n_theta) +
                          " undersamples N = " + std::to_string(N) + " (need >= 2N+2)");
    BoundaryTrace bt;
    bt.m = tr.m;
    bt.n_beta = tr.n_beta;
    bt.g.assign(tr.m + 1, ModeSequenceField());
    for (int k = 0; k <= tr.m; ++k) {
        bt.g[k] = make_boundary_modes(tr.n_beta, N);
        std::vector<cplx> buf(tr.n_theta);
        for (int j = 0; j < tr.n_beta; ++j) {
            for (int l = 0; l < tr.n_theta; ++l) buf[l] = tr.at(k, j, l);
            fft_1d(buf, FFTW_FORWARD);
            // real input: coefficient of e^{-i n theta} is conj(bin n)/n_theta
            for (int n = 0; n <= N; ++n)
                bt.g[k].mode[n][j] = std::conj(buf[n]) / static_cast<double>(tr.n_theta);
        }
    }
    return bt;
}

// Synthesis of a real angular function from its non-positive modes.
inline double synthesize_real(const ModeSequenceField& seq, std::size_t node, double theta) {
    double acc = seq.mode[0][node].real();
    for (int n = 1; n <= seq.N; ++n)
        acc += 2.0 * (seq.mode[n][node] * std::exp(cplx(0.0, -n * theta))).real();
    return acc;
}

// Trigonometric upsampling of boundary mode data onto factor * n_beta nodes
// (zero-padded beta spectrum); exact on band-limited data.
inline ModeSequenceField trig_upsample_boundary(const ModeSequenceField& g, int factor) {
    if (!g.on_boundary) throw DataError("trig_upsample_boundary expects boundary data");
    if (factor <= 1) return g;
    int nb = static_cast<int>(g.nodes);
    int nf = nb * factor;
    ModeSequenceField out = make_boundary_modes(nf, g.N);
    std::vector<cplx> spec(nb), fine(nf);
    for (int n = 0; n <= g.N; ++n) {
        spec.assign(g.mode[n].begin(), g.mode[n].end());
        fft_1d(spec, FFTW_FORWARD);
        std::fill(fine.begin(), fine.end(), cplx(0, 0));
        for (int k = 0; k < nb; ++k) {
            int ks = (k <= nb / 2) ? k : k - nb; // signed frequency
            cplx v = spec[k] / static_cast<double>(nb);
            if (ks == nb / 2 && nb % 2 == 0) v *= 0.5; // split the Nyquist bin
            int pos = (ks >= 0) ? ks : nf + ks;
            fine[pos] += v;
            if (ks == nb / 2 && nb % 2 == 0) fine[nf - ks] += v;
        }
        fft_1d(fine, FFTW_BACKWARD);
        out.mode[n].assign(fine.begin(), fine.end());
    }
    return out;
}

} // namespace mrt

#pragma once

#include "mrt/diffops.hpp"
#include "mrt/fft.hpp"

namespace mrt {

// Boundary norm in the double Fourier domain:
//   norm^2 = sum_j sum_n (1+j)^{2p} (1+|n|)^{2q-1} |g_{-j,n}|^2
// with g_{-j,n} the beta-Fourier coefficients of mode plane j.
inline double weighted_norm(const ModeSequenceField& g, double p, double q) {
    if (!g.on_boundary) throw DataError("weighted_norm expects a boundary sequence");
    int nb = static_cast<int>(g.nodes);
    double acc = 0.0;
    std::vector<cplx> buf(nb);
    for (int j = 0; j <= g.N; ++j) {
        buf.assign(g.mode[j].begin(), g.mode[j].end());
        fft_1d(buf, FFTW_FORWARD);
        double jw = std::pow(1.0 + j, 2.0 * p);
        for (int b = 0; b < nb; ++b) {
            int n = (b <= nb / 2) ? b : b - nb;
            double coeff2 = std::norm(buf[b] / static_cast<double>(nb));
            acc += jw * std::pow(1.0 + std::abs(n), 2.0 * q - 1.0) * coeff2;
        }
    }
    return std::sqrt(acc);
}

namespace detail {

inline double h_q_norm_sq(const DiscGrid& g, const CField& f, int q) {
    auto l2sq = [&](const CField& v) {
        double s = 0.0;
        for (std::uint32_t id : g.active_nodes) s += g.qw[id] * std::norm(v[id]);
        return s;
    };
    double acc = l2sq(f);
    if (q >= 1) {
        CField dx, dy;
        fd_xy(g, f, dx, dy);
        acc += l2sq(dx) + l2sq(dy);
        if (q >= 2) {
            CField dxx, dxy, dyx, dyy;
            fd_xy(g, dx, dxx, dxy);
            fd_xy(g, dy, dyx, dyy);
            acc += l2sq(dxx) + l2sq(dxy) + l2sq(dyy);
        }
    }
    return acc;
}

} // namespace detail

// Interior weighted norm: sum_j (1+j)^{2p} |u_{-j}|_{H^q}^2, q in {0,1,2}.
inline double interior_weighted_norm(const DiscGrid& g, const ModeSequenceField& u, double p,
                                     int q) {
    if (u.on_boundary) throw DataError("interior_weighted_norm expects an interior sequence");
    if (q < 0 || q > 2) throw ConfigError("interior_weighted_norm: q must be 0, 1 or 2");
    double acc = 0.0;
    for (int j = 0; j <= u.N; ++j)
        acc += std::pow(1.0 + j, 2.0 * p) * detail::h_q_norm_sq(g, u.mode[j], q);
    return std::sqrt(acc);
}

// L^2(Omega) norm of a tensor with binomial index multiplicities.
inline double tensor_l2_norm(const DiscGrid& g, const SymmetricTensorField& f,
                             double radius_cap = 1.0) {
    double acc = 0.0;
    for (int k = 0; k <= f.m; ++k) {
        double mult = static_cast<double>(binomial(f.m, k));
        for (std::uint32_t id : g.active_nodes) {
            int ix = id % g.n, iy = id / g.n;
            if (radius_cap < 1.0 && std::abs(g.z(ix, iy)) > radius_cap) continue;
            acc += mult * g.qw[id] * f.comp[k][id] * f.comp[k][id];
        }
    }
    return std::sqrt(acc);
}

inline double tensor_rel_l2_error(const DiscGrid& g, const SymmetricTensorField& rec,
                                  const SymmetricTensorField& truth, double radius_cap) {
    double num = 0.0, den = 0.0;
    for (int k = 0; k <= truth.m; ++k) {
        double mult = static_cast<double>(binomial(truth.m, k));
        for (std::uint32_t id : g.active_nodes) {
            int ix = id % g.n, iy = id / g.n;
            if (std::abs(g.z(ix, iy)) > radius_cap) continue;
            double d = rec.comp[k][id] - truth.comp[k][id];
            num += mult * g.qw[id] * d * d;
            den += mult * g.qw[id] * truth.comp[k][id] * truth.comp[k][id];
        }
    }
    if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return std::sqrt(num / den);
}

} // namespace mrt

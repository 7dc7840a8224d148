#pragma once

#include "mrt/fft.hpp"
#include "mrt/parallel.hpp"
#include "mrt/tensor_field.hpp"
#include "mrt/mode_sequence.hpp"

namespace mrt {

// Parallel-beam Radon samples: data[d][i] = integral of a along the line
// s_i * theta_d^perp + t * theta_d, s uniform on [-1,1].
struct RadonSinogram {
    int n_s = 0, n_dir = 0;
    std::vector<Field> data; // n_dir rows of n_s samples

    double s_of(int i) const { return -1.0 + 2.0 * i / (n_s - 1); }
};

inline RadonSinogram radon_transform(const AttenuationMap& a, const DiscGrid& g, int n_s,
                                     int n_dir, double quad_step = -1.0) {
    if (n_s < 2 || n_dir < 1) throw ConfigError("radon_transform: bad sampling");
    if (quad_step <= 0.0) quad_step = 0.5 * g.h;
    RadonSinogram r;
    r.n_s = n_s;
    r.n_dir = n_dir;
    r.data.assign(n_dir, Field(n_s, 0.0));
    parallel_for(n_dir, [&](std::size_t d) {
        double phi = 2.0 * pi * d / n_dir;
        Vec2 th = dir_vec(phi);
        Vec2 pp{-th.y, th.x};
        for (int i = 0; i < n_s; ++i) {
            double s = r.s_of(i);
            double half2 = 1.0 - s * s;
            if (half2 <= 0.0) continue;
            double half = std::sqrt(half2);
            int nseg = std::max(2, static_cast<int>(std::ceil(2.0 * half / quad_step)));
            double dt = 2.0 * half / nseg;
            double acc = 0.0;
            for (int q = 0; q <= nseg; ++q) {
                double t = -half + q * dt;
                double w = (q == 0 || q == nseg) ? 0.5 : 1.0;
                acc += w * bilinear(g, a.a, s * pp.x + t * th.x, s * pp.y + t * th.y);
            }
            r.data[d][i] = acc * dt;
        }
    });
    return r;
}

// Principal-value Hilbert transform of samples on a uniform grid over
// [-half, half]: H psi(s) = (1/pi) PV int psi(t)/(s-t) dt. The singularity is
// subtracted; the regularized integrand takes -psi'(s) at the singular node.
inline Field hilbert_transform(const Field& psi, double half = 1.0) {
    int n = static_cast<int>(psi.size());
    if (n < 3) throw ConfigError("hilbert_transform: need at least 3 samples");
    double ds = 2.0 * half / (n - 1);
    Field out(n, 0.0);
    for (int i = 0; i < n; ++i) {
        double s = -half + i * ds;
        double dpsi;
        if (i == 0) dpsi = (psi[1] - psi[0]) / ds;
        else if (i == n - 1) dpsi = (psi[n - 1] - psi[n - 2]) / ds;
        else dpsi = (psi[i + 1] - psi[i - 1]) / (2.0 * ds);
        double acc = 0.0;
        for (int j = 0; j < n; ++j) {
            double w = (j == 0 || j == n - 1) ? 0.5 : 1.0;
            double phi = (j == i) ? -dpsi : (psi[j] - psi[i]) / (s + half - (j * ds));
            acc += w * phi;
        }
        acc *= ds;
        // PV of the constant part; compactly supported psi vanishes at the
        // endpoints where the log blows up.
        if (i != 0 && i != n - 1) acc += psi[i] * std::log((half + s) / (half - s));
        out[i] = acc / pi;
    }
    return out;
}

// Angular Fourier modes alpha_k, beta_k of exp(-h), exp(+h) for the
// integrating factor h(z,theta) = int_0^inf a(z+t theta) dt
//                               - (1/2)(I - iH) Ra(z.theta_perp, theta_perp).
// Plane k of the sequences holds the coefficient of e^{+i k theta}.
struct IntegratingFactor {
    int N = 0;
    ModeSequenceField alpha_in, beta_in; // on the disc grid
    ModeSequenceField alpha_bd, beta_bd; // on the boundary nodes
    double l11_alpha = 0.0, l11_beta = 0.0; // sup_z sum_k (1+k)|.|
    double neg_mode_residual = 0.0;          // max negative mode of e^{-h}
    double beta_deviation = 0.0;             // |modes of e^{+h} - alpha^{*-1}|_inf
};

namespace detail {

// 4-point Lagrange interpolation on a uniform grid over [0,1].
inline double interp1_cubic(const Field& v, double x01) {
    int n = static_cast<int>(v.size());
    double u = std::clamp(x01, 0.0, 1.0) * (n - 1);
    int i = std::clamp(static_cast<int>(std::floor(u)), 1, n - 3);
    double f = u - i;
    double w0 = -f * (f - 1.0) * (f - 2.0) / 6.0;
    double w1 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    double w2 = -(f + 1.0) * f * (f - 2.0) / 2.0;
    double w3 = (f + 1.0) * f * (f - 1.0) / 6.0;
    return w0 * v[i - 1] + w1 * v[i] + w2 * v[i + 1] + w3 * v[i + 2];
}

inline void cubic_weights(double f, double* w) {
    w[0] = -f * (f - 1.0) * (f - 2.0) / 6.0;
    w[1] = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0;
    w[2] = -(f + 1.0) * f * (f - 2.0) / 2.0;
    w[3] = (f + 1.0) * f * (f - 1.0) / 6.0;
}

// Per-node convolution inverse: alpha * beta = <1, 0, 0, ...> exactly.
inline void convolution_inverse(const cplx* alpha, cplx* beta, int count) {
    beta[0] = 1.0 / alpha[0];
    for (int k = 1; k < count; ++k) {
        cplx acc(0, 0);
        for (int i = 1; i <= k; ++i) acc += alpha[i] * beta[k - i];
        beta[k] = -acc / alpha[0];
    }
}

} // namespace detail

inline IntegratingFactor integrating_factor(const AttenuationMap& a, const DiscGrid& g,
                                            const BoundaryGrid& bg, int N, int n_theta = 512,
                                            double neg_mode_tol = 1e-4, int table_factor = 4) {
    IntegratingFactor fac;
    fac.N = N;
    fac.alpha_in = make_interior_modes(g, N);
    fac.beta_in = make_interior_modes(g, N);
    fac.alpha_bd = make_boundary_modes(bg.n_beta, N);
    fac.beta_bd = make_boundary_modes(bg.n_beta, N);

    bool zero = true;
    for (double v : a.a)
        if (v != 0.0) { zero = false; break; }
    if (zero) {
        for (std::uint32_t id : g.active_nodes) {
            fac.alpha_in.mode[0][id] = 1.0;
            fac.beta_in.mode[0][id] = 1.0;
        }
        for (int j = 0; j < bg.n_beta; ++j) {
            fac.alpha_bd.mode[0][j] = 1.0;
            fac.beta_bd.mode[0][j] = 1.0;
        }
        fac.l11_alpha = fac.l11_beta = 1.0;
        return fac;
    }

    if (n_theta < 2 * N + 2) throw ConfigError("integrating_factor: n_theta undersamples N");

    // evaluation points: grid active nodes then boundary nodes
    std::vector<cplx> pts;
    pts.reserve(g.active_nodes.size() + bg.n_beta);
    for (std::uint32_t id : g.active_nodes) pts.push_back(g.z(id % g.n, id / g.n));
    for (int j = 0; j < bg.n_beta; ++j) pts.push_back(bg.node[j]);

    // the (s, t) tables are padded past [-1,1] so every node query keeps a
    // full interpolation stencil; a vanishes there so the padding is free
    const double pad = 1.0 + 8.0 / (table_factor * g.n);
    const int n_s = table_factor * g.n + 17, n_t = n_s;
    const double ds = 2.0 * pad / (n_s - 1), dt = ds;
    std::vector<cplx> hval(pts.size() * static_cast<std::size_t>(n_theta));

    parallel_for(n_theta, [&](std::size_t d) {
        double phi = 2.0 * pi * d / n_theta;
        Vec2 th = dir_vec(phi);
        Vec2 pp{-th.y, th.x};
        // cumulative table C[i][q] = int_{t_q}^{pad} a(s_i pp + tau th) dtau
        std::vector<double> C(static_cast<std::size_t>(n_s) * n_t, 0.0);
        Field ra(n_s, 0.0);
        std::vector<double> av(n_t);
        for (int i = 0; i < n_s; ++i) {
            double s = -pad + i * ds;
            if (s * s >= 1.0) continue;
            for (int q = 0; q < n_t; ++q) {
                double t = -pad + q * dt;
                av[q] = bilinear(g, a.a, s * pp.x + t * th.x, s * pp.y + t * th.y);
            }
            double acc = 0.0;
            C[static_cast<std::size_t>(i) * n_t + n_t - 1] = 0.0;
            for (int q = n_t - 2; q >= 0; --q) {
                acc += 0.5 * dt * (av[q] + av[q + 1]);
                C[static_cast<std::size_t>(i) * n_t + q] = acc;
            }
            ra[i] = acc;
        }
        Field hra = hilbert_transform(ra, pad);
        for (std::size_t p = 0; p < pts.size(); ++p) {
            double sv = pts[p].real() * pp.x + pts[p].imag() * pp.y;
            double tv = pts[p].real() * th.x + pts[p].imag() * th.y;
            double u = (sv + pad) / (2.0 * pad) * (n_s - 1);
            double v = (tv + pad) / (2.0 * pad) * (n_t - 1);
            int i0 = std::clamp(static_cast<int>(std::floor(u)), 1, n_s - 3);
            int q0 = std::clamp(static_cast<int>(std::floor(v)), 1, n_t - 3);
            double wu[4], wv[4];
            detail::cubic_weights(u - i0, wu);
            detail::cubic_weights(v - q0, wv);
            double D = 0.0;
            for (int iu = 0; iu < 4; ++iu)
                for (int iv = 0; iv < 4; ++iv)
                    D += wu[iu] * wv[iv] * C[static_cast<std::size_t>(i0 - 1 + iu) * n_t + q0 - 1 + iv];
            double R = detail::interp1_cubic(ra, (sv + pad) / (2.0 * pad));
            double H = detail::interp1_cubic(hra, (sv + pad) / (2.0 * pad));
            hval[p * n_theta + d] = cplx(D - 0.5 * R, 0.5 * H);
        }
    });

    // Per-node angular transforms. alpha_k are the non-negative modes of
    // exp(-h); beta is the convolution inverse of alpha, which equals the
    // mode sequence of exp(+h) for a one-sided invertible series and makes
    // the e^{+G} e^{-G} pair exact. The direct transform of exp(+h) is kept
    // as a consistency diagnostic.
    std::vector<double> l11a(pts.size(), 0.0), l11b(pts.size(), 0.0), negres(pts.size(), 0.0),
        betadev(pts.size(), 0.0);
    parallel_for(pts.size(), [&](std::size_t p) {
        std::vector<cplx> em(n_theta), ep(n_theta);
        for (int d = 0; d < n_theta; ++d) {
            cplx h = hval[p * n_theta + d];
            em[d] = std::exp(-h);
            ep[d] = std::exp(h);
        }
        fft_1d(em, FFTW_FORWARD);
        fft_1d(ep, FFTW_FORWARD);
        std::vector<cplx> ak(N + 1), bk(N + 1);
        for (int k = 0; k <= N; ++k) ak[k] = em[k] / static_cast<double>(n_theta);
        detail::convolution_inverse(ak.data(), bk.data(), N + 1);
        double la = 0.0, lb = 0.0, bd = 0.0;
        for (int k = 0; k <= N; ++k) {
            if (p < g.active_nodes.size()) {
                fac.alpha_in.mode[k][g.active_nodes[p]] = ak[k];
                fac.beta_in.mode[k][g.active_nodes[p]] = bk[k];
            } else {
                fac.alpha_bd.mode[k][p - g.active_nodes.size()] = ak[k];
                fac.beta_bd.mode[k][p - g.active_nodes.size()] = bk[k];
            }
            la += (1.0 + k) * std::abs(ak[k]);
            lb += (1.0 + k) * std::abs(bk[k]);
            bd = std::max(bd, std::abs(bk[k] - ep[k] / static_cast<double>(n_theta)));
        }
        double nr = 0.0;
        for (int k = 1; k <= std::min(N, n_theta / 2 - 1); ++k)
            nr = std::max(nr, std::abs(em[n_theta - k]) / n_theta);
        l11a[p] = la;
        l11b[p] = lb;
        negres[p] = nr;
        betadev[p] = bd;
    });
    for (std::size_t p = 0; p < pts.size(); ++p) {
        fac.l11_alpha = std::max(fac.l11_alpha, l11a[p]);
        fac.l11_beta = std::max(fac.l11_beta, l11b[p]);
        fac.neg_mode_residual = std::max(fac.neg_mode_residual, negres[p]);
        fac.beta_deviation = std::max(fac.beta_deviation, betadev[p]);
    }
    if (fac.neg_mode_residual > neg_mode_tol)
        throw AccuracyError("integrating_factor: negative-mode residual " +
                            std::to_string(fac.neg_mode_residual) +
                            " exceeds tolerance (angular undersampling?)");
    return fac;
}

// e^{-G} u = sum_k alpha_k L^k u (sign < 0), e^{+G} with beta (sign > 0).
// Pointwise in z, truncated mode convolution. Commutes with L exactly.
inline ModeSequenceField apply_eG(int sign, const IntegratingFactor& fac,
                                  const ModeSequenceField& u) {
    const ModeSequenceField& c = u.on_boundary ? (sign < 0 ? fac.alpha_bd : fac.beta_bd)
                                               : (sign < 0 ? fac.alpha_in : fac.beta_in);
    if (c.nodes != u.nodes) throw DataError("apply_eG: factor/grid mismatch");
    ModeSequenceField out = u;
    for (int n = 0; n <= u.N; ++n) {
        CField& dst = out.mode[n];
        std::fill(dst.begin(), dst.end(), cplx(0, 0));
        for (int k = 0; k + n <= u.N && k <= fac.N; ++k) {
            const CField& ck = c.mode[k];
            const CField& src = u.mode[n + k];
            for (std::size_t i = 0; i < u.nodes; ++i) dst[i] += ck[i] * src[i];
        }
    }
    return out;
}

// Mode-index convolution (alpha * beta)_k; identity sequence check helper.
inline CField sequence_convolution(const ModeSequenceField& x, const ModeSequenceField& y,
                                   std::size_t node, int upto) {
    CField out(upto + 1, cplx(0, 0));
    for (int k = 0; k <= upto; ++k)
        for (int i = 0; i <= k; ++i)
            if (i <= x.N && k - i <= y.N) out[k] += x.mode[i][node] * y.mode[k - i][node];
    return out;
}

} // namespace mrt

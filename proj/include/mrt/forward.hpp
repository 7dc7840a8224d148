#pragma once

#include "mrt/parallel.hpp"
#include "mrt/tensor_modes.hpp"

namespace mrt {

inline constexpr double outgoing_eps = 1e-12; // nu(x).theta > eps selects Gamma_+

// I_a^k f(x_j, theta_l) on the boundary/direction torus, k = 0..m.
struct MomentaSinogram {
    int m = 0, n_beta = 0, n_theta = 0;
    bool attenuated = false;
    std::vector<Field> data; // m+1 planes, index j * n_theta + l

    double& at(int k, int j, int l) { return data[k][static_cast<std::size_t>(j) * n_theta + l]; }
    double at(int k, int j, int l) const { return data[k][static_cast<std::size_t>(j) * n_theta + l]; }
};

// Outgoing transport traces u^k on Gamma x S^1; zero on Gamma_- by construction.
struct FluxTrace {
    int m = 0, n_beta = 0, n_theta = 0;
    std::vector<Field> g;

    double& at(int k, int j, int l) { return g[k][static_cast<std::size_t>(j) * n_theta + l]; }
    double at(int k, int j, int l) const { return g[k][static_cast<std::size_t>(j) * n_theta + l]; }
};

namespace detail {

// Sample layout along one chord; t runs from the foot point of the line, so
// the k-th moment weight is plain t^k.
struct ChordQuad {
    double half = 0.0; // half chord length
    double dt = 0.0;
    int count = 0; // sample count (count >= 3 when half > 0)
};

inline ChordQuad chord_samples(double half, double step) {
    ChordQuad q;
    q.half = half;
    if (half <= 1e-14) return q;
    int nseg = std::max(2, static_cast<int>(std::ceil(2.0 * half / step)));
    q.count = nseg + 1;
    q.dt = 2.0 * half / nseg;
    return q;
}

} // namespace detail

// Moment integrals J_k = int t^k exp(-int_t^exit a) s(t) dt over one chord,
// trapezoid rule with bilinear field sampling. `action` is <f,theta^m> on the
// grid for this direction.
inline void chord_moments(const DiscGrid& g, const Field& action, const Field* atten, Vec2 foot,
                          Vec2 dir, double half, double step, int m, double* J) {
    for (int k = 0; k <= m; ++k) J[k] = 0.0;
    detail::ChordQuad q = detail::chord_samples(half, step);
    if (q.count == 0) return;
    thread_local std::vector<double> sv, av, ev;
    sv.resize(q.count);
    av.resize(q.count);
    ev.resize(q.count);
    for (int i = 0; i < q.count; ++i) {
        double t = -half + i * q.dt;
        double px = foot.x + t * dir.x, py = foot.y + t * dir.y;
        sv[i] = bilinear(g, action, px, py);
        av[i] = atten ? bilinear(g, *atten, px, py) : 0.0;
    }
    // exp(-int_t^exit a) by backward cumulative trapezoid on the same nodes
    double acc = 0.0;
    ev[q.count - 1] = 1.0;
    for (int i = q.count - 2; i >= 0; --i) {
        acc += 0.5 * q.dt * (av[i] + av[i + 1]);
        ev[i] = std::exp(-acc);
    }
    for (int i = 0; i < q.count; ++i) {
        double w = (i == 0 || i == q.count - 1) ? 0.5 : 1.0;
        double base = w * q.dt * ev[i] * sv[i];
        if (base == 0.0) continue;
        double t = -half + i * q.dt;
        double tk = 1.0;
        for (int k = 0; k <= m; ++k) {
            J[k] += base * tk;
            tk *= t;
        }
    }
}

// k-th moment attenuated ray transform of f on all boundary lines.
inline MomentaSinogram ray_transform(const SymmetricTensorField& f, const AttenuationMap& a,
                                     const DiscGrid& g, const BoundaryGrid& bg, int n_theta,
                                     double quad_step) {
    if (quad_step > g.h + 1e-15)
        throw ConfigError("ray_transform: quad_step must not exceed the grid spacing");
    MomentaSinogram s;
    s.m = f.m;
    s.n_beta = bg.n_beta;
    s.n_theta = n_theta;
    bool has_a = false;
    for (double v : a.a)
        if (v != 0.0) { has_a = true; break; }
    s.attenuated = has_a;
    s.data.assign(f.m + 1, Field(static_cast<std::size_t>(bg.n_beta) * n_theta, 0.0));

    parallel_for(n_theta, [&](std::size_t l) {
        double theta = 2.0 * pi * l / n_theta;
        Vec2 d = dir_vec(theta);
        Field action = tensor_action(f, theta);
        std::vector<double> J(f.m + 1);
        for (int j = 0; j < bg.n_beta; ++j) {
            Vec2 x{bg.node[j].real(), bg.node[j].imag()};
            double xd = dot(x, d);
            Vec2 foot{x.x - xd * d.x, x.y - xd * d.y};
            double half2 = 1.0 - (foot.x * foot.x + foot.y * foot.y);
            double half = half2 > 0.0 ? std::sqrt(half2) : 0.0;
            chord_moments(g, action, has_a ? &a.a : nullptr, foot, d, half, quad_step, f.m, J.data());
            for (int k = 0; k <= f.m; ++k) s.at(k, j, l) = J[k];
        }
    });
    return s;
}

// Outgoing traces from the chord integral representations: u^0 directly, u^k
// by the boundary recursion in k. Zero on Gamma_- and on tangent lines.
inline FluxTrace solve_transport_traces(const SymmetricTensorField& f, const AttenuationMap& a,
                                        const DiscGrid& g, const BoundaryGrid& bg, int n_theta,
                                        double quad_step) {
    FluxTrace tr;
    tr.m = f.m;
    tr.n_beta = bg.n_beta;
    tr.n_theta = n_theta;
    tr.g.assign(f.m + 1, Field(static_cast<std::size_t>(bg.n_beta) * n_theta, 0.0));
    bool has_a = false;
    for (double v : a.a)
        if (v != 0.0) { has_a = true; break; }

    parallel_for(n_theta, [&](std::size_t l) {
        double theta = 2.0 * pi * l / n_theta;
        Vec2 d = dir_vec(theta);
        Field action = tensor_action(f, theta);
        std::vector<double> J(f.m + 1), u(f.m + 1);
        for (int j = 0; j < bg.n_beta; ++j) {
            Vec2 x{bg.node[j].real(), bg.node[j].imag()};
            double xd = dot(x, d);
            if (xd <= outgoing_eps) continue; // incoming or tangent
            Vec2 foot{x.x - xd * d.x, x.y - xd * d.y};
            double half2 = 1.0 - (foot.x * foot.x + foot.y * foot.y);
            double half = half2 > 0.0 ? std::sqrt(half2) : 0.0;
            chord_moments(g, action, has_a ? &a.a : nullptr, foot, d, half, quad_step, f.m, J.data());
            for (int k = 0; k <= f.m; ++k) {
                double acc = (k % 2 == 0 ? 1.0 : -1.0) / factorial(k) * J[k];
                double pw = 1.0;
                for (int n = 1; n <= k; ++n) {
                    pw *= xd / n;
                    acc += (n % 2 == 1 ? 1.0 : -1.0) * pw * u[k - n];
                }
                u[k] = acc;
                tr.at(k, j, l) = acc;
            }
        }
    });
    return tr;
}

// Triangular relations between traces and moments, pointwise in (x, theta),
// evaluated in increasing k. Inverse pair with sinogram_from_traces.
inline FluxTrace traces_from_sinogram(const MomentaSinogram& s) {
    for (int k = 0; k <= s.m; ++k)
        if (s.data[k].empty()) throw DataError("traces_from_sinogram: missing moment slice");
    FluxTrace tr;
    tr.m = s.m;
    tr.n_beta = s.n_beta;
    tr.n_theta = s.n_theta;
    tr.g.assign(s.m + 1, Field(s.data[0].size(), 0.0));
    for (int j = 0; j < s.n_beta; ++j) {
        double beta = 2.0 * pi * j / s.n_beta;
        Vec2 x{std::cos(beta), std::sin(beta)};
        for (int l = 0; l < s.n_theta; ++l) {
            double theta = 2.0 * pi * l / s.n_theta;
            Vec2 d = dir_vec(theta);
            double xd = dot(x, d);
            if (xd <= outgoing_eps) continue;
            for (int k = 0; k <= s.m; ++k) {
                double acc = (k % 2 == 0 ? 1.0 : -1.0) / factorial(k) * s.at(k, j, l);
                double pw = 1.0;
                for (int n = 1; n <= k; ++n) {
                    pw *= xd / n;
                    acc += (n % 2 == 1 ? 1.0 : -1.0) * pw * tr.at(k - n, j, l);
                }
                tr.at(k, j, l) = acc;
            }
        }
    }
    return tr;
}

inline MomentaSinogram sinogram_from_traces(const FluxTrace& tr) {
    MomentaSinogram s;
    s.m = tr.m;
    s.n_beta = tr.n_beta;
    s.n_theta = tr.n_theta;
    s.data.assign(tr.m + 1, Field(tr.g[0].size(), 0.0));
    for (int j = 0; j < s.n_beta; ++j) {
        double beta = 2.0 * pi * j / s.n_beta;
        Vec2 x{std::cos(beta), std::sin(beta)};
        for (int l = 0; l < s.n_theta; ++l) {
            double theta = 2.0 * pi * l / s.n_theta;
            Vec2 d = dir_vec(theta);
            double xd = dot(x, d);
            if (xd <= outgoing_eps) continue;
            for (int k = 0; k <= s.m; ++k) {
                double acc = tr.at(k, j, l);
                double pw = 1.0;
                for (int n = 1; n <= k; ++n) {
                    pw *= xd / n;
                    acc -= (n % 2 == 1 ? 1.0 : -1.0) * pw * tr.at(k - n, j, l);
                }
                s.at(k, j, l) = (k % 2 == 0 ? 1.0 : -1.0) * factorial(k) * acc;
            }
        }
    }
    return s;
}

} // namespace mrt

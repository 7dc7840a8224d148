#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrt/io.hpp"
#include "mrt/reconstruct.hpp"
#include "mrt/verify.hpp"
#include "support.hpp"

using namespace mrt;

namespace {

// Independent oracle: interior flux modes by marching the coupled transport
// system along each ray with a fine RK2 step, then a discrete angular
// transform. Shares nothing with the sweep operators.
std::vector<CField> march_flux_modes(const DiscGrid& g, const SymmetricTensorField& f,
                                     const AttenuationMap& a, const std::vector<cplx>& pts,
                                     int level, int n_theta, int N) {
    std::vector<Field> actions(n_theta);
    for (int l = 0; l < n_theta; ++l) actions[l] = tensor_action(f, 2.0 * pi * l / n_theta);
    std::vector<CField> modes(N + 1, CField(pts.size(), cplx(0, 0)));
    for (std::size_t p = 0; p < pts.size(); ++p) {
        std::vector<cplx> samples(n_theta);
        for (int l = 0; l < n_theta; ++l) {
            double theta = 2.0 * pi * l / n_theta;
            Vec2 d = dir_vec(theta);
            Vec2 z{pts[p].real(), pts[p].imag()};
            auto [t0, t1] = ray_disc_interval(z, d);
            (void)t1;
            int nseg = std::max(4, static_cast<int>(std::ceil(-t0 / (g.h / 4))));
            double dt = -t0 / nseg;
            std::vector<double> u(level + 1, 0.0), mid(level + 1), k1(level + 1), k2(level + 1);
            for (int i = 0; i < nseg; ++i) {
                double t = t0 + i * dt;
                auto rhs = [&](double tt, const std::vector<double>& state, std::vector<double>& out) {
                    double px = z.x + tt * d.x, py = z.y + tt * d.y;
                    double av = bilinear(g, a.a, px, py);
                    double sv = bilinear(g, actions[l], px, py);
                    out[0] = -av * state[0] + sv;
                    for (int k = 1; k <= level; ++k) out[k] = -av * state[k] + state[k - 1];
                };
                rhs(t, u, k1);
                for (int k = 0; k <= level; ++k) mid[k] = u[k] + 0.5 * dt * k1[k];
                rhs(t + 0.5 * dt, mid, k2);
                for (int k = 0; k <= level; ++k) u[k] += dt * k2[k];
            }
            samples[l] = u[level];
        }
        fft_1d(samples, FFTW_FORWARD);
        for (int n = 0; n <= N; ++n) modes[n][p] = std::conj(samples[n]) / static_cast<double>(n_theta);
    }
    return modes;
}

MomentaSinogram forward_of(const DiscGrid& g, const SymmetricTensorField& f,
                           const AttenuationMap& a, int n_beta, int n_theta) {
    BoundaryGrid bg = make_boundary_grid(n_beta);
    return ray_transform(f, a, g, bg, n_theta, g.h / 2);
}

} // namespace

TEST_CASE("zero data reconstructs to the zero tensor") {
    DiscGrid g = make_disc_grid(65);
    auto f = make_phantom_tensor(g, 1, PhantomKind::zero);
    auto s = forward_of(g, f, zero_attenuation(g), 64, 64);
    PipelineConfig pc;
    pc.N = 16;
    auto rep = reconstruct(s, nullptr, 1, g, pc, &f);
    CHECK(tensor_l2_norm(g, rep.tensor) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(rep.stability_ratio == 0.0);
}

TEST_CASE("sweep down level m matches the marched transport oracle") {
    DiscGrid g = make_disc_grid(65);
    const int m = 1, N = 24;
    auto f = mrt_test::random_tensor(g, m, 41);
    AttenuationMap a0 = zero_attenuation(g);
    auto s = forward_of(g, f, a0, 128, 128);
    BoundaryTrace bt = preprocess(s, nullptr, N);
    BoundaryGrid bg = make_boundary_grid(128);
    SweepState st = sweep_down(bt, bg, g, m);

    // oracle points snapped onto grid nodes
    std::vector<std::pair<int, int>> nodes = {{38, 45}, {22, 34}, {32, 18}, {44, 42}};
    std::vector<cplx> pts;
    for (auto [ix, iy] : nodes) pts.push_back(g.z(ix, iy));
    auto oracle = march_flux_modes(g, f, a0, pts, m, 256, 8);
    double scale = 0.0, err = 0.0;
    for (int n = 0; n <= 8; ++n)
        for (std::size_t p = 0; p < pts.size(); ++p) {
            scale = std::max(scale, std::abs(oracle[n][p]));
            err = std::max(err,
                           std::abs(st.shifted[m].mode[n][g.idx(nodes[p].first, nodes[p].second)] -
                                    oracle[n][p]));
        }
    CAPTURE(scale);
    CAPTURE(err);
    CHECK(err < 0.08 * std::max(scale, 0.05));
}

TEST_CASE("sweep up z-bar stencil example") {
    DiscGrid g = make_disc_grid(33);
    SweepState st;
    st.m = 1;
    st.shifted.resize(2);
    ModeSequenceField vm = make_interior_modes(g, 4);
    for (std::uint32_t id : g.active_nodes) vm.mode[0][id] = std::conj(g.z(id % g.n, id / g.n));
    st.shifted[1] = vm;
    ModeSequenceField v0 = sweep_up(st, g);
    // dbar zbar = 1 lands in plane 1; plane 0 = 2 Re d(zero) = 0
    for (std::uint32_t id : g.active_nodes) {
        if (g.depth[id] < 2) continue;
        CHECK(v0.mode[1][id].real() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(v0.mode[1][id].imag()) < 1e-10);
        CHECK(std::abs(v0.mode[0][id]) < 1e-12);
    }
}

TEST_CASE("recover_source structural example: v0 = <0, zbar, 0...> gives f2 = 1") {
    DiscGrid g = make_disc_grid(33);
    ModeSequenceField v0 = make_interior_modes(g, 4);
    for (std::uint32_t id : g.active_nodes) v0.mode[1][id] = std::conj(g.z(id % g.n, id / g.n));
    SourceRecovery sr = recover_source(v0, g, 2);
    for (std::uint32_t id : g.active_nodes) {
        if (g.depth[id] < 2) continue;
        CHECK(std::abs(sr.modes.mode[0][id]) < 1e-12);              // f0 = 2 Re d(zbar) = 0
        CHECK(sr.modes.mode[2][id].real() == doctest::Approx(1.0).epsilon(1e-10)); // dbar zbar
    }
    SUBCASE("zero in, zero out") {
        ModeSequenceField z = make_interior_modes(g, 4);
        SourceRecovery s0 = recover_source(z, g, 2);
        double sup = 0.0;
        for (const auto& plane : s0.modes.mode)
            for (const cplx& v : plane) sup = std::max(sup, std::abs(v));
        CHECK(sup == 0.0);
    }
}

TEST_CASE("end-to-end m=1 unattenuated on a small grid") {
    DiscGrid g = make_disc_grid(65);
    auto f = make_phantom_tensor(g, 1, PhantomKind::polynomial_bump);
    auto s = forward_of(g, f, zero_attenuation(g), 256, 128);
    PipelineConfig pc;
    pc.N = 32;
    pc.error_radius = 0.8;
    auto rep = reconstruct(s, nullptr, 1, g, pc, &f);
    CAPTURE(rep.rel_l2_error);
    CHECK(rep.rel_l2_error < 0.12);
    CHECK(rep.off_parity_residual < 1.0);
}

TEST_CASE("end-to-end m=2 even path on a small grid") {
    DiscGrid g = make_disc_grid(65);
    auto f = make_phantom_tensor(g, 2, PhantomKind::polynomial_bump);
    auto s = forward_of(g, f, zero_attenuation(g), 256, 128);
    PipelineConfig pc;
    pc.N = 32;
    pc.error_radius = 0.8;
    auto rep = reconstruct(s, nullptr, 2, g, pc, &f);
    CAPTURE(rep.rel_l2_error);
    CHECK(rep.rel_l2_error < 0.15);
}

TEST_CASE("end-to-end m=1 attenuated on a small grid") {
    DiscGrid g = make_disc_grid(65);
    auto f = make_phantom_tensor(g, 1, PhantomKind::polynomial_bump);
    AttenuationMap a = make_attenuation(g, PhantomKind::gaussian_bump, {0.5, 0.0, 0.0, 0.7});
    auto s = forward_of(g, f, a, 256, 128);
    PipelineConfig pc;
    pc.N = 32;
    pc.error_radius = 0.8;
    auto rep = reconstruct(s, &a, 1, g, pc, &f);
    CAPTURE(rep.rel_l2_error);
    CHECK(rep.rel_l2_error < 0.2);
}

TEST_CASE("attenuated path with a == 0 equals the plain path") {
    DiscGrid g = make_disc_grid(65);
    auto f = make_phantom_tensor(g, 1, PhantomKind::polynomial_bump);
    AttenuationMap a = zero_attenuation(g);
    auto s = forward_of(g, f, a, 64, 96);
    PipelineConfig pc;
    pc.N = 24;
    auto plain = reconstruct(s, nullptr, 1, g, pc, &f);
    auto with_zero = reconstruct(s, &a, 1, g, pc, &f);
    double gap = 0.0;
    for (int k = 0; k <= 1; ++k)
        for (std::size_t i = 0; i < g.size(); ++i)
            gap = std::max(gap, std::abs(plain.tensor.comp[k][i] - with_zero.tensor.comp[k][i]));
    CHECK(gap < 1e-12);
}

TEST_CASE("triangularity: levels above k do not influence L^{m-k} v^k") {
    DiscGrid g = make_disc_grid(65);
    const int m = 2, N = 24;
    auto f = mrt_test::random_tensor(g, m, 17);
    auto s = forward_of(g, f, zero_attenuation(g), 96, 96);
    BoundaryGrid bg = make_boundary_grid(96);
    BoundaryTrace bt = preprocess(s, nullptr, N);
    BoundaryTrace bt_zeroed = bt;
    for (auto& plane : bt_zeroed.g[2].mode) std::fill(plane.begin(), plane.end(), cplx(0, 0));
    SweepState full = sweep_down(bt, bg, g, m);
    SweepState cut = sweep_down(bt_zeroed, bg, g, m);
    for (int k = 0; k <= 1; ++k) {
        double gap = 0.0;
        for (int n = 0; n <= full.shifted[k].N; ++n)
            for (std::size_t i = 0; i < g.size(); ++i)
                gap = std::max(gap, std::abs(full.shifted[k].mode[n][i] - cut.shifted[k].mode[n][i]));
        CHECK(gap <= 1e-12);
    }
}

TEST_CASE("pipeline linearity") {
    DiscGrid g = make_disc_grid(65);
    auto f1 = mrt_test::random_tensor(g, 1, 61);
    auto f2 = mrt_test::random_tensor(g, 1, 62);
    auto s1 = forward_of(g, f1, zero_attenuation(g), 96, 96);
    auto s2 = forward_of(g, f2, zero_attenuation(g), 96, 96);
    MomentaSinogram sum = s1;
    for (int k = 0; k <= 1; ++k)
        for (std::size_t i = 0; i < sum.data[k].size(); ++i) sum.data[k][i] += s2.data[k][i];
    PipelineConfig pc;
    pc.N = 24;
    auto r1 = reconstruct(s1, nullptr, 1, g, pc);
    auto r2 = reconstruct(s2, nullptr, 1, g, pc);
    auto rs = reconstruct(sum, nullptr, 1, g, pc);
    double gap = 0.0, scale = 0.0;
    for (int k = 0; k <= 1; ++k)
        for (std::uint32_t id : g.active_nodes) {
            scale = std::max(scale, std::abs(rs.tensor.comp[k][id]));
            gap = std::max(gap, std::abs(rs.tensor.comp[k][id] - r1.tensor.comp[k][id] -
                                         r2.tensor.comp[k][id]));
        }
    CHECK(gap < 1e-10 * std::max(1.0, scale));
}

TEST_CASE("end-to-end error is non-increasing under joint refinement") {
    auto run = [](int grid_n, int n_beta, int n_theta, int N) {
        DiscGrid g = make_disc_grid(grid_n);
        auto f = make_phantom_tensor(g, 1, PhantomKind::polynomial_bump);
        auto s = forward_of(g, f, zero_attenuation(g), n_beta, n_theta);
        PipelineConfig pc;
        pc.N = N;
        pc.error_radius = 0.7;
        return reconstruct(s, nullptr, 1, g, pc, &f).rel_l2_error;
    };
    double coarse = run(65, 128, 128, 24);
    double fine = run(129, 256, 256, 48);
    CAPTURE(coarse);
    CAPTURE(fine);
    CHECK(fine <= coarse);
}

TEST_CASE("stability ratio: zero phantom and exact scaling invariance") {
    DiscGrid g = make_disc_grid(65);
    auto f = make_phantom_tensor(g, 1, PhantomKind::polynomial_bump);
    auto s = forward_of(g, f, zero_attenuation(g), 96, 96);
    BoundaryTrace bt = preprocess(s, nullptr, 24);
    bool anomaly = false;
    double ratio = stability_ratio(g, f, bt, &anomaly);
    CHECK(ratio > 0.0);
    CHECK_FALSE(anomaly);

    SymmetricTensorField f2 = f;
    for (auto& c : f2.comp)
        for (double& v : c) v *= 2.0;
    MomentaSinogram s2 = s;
    for (auto& plane : s2.data)
        for (double& v : plane) v *= 2.0;
    BoundaryTrace bt2 = preprocess(s2, nullptr, 24);
    double ratio2 = stability_ratio(g, f2, bt2, &anomaly);
    CHECK(ratio2 == doctest::Approx(ratio).epsilon(1e-12));

    SymmetricTensorField z = make_phantom_tensor(g, 1, PhantomKind::zero);
    BoundaryTrace btz = preprocess(forward_of(g, z, zero_attenuation(g), 96, 96), nullptr, 24);
    CHECK(stability_ratio(g, z, btz, &anomaly) == 0.0);

    // nonzero field against zero data is flagged
    double bad = stability_ratio(g, f, btz, &anomaly);
    CHECK(anomaly);
    CHECK(std::isinf(bad));
}

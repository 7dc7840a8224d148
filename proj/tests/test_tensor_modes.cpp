#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "mrt/tensor_modes.hpp"
#include "support.hpp"

using namespace mrt;

namespace {
SymmetricTensorField unit_component(const DiscGrid& g, int m, int k) {
    SymmetricTensorField f;
    f.m = m;
    f.comp.assign(m + 1, Field(g.size(), 0.0));
    std::fill(f.comp[k].begin(), f.comp[k].end(), 1.0);
    return f;
}
} // namespace

TEST_CASE("m=1 Euler formula: (1,0) gives f1 = 1/2") {
    DiscGrid g = make_disc_grid(17);
    auto tv = components_to_modes(unit_component(g, 1, 0));
    std::size_t c = g.idx(8, 8);
    CHECK(tv.mode[1][c].real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tv.mode[1][c].imag() == doctest::Approx(0.0));
    CHECK(std::abs(tv.mode[0][c]) == 0.0); // parity
}

TEST_CASE("m=2: f11=1 gives f0=1/2, f2=1/4") {
    DiscGrid g = make_disc_grid(17);
    auto tv = components_to_modes(unit_component(g, 2, 0));
    std::size_t c = g.idx(8, 8);
    CHECK(tv.mode[0][c].real() == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(tv.mode[2][c].real() == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(std::abs(tv.mode[1][c]) == 0.0);
}

TEST_CASE("angle-sampling oracle agrees with the conversion matrix") {
    DiscGrid g = make_disc_grid(33);
    for (int m : {1, 2, 3, 4}) {
        auto f = mrt_test::random_tensor(g, m, 100 + m);
        auto tv = components_to_modes(f);
        for (std::size_t node : {g.idx(16, 16), g.idx(20, 14), g.idx(12, 19)}) {
            auto oracle = mrt_test::modes_by_angle_sampling(f, node);
            for (int n = 0; n <= m; ++n)
                CHECK(std::abs(tv.mode[n][node] - oracle[n]) < 1e-12);
        }
    }
}

TEST_CASE("round trip components -> modes -> components") {
    DiscGrid g = make_disc_grid(33);
    for (int m : {1, 2, 3, 4}) {
        auto f = mrt_test::random_tensor(g, m, 55 + m);
        auto back = modes_to_components(components_to_modes(f));
        for (int k = 0; k <= m; ++k)
            for (std::size_t i = 0; i < g.size(); ++i)
                CHECK(back.comp[k][i] == doctest::Approx(f.comp[k][i]).epsilon(1e-12));
    }
}

TEST_CASE("all-zero modes give the zero tensor") {
    DiscGrid g = make_disc_grid(17);
    TensorModeVector tv;
    tv.m = 2;
    tv.mode.assign(3, CField(g.size(), cplx(0, 0)));
    auto f = modes_to_components(tv);
    for (const auto& c : f.comp)
        for (double v : c) CHECK(v == 0.0);
}

TEST_CASE("m=1 inverse example: f1 = 1/2 gives components (1,0)") {
    DiscGrid g = make_disc_grid(17);
    TensorModeVector tv;
    tv.m = 1;
    tv.mode.assign(2, CField(g.size(), cplx(0, 0)));
    std::fill(tv.mode[1].begin(), tv.mode[1].end(), cplx(0.5, 0.0));
    auto f = modes_to_components(tv);
    CHECK(f.comp[0][0] == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(f.comp[1][0] == doctest::Approx(0.0));
}

TEST_CASE("parity violation is rejected") {
    DiscGrid g = make_disc_grid(17);
    TensorModeVector tv;
    tv.m = 2;
    tv.mode.assign(3, CField(g.size(), cplx(0, 0)));
    std::fill(tv.mode[2].begin(), tv.mode[2].end(), cplx(1.0, 0.0));
    std::fill(tv.mode[1].begin(), tv.mode[1].end(), cplx(0.1, 0.0)); // off parity
    CHECK_THROWS_AS(modes_to_components(tv), DataError);
}

TEST_CASE("tensor action examples") {
    DiscGrid g = make_disc_grid(17);
    SUBCASE("m=2 f11=1 at theta=0") {
        auto act = tensor_action(unit_component(g, 2, 0), 0.0);
        CHECK(act[0] == doctest::Approx(1.0));
    }
    SUBCASE("m=2 packed k=1 component at pi/4 gives 2 cos sin = 1") {
        auto act = tensor_action(unit_component(g, 2, 1), pi / 4);
        CHECK(act[0] == doctest::Approx(1.0).epsilon(1e-14));
    }
}

TEST_CASE("action matches mode synthesis at random angles") {
    DiscGrid g = make_disc_grid(33);
    auto f = mrt_test::random_tensor(g, 3, 77);
    auto tv = components_to_modes(f);
    auto r = mrt_test::rng(9);
    std::size_t node = g.idx(17, 15);
    for (int trial = 0; trial < 32; ++trial) {
        double theta = mrt_test::uniform(r, 0.0, 2 * pi);
        double direct = tensor_action(f, theta)[node];
        CHECK(std::abs(direct - action_from_modes(tv, node, theta)) < 1e-12);
    }
}

TEST_CASE("source sequence is annihilated by L^{m+1}") {
    DiscGrid g = make_disc_grid(33);
    for (int m : {1, 2, 3}) {
        auto f = mrt_test::random_tensor(g, m, 31 + m);
        auto F = source_sequence(components_to_modes(f), g, 20);
        auto shifted = left_shift(F, m + 1);
        CHECK(max_abs(shifted) == 0.0);
        // parity structure inside the first m+1 entries
        for (int p = 0; p <= m; ++p)
            if ((m - p) % 2 != 0) CHECK(plane_max_abs(F, p) == 0.0);
    }
}

#include <doctest.h>

#include <cmath>
#include <random>

#include "idseries/scalar_bounds.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace idseries;
using testing::throws_error;

TEST_SUITE("scalar_bounds") {

TEST_CASE("curve values") {
    CHECK(eval_curve(Curve::Q, 1.0) == doctest::Approx(2.0 * std::log(2.0) - 1.0).epsilon(1e-15));
    CHECK(eval_curve(Curve::B, 1.0) == doctest::Approx(0.375));
    CHECK(eval_curve(Curve::T, 1.0) == doctest::Approx(0.25));
    CHECK(curve_b(3.0) == doctest::Approx(2.25));
    CHECK(curve_t(3.0) == doctest::Approx(2.25));
    CHECK(curve_q(0.0) == 0.0);
}

TEST_CASE("Q small-argument series matches the direct formula") {
    for (double s : {1e-8, 1e-5, 1e-3, 0.01, 0.049}) {
        const double direct = (1 + s) * std::log1p(s) - s;
        CHECK(curve_q(s) == doctest::Approx(direct).epsilon(1e-6));
        CHECK(curve_q(s) > 0.0);
    }
}

TEST_CASE("Q >= B >= T") {
    for (int i = 1; i <= 5000; ++i) {
        const double s = 0.01 * i;
        CHECK(curve_q(s) >= curve_b(s));
        CHECK(curve_b(s) >= curve_t(s));
    }
}

TEST_CASE("tau values") {
    CHECK(tau(kBeta0, 1.0) == doctest::Approx(std::log(2.0) / kBeta0).epsilon(1e-15));
    CHECK(tau(kBeta0, 1000.0) == doctest::Approx(oracle::kTau1000).epsilon(1e-13));
    CHECK(std::abs(tau(kBeta0, 1.0 + 1e-6) - 1.794354) <= 1e-4);
    CHECK(std::abs(tau(kBeta0, 1.0 - 1e-6) - 1.794354) <= 1e-4);
    CHECK(throws_error([] { tau(0.5, 1.0); }, "scalar_bounds", ErrorCode::invalid_argument));
    CHECK(throws_error([] { tau(kBeta0, 0.0); }, "scalar_bounds", ErrorCode::invalid_argument));
}

TEST_CASE("tau continuity across s = 1") {
    for (double h : {1e-3, 3e-4, 1.01e-4, 9e-5, 1e-6}) {
        CHECK(std::abs(tau(kBeta0, 1.0 + h) - kTauAtOne) <= 1e-3);
        CHECK(std::abs(tau(kBeta0, 1.0 - h) - kTauAtOne) <= 1e-3);
    }
}

TEST_CASE("tau stays in (1, 2) and decreases") {
    double prev = 2.0;
    for (int i = -70; i <= 60; ++i) {
        const double s = std::pow(10.0, 0.1 * i);
        if (std::abs(s - 1.0) < 1e-12) continue;
        const double v = tau(kBeta0, s);
        CHECK(v > 1.0);
        CHECK(v < 2.0);
        CHECK(v <= prev + 1e-12);
        prev = v;
    }
}

TEST_CASE("partition construction") {
    const PartitionBound h = PartitionBound::two_piece(1000.0);
    CHECK(h.c() == 1000.0);
    CHECK(h(1.0) == doctest::Approx(kBeta0));
    CHECK(h(0.5) == doctest::Approx(kBeta0 * 0.25));
    CHECK(eval_hp(h, 2.0) == doctest::Approx(oracle::kH1000At2).epsilon(1e-13));
    CHECK(h(1000.0) == doctest::Approx(curve_q(1000.0)).epsilon(1e-13));
    CHECK(throws_error([&] { h(1000.5); }, "scalar_bounds", ErrorCode::range));
    CHECK(throws_error([&] { h(0.0); }, "scalar_bounds", ErrorCode::range));
    CHECK(throws_error([] { build_partition_bound({0.5, 2.0}); }, "scalar_bounds", ErrorCode::invalid_argument));
    CHECK(throws_error([] { build_partition_bound({1.0, 3.0, 2.0}); }, "scalar_bounds", ErrorCode::invalid_argument));
    CHECK(throws_error([] { build_partition_bound({1.0}); }, "scalar_bounds", ErrorCode::invalid_argument));
}

TEST_CASE("half-open branches at partition points") {
    const PartitionBound p = build_partition_bound({1.0, 15.0, 25.0, 40.0, 50.0});
    const auto tau_n = p.exponents();
    CHECK(p(15.0) == doctest::Approx(kBeta0 * std::pow(15.0, tau_n[0])).epsilon(1e-15));
    CHECK(p(std::nextafter(15.0, 16.0)) ==
          doctest::Approx(kBeta0 * std::pow(std::nextafter(15.0, 16.0), tau_n[1])).epsilon(1e-15));
    for (double pt : p.points()) CHECK(p(pt) == doctest::Approx(curve_q(pt)).epsilon(1e-12));
}

TEST_CASE("Q >= H_P >= H_c on dense grids") {
    const PartitionBound p = build_partition_bound({1.0, 15.0, 25.0, 40.0, 50.0});
    const PartitionBound h = PartitionBound::two_piece(50.0);
    for (int i = 1; i <= 50000; ++i) {
        const double s = 0.001 * i;
        const double q = curve_q(s);
        CHECK(q - p(s) >= -1e-12 * std::max(1.0, q));
        CHECK(p(s) - h(s) >= -1e-12 * std::max(1.0, q));
    }
}

TEST_CASE("crossing of H_c and B") {
    const Crossing x = bh_crossing(1000.0);
    CHECK(x.s_star == doctest::Approx(oracle::kCrossS).epsilon(1e-9));
    CHECK(x.value == doctest::Approx(oracle::kCrossValue).epsilon(1e-9));
    CHECK(std::abs(x.s_star - 0.8831) <= 1e-3);
    CHECK(std::abs(x.value - 0.3013) <= 1e-3);
    const PartitionBound h = PartitionBound::two_piece(1000.0);
    for (double s = 0.01; s < x.s_star - 1e-6; s += 0.001) CHECK(curve_b(s) > h(s));
}

TEST_CASE("H_c above B beyond the crossing for moderate c") {
    const Crossing x = bh_crossing(3.0);
    const PartitionBound h = PartitionBound::two_piece(3.0);
    for (double s = x.s_star + 1e-4; s < 3.0; s += 1e-3) CHECK(h(s) > curve_b(s));
    CHECK(bh_crossings(3.0).size() == 1);
}

TEST_CASE("large c has further crossings") {
    const std::vector<Crossing> xs = bh_crossings(1000.0);
    REQUIRE(xs.size() == 3);
    CHECK(xs[0].s_star == doctest::Approx(bh_crossing(1000.0).s_star).epsilon(1e-10));
    CHECK(xs[1].s_star == doctest::Approx(1.0893214538).epsilon(1e-8));
    CHECK(xs[2].s_star == doctest::Approx(22.62).epsilon(1e-3));
}

}

#include <doctest.h>

#include <cmath>
#include <limits>

#include "idseries/scalar_bounds.hpp"
#include "idseries/tail_bounds.hpp"
#include "oracle_values.hpp"
#include "test_support.hpp"

using namespace idseries;
using testing::throws_error;

namespace {

// sigma2 + V = 1 and R = 1 with both parts present.
IdModel mixed_unit_model() { return IdModel(0.5, LevyMeasure({{1.0, 0.25}, {-0.5, 1.0}})); }

}  // namespace

TEST_SUITE("tail_bounds") {

TEST_CASE("exact bound, Gaussian reduction") {
    const IdModel g = testing::gaussian_model();
    CHECK(tail_exact(g, {2, 1.0}, 2.0) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(1e-10));
    // The documented example value uses prefactor 2 (d = 1).
    CHECK(tail_exact(g, {1, 1.0}, 2.0) == doctest::Approx(0.270671).epsilon(1e-6));
    CHECK(lambda_max_tail_exact(g, {2, 1.0}, 2.0) == doctest::Approx(2.0 * std::exp(-2.0)).epsilon(1e-10));
    CHECK(tail_exact(g, {3, 2.0}, 0.0) == 6.0);
    CHECK(tail_exact(g, {3, 2.0}, 1e-9) == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("exact bound, unit Poisson equals Bennett") {
    const IdModel p = testing::poisson_model();
    for (double rho : {0.5, 1.0, 3.0})
        for (int i = 1; i <= 20; ++i) {
            const double t = 0.5 * i * rho;
            CHECK(tail_exact(p, {4, rho}, t) == doctest::Approx(tail_bennett(p, {4, rho}, t)).epsilon(1e-8));
        }
}

TEST_CASE("exact bound against a high-precision oracle") {
    const IdModel m(0.3, testing::two_atom_model().measure());
    CHECK(tail_exact(m, {3, 1.7}, 2.5) == doctest::Approx(oracle::kTailExactTwoAtom).epsilon(1e-9));
}

TEST_CASE("Bennett") {
    const IdModel m = mixed_unit_model();
    CHECK(tail_bennett(m, {1, 1.0}, 3.0) == doctest::Approx(oracle::kBennettExample).epsilon(1e-12));
    CHECK(tail_bennett(m, {2, 1.0}, 3.0) / 2.0 == doctest::Approx(oracle::kBennettExample).epsilon(1e-12));
    CHECK(tail_bennett(m, {2, 1.0}, 0.0) == 4.0);
    CHECK(tail_bennett(testing::gaussian_model(), {1, 1.0}, 2.0) == doctest::Approx(0.270671).epsilon(1e-6));
}

TEST_CASE("Bernstein") {
    const IdModel m = mixed_unit_model();
    const BernsteinBounds b = tail_bernstein(m, {1, 1.0}, 3.0);
    CHECK(b.smooth == doctest::Approx(oracle::kBernsteinSmoothExample).epsilon(1e-12));
    // Rt = 3 rho v is the seam of the piecewise form.
    CHECK(b.piecewise == doctest::Approx(2.0 * std::exp(-9.0 / 4.0)).epsilon(1e-12));
    const BernsteinBounds below = tail_bernstein(m, {1, 1.0}, 3.0 - 1e-9);
    CHECK(below.piecewise == doctest::Approx(b.piecewise).epsilon(1e-8));
    const BernsteinBounds zero = tail_bernstein(m, {2, 1.0}, 0.0);
    CHECK(zero.smooth == 4.0);
    CHECK(zero.piecewise == 4.0);
}

TEST_CASE("H_c bound") {
    // d = 2, R = 4, rho (sigma2 + V) = 4: rho = 4 for a unit-variance model with R = 4.
    const IdModel m(0.0, LevyMeasure({{4.0, 1.0 / 16.0}}));
    const SeriesShape shape{1, 4.0};
    CHECK(tail_hc(m, shape, 1.0, 1000.0) == doctest::Approx(oracle::kHcFig5).epsilon(1e-12));
    // seam at t = rho v / R
    const double seam = 1.0;
    CHECK(tail_hc(m, shape, seam, 1000.0) == doctest::Approx(2.0 * std::exp(-kBeta0 / 4.0)).epsilon(1e-12));
    CHECK(tail_hc(m, shape, seam + 1e-9, 1000.0) == doctest::Approx(tail_hc(m, shape, seam, 1000.0)).epsilon(1e-8));
    CHECK(throws_error([&] { tail_hc(m, shape, 1001.0, 1000.0); }, "tail_bounds", ErrorCode::range));
    CHECK(throws_error([&] { tail_hc(m, shape, 1.0, 1.0); }, "tail_bounds", ErrorCode::invalid_argument));
}

TEST_CASE("beta0 bound") {
    const IdModel m = mixed_unit_model();
    CHECK(tail_beta0(m, {1, 1.0}, 2.0) == doctest::Approx(oracle::kBeta0Example).epsilon(1e-12));
    CHECK(tail_beta0(m, {1, 1.0}, 1.0) == doctest::Approx(2.0 * std::exp(-kBeta0)).epsilon(1e-12));
    CHECK(tail_beta0(m, {1, 1.0}, 1.0 + 1e-9) == doctest::Approx(2.0 * std::exp(-kBeta0)).epsilon(1e-8));
    CHECK(tail_beta0(m, {2, 1.0}, 1e-12) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("H_c is below the beta0 bound beyond the seam") {
    const IdModel m = mixed_unit_model();
    for (double c : {3.0, 50.0, 1000.0}) {
        for (int i = 1; i <= 400; ++i) {
            const double t = 1.0 + (c - 1.0) * i / 400.0;
            CHECK(tail_hc(m, {2, 1.0}, t, c) <= tail_beta0(m, {2, 1.0}, t) * (1 + 1e-12));
        }
    }
}

TEST_CASE("ordering and monotonicity") {
    for (const IdModel& m : {mixed_unit_model(), testing::poisson_model(), testing::two_atom_model()}) {
        const SeriesShape shape{3, 1.3};
        double prev[5] = {6, 6, 6, 6, 6};
        for (int i = 1; i <= 300; ++i) {
            const double t = 0.05 * i;
            const BoundReport r = bound_report(m, shape, t, 1000.0);
            CHECK(r.bennett <= r.bernstein_smooth * (1 + 1e-12));
            CHECK(r.bernstein_smooth <= r.bernstein_piecewise * (1 + 1e-12));
            const double cur[5] = {r.exact, r.bennett, r.bernstein_smooth, r.bernstein_piecewise, r.beta0};
            for (int k = 0; k < 5; ++k) {
                CHECK(cur[k] <= prev[k] * (1 + 1e-12));
                prev[k] = cur[k];
            }
        }
    }
}

TEST_CASE("report leaves H_c empty outside its domain") {
    const IdModel m = mixed_unit_model();
    const BoundReport r = bound_report(m, {2, 1.0}, 5.0, 3.0);
    CHECK(!r.hc.has_value());
    CHECK(bound_report(m, {2, 1.0}, 2.0, 3.0).hc.has_value());
    CHECK(scaled_deviation(m, {2, 1.0}, 5.0) == doctest::Approx(5.0));
}

TEST_CASE("expectation bounds") {
    const IdModel m = mixed_unit_model();
    CHECK(expectation_bound(m, {2, 1.0}, ExpectationVariant::statement) ==
          doctest::Approx(oracle::kExpectationStatement).epsilon(1e-13));
    CHECK(expectation_bound(m, {2, 1.0}, ExpectationVariant::proof) ==
          doctest::Approx(oracle::kExpectationProof).epsilon(1e-13));
    CHECK(expectation_bound(testing::gaussian_model(), {2, 1.0}, ExpectationVariant::proof) ==
          std::numeric_limits<double>::infinity());
}

TEST_CASE("quantiles") {
    const IdModel m = mixed_unit_model();
    CHECK(lambda_max_quantile(m, {2, 1.0}, 0.05, QuantileForm::bernstein) ==
          doctest::Approx(oracle::kQuantileBernstein).epsilon(1e-13));
    CHECK(lambda_max_quantile(m, {2, 1.0}, 0.05, QuantileForm::hc, 1000.0) ==
          doctest::Approx(oracle::kQuantileHc).epsilon(1e-12));
    const SeriesShape big{1000000, 1.0};
    CHECK(lambda_max_quantile(m, big, 0.05, QuantileForm::hc, 1000.0) <
          lambda_max_quantile(m, big, 0.05, QuantileForm::bernstein));
    CHECK(throws_error([&] { lambda_max_quantile(m, {2, 1.0}, 1.0, QuantileForm::bernstein); }, "tail_bounds",
                       ErrorCode::invalid_argument));
    CHECK(throws_error([] { lambda_max_quantile(testing::gaussian_model(), {2, 1.0}, 0.1, QuantileForm::hc); },
                       "tail_bounds", ErrorCode::invalid_argument));
}

TEST_CASE("degenerate series") {
    const IdModel m = mixed_unit_model();
    CHECK(tail_exact(m, {2, 0.0}, 1.0) == 0.0);
    CHECK(tail_bennett(m, {2, 0.0}, 1.0) == 0.0);
    CHECK(throws_error([&] { tail_exact(m, {0, 1.0}, 1.0); }, "tail_bounds", ErrorCode::invalid_argument));
    CHECK(throws_error([&] { tail_exact(m, {2, 1.0}, -1.0); }, "tail_bounds", ErrorCode::invalid_argument));
}

}

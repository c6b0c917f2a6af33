#include "doctest.h"

#include "oscispline/error.hpp"
#include "oscispline/modulus.hpp"
#include "oscispline/oracle.hpp"
#include "oscispline/oscillate.hpp"

#include <cmath>

using namespace oscispline;

namespace {

WeightFunction half(const std::string& spec) { return parse_weight(spec, Domain::half_line()); }
WeightFunction seg(const std::string& spec, double A) { return parse_weight(spec, Domain::segment(A)); }

}  // namespace

TEST_CASE("brute force finds the 1/4 segment spline")
{
    const double A = std::log(4.0);
    auto f = seg("const:1", A);
    auto b = brute_oscillation(1, 1, Domain::segment(A), 1.0, f, f, seg("exp:0,1,1", A));
    CHECK(b.C == doctest::Approx(0.25).epsilon(1e-6));
    CHECK(b.knots[0] == doctest::Approx(std::log(2.0)).epsilon(1e-5));
    CHECK(b.residual < 1e-5);
}

TEST_CASE("brute force on the truncated half-line")
{
    auto f = half("const:1");
    auto b = brute_oscillation(1, 1, Domain::half_line(), 1.0, f, f, half("exp:0,1,1"));
    CHECK(b.C == doctest::Approx(1.0 / 3.0).epsilon(1e-5));
    CHECK(b.knots[0] == doctest::Approx(std::log(3.0)).epsilon(1e-4));
}

TEST_CASE("brute force agrees with the solver")
{
    auto g = half("exp:0,1,1");
    auto f = half("const:1");
    for (int r = 1; r <= 2; ++r)
        for (int n = 1; n <= 2; ++n) {
            CAPTURE(r);
            CAPTURE(n);
            const double A = 4.0;
            auto sol = oscillate_segment(r, n, A, seg("const:1", A), seg("const:1", A), seg("exp:0,1,1", A));
            auto b = brute_oscillation(r, n, Domain::segment(A), 1.0, seg("const:1", A), seg("const:1", A),
                                       seg("exp:0,1,1", A));
            CHECK(std::abs(b.C - sol.C) < 1e-4);

            auto hs = oscillate_halfline(r, n, 1.0, f, f, g);
            auto hb = brute_oscillation(r, n, Domain::half_line(), 1.0, f, f, g);
            CHECK(std::abs(hb.C - hs.C) < 1e-4);
        }
}

TEST_CASE("finer knot grids do not move the optimum far")
{
    auto f = half("const:1");
    auto g = half("exp:0,1,1");
    BruteForceConfig coarse;
    coarse.knot_grid_resolution = 16;
    coarse.zoom_levels = 0;
    BruteForceConfig fine = coarse;
    fine.knot_grid_resolution = 64;
    auto a = brute_oscillation(2, 1, Domain::half_line(), 1.0, f, f, g, coarse);
    auto b = brute_oscillation(2, 1, Domain::half_line(), 1.0, f, f, g, fine);
    double exact = compute_Cn(2, 1, 1.0, f, f, g);
    CHECK(std::abs(b.C - exact) <= std::abs(a.C - exact) + 1e-9);
}

TEST_CASE("omega lower bound")
{
    auto f = half("const:1");
    auto g = half("exp:0,1,1");
    SUBCASE("below the modulus")
    {
        for (double d : {0.1, 0.3}) {
            double lb = brute_omega_lower_bound(2, 1, d, f, g);
            double w = omega(2, 1, d, f, g).omega_value;
            CHECK(lb <= w + 1e-9);
            CHECK(lb >= w - 0.02);
        }
    }
    SUBCASE("saturated")
    {
        CHECK(brute_omega_lower_bound(2, 1, 0.7, f, g) == doctest::Approx(1.0).epsilon(1e-9));
    }
    SUBCASE("gap shrinks with resolution")
    {
        BruteForceConfig k8, k32;
        k8.knot_grid_resolution = 16;
        k32.knot_grid_resolution = 48;
        CHECK(brute_omega_lower_bound(2, 1, 0.3, f, g, k32) >= brute_omega_lower_bound(2, 1, 0.3, f, g, k8) - 1e-9);
    }
}

TEST_CASE("truncation point")
{
    auto g = half("exp:0,1,1");
    double T = oracle_truncation_point(g, 2, 1e-8);
    // both tail moments equal e^-T; the previous rung must still fail
    CHECK(std::exp(-T) < 1e-8);
    CHECK(std::exp(-T / 1.25) >= 1e-8);
}

TEST_CASE("config validation")
{
    auto f = half("const:1");
    auto g = half("exp:0,1,1");
    BruteForceConfig bad;
    bad.knot_grid_resolution = 4;
    CHECK_THROWS_AS(brute_oscillation(1, 1, Domain::half_line(), 1.0, f, f, g, bad), Error);
    CHECK_THROWS_AS(brute_oscillation(1, 4, Domain::half_line(), 1.0, f, f, g), Error);
}

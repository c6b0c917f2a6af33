#include "doctest.h"
#include "support.hpp"

#include "oscispline/error.hpp"
#include "oscispline/zerofit.hpp"

#include <cmath>
#include <random>

using namespace oscispline;

namespace {

GCalculus seg_exp(int r, double A) { return build_calculus(parse_weight("exp:0,1,1", Domain::segment(A)), r); }

}  // namespace

TEST_CASE("r = 1 on [0, ln 4] with a zero at the origin")
{
    ZeroFitProblem p{seg_exp(1, std::log(4.0)), {0.0}, {}, std::nullopt};
    auto res = fit_knots(p);
    REQUIRE(res.spline.knot_count() == 1);
    CHECK(res.spline.knots()[0] == doctest::Approx(std::log(8.0 / 5.0)).epsilon(1e-12));
    CHECK(std::abs(res.spline.eval(0, 0.0)) < 1e-12);
    CHECK(res.residual < 1e-12);
    // sign normalization with s_1 = 0: positive on (s_1, s_2) = (0, A)
    CHECK(res.spline.eval(0, 0.2) > 0.0);
}

TEST_CASE("r = 1 knot location in closed form")
{
    // e^-t = (e^-s + e^-A) / 2
    const double A = 3.0;
    for (double s : {0.1, 1.0, 2.0, A - 1e-3}) {
        ZeroFitProblem p{seg_exp(1, A), {s}, {}, std::nullopt};
        auto res = fit_knots(p);
        double want = -std::log(0.5 * (std::exp(-s) + std::exp(-A)));
        CHECK(res.spline.knots()[0] == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("sensitivity in closed form")
{
    // dt/ds = e^-s / (2 e^-t)
    const double A = 3.0, s = 1.2;
    ZeroFitProblem p{seg_exp(1, A), {s}, {}, std::nullopt};
    auto res = fit_knots(p);
    double t = res.spline.knots()[0];
    double want = std::exp(-s) / (2.0 * std::exp(-t));
    auto fd = knot_sensitivity(p, res);
    auto im = knot_sensitivity_implicit(p, res);
    CHECK(fd(0, 0) == doctest::Approx(want).epsilon(1e-7));
    CHECK(im(0, 0) == doctest::Approx(want).epsilon(1e-10));
}

TEST_CASE("implicit and finite-difference sensitivities agree for r = 3")
{
    ZeroFitProblem p{seg_exp(3, 6.0), {0.8, 2.0, 3.5}, {}, std::nullopt};
    auto res = fit_knots(p);
    auto fd = knot_sensitivity(p, res);
    auto im = knot_sensitivity_implicit(p, res);
    CHECK((fd - im).cwiseAbs().maxCoeff() < 1e-5 * std::max(1.0, im.cwiseAbs().maxCoeff()));
}

TEST_CASE("fitted splines vanish at the zeros and change sign there")
{
    for (int r = 1; r <= 4; ++r)
        for (int n = 1; n <= 4; ++n) {
            const double A = 6.0;
            std::vector<double> zeros;
            for (int i = 1; i <= n; ++i)
                zeros.push_back(A * i / (n + 1.5));
            ZeroFitProblem p{seg_exp(r, A), zeros, {}, std::nullopt};
            auto res = fit_knots(p);
            CAPTURE(r);
            CAPTURE(n);
            CHECK(res.spline.knot_count() == n);
            double scale = p.calc.Q(r, 0.0);
            for (double s : zeros) {
                CHECK(std::abs(res.spline.eval(0, s)) < 1e-9 * scale);
                CHECK(res.spline.eval(0, s - 1e-4) * res.spline.eval(0, s + 1e-4) < 0.0);
            }
            CHECK(res.spline.eval(0, 0.5 * zeros[0]) > 0.0);
        }
}

TEST_CASE("solution is unique under restarts")
{
    ZeroFitProblem p{seg_exp(3, 6.0), {0.9, 2.2, 3.9}, {}, std::nullopt};
    auto base = fit_knots(p);
    std::mt19937 rng(3);
    std::normal_distribution<double> nd(0.0, 0.05);
    for (int trial = 0; trial < 5; ++trial) {
        auto start = base.spline.knots();
        for (double& t : start)
            t += nd(rng);
        std::sort(start.begin(), start.end());
        ZeroFitProblem q = p;
        q.initial_knots = start;
        auto res = fit_knots(q);
        for (int k = 0; k < 3; ++k)
            CHECK(res.spline.knots()[k] == doctest::Approx(base.spline.knots()[k]).epsilon(1e-8));
    }
}

TEST_CASE("half-line zero fitting")
{
    auto calc = build_calculus(parse_weight("exp:0,1,1", Domain::half_line()), 2);
    ZeroFitProblem p{calc, {0.5, 2.0}, {}, std::nullopt};
    auto res = fit_knots(p);
    CHECK(res.spline.knot_count() == 2);
    CHECK(std::abs(res.spline.eval(0, 0.5)) < 1e-9);
    CHECK(std::abs(res.spline.eval(0, 2.0)) < 1e-9);
    CHECK(res.spline.limit_value() == 0.0);
}

TEST_CASE("errors")
{
    auto kind = [](ZeroFitProblem p) {
        try {
            fit_knots(p);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvalidArgument;
    };
    CHECK(kind({seg_exp(2, 3.0), {1.0, 1.0 + 1e-14}, {}, std::nullopt}) == ErrorKind::ZerosTooClose);
    CHECK(kind({seg_exp(2, 3.0), {1.0, 4.0}, {}, std::nullopt}) == ErrorKind::OutOfDomain);
}

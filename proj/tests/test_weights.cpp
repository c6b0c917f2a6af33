#include "doctest.h"
#include "support.hpp"

#include "oscispline/error.hpp"
#include "oscispline/weights.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

using namespace oscispline;

namespace {

WeightFunction half(const std::string& spec) { return parse_weight(spec, Domain::half_line()); }

ErrorKind kind_of(const std::function<void()>& fn)
{
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("no exception");
    return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("families evaluate their formulas")
{
    auto c = half("const:2");
    CHECK(c(0.0) == 2.0);
    CHECK(c(50.0) == 2.0);
    CHECK(*c.limit_at_infinity() == 2.0);

    auto e = half("exp:1,2,0.5");
    CHECK(e(0.0) == doctest::Approx(3.0));
    CHECK(e(2.0) == doctest::Approx(1.0 + 2.0 * std::exp(-1.0)));
    CHECK(*e.limit_at_infinity() == 1.0);
    CHECK(e.monotone_nonincreasing());

    auto p = half("power:0,1,3");
    CHECK(p(1.0) == doctest::Approx(0.125));
    CHECK(*p.limit_at_infinity() == 0.0);
}

TEST_CASE("construction errors")
{
    CHECK(kind_of([] { half("const:-1"); }) == ErrorKind::NonPositive);
    CHECK(kind_of([] { half("exp:0,-1,1"); }) == ErrorKind::NonPositive);
    CHECK(kind_of([] { half("exp:0,1,-1"); }) == ErrorKind::MissingLimit);
    CHECK(kind_of([] { half("spline:1"); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([] { half("exp:1,2"); }) == ErrorKind::InvalidArgument);
    // a growing exponential is fine on a bounded segment
    auto grow = parse_weight("exp:0,1,-1", Domain::segment(2.0));
    CHECK(grow(2.0) == doctest::Approx(std::exp(2.0)));
    CHECK_FALSE(grow.monotone_nonincreasing());
}

TEST_CASE("shift and scale stay in the family")
{
    auto e = half("exp:1,2,1");
    auto s = e.shifted(-0.5);
    auto l = e.scaled(3.0);
    for (double t : {0.0, 0.7, 4.0}) {
        CHECK(s(t) == doctest::Approx(e(t) - 0.5));
        CHECK(l(t) == doctest::Approx(3.0 * e(t)));
    }
    CHECK(s.describe().rfind("exp:", 0) == 0);
    CHECK(*s.limit_at_infinity() == doctest::Approx(0.5));
}

TEST_CASE("tabulated weights keep monotone data monotone")
{
    TabulatedFamily tab;
    tab.t = {0.0, 1.0, 2.0, 3.0, 5.0};
    tab.w = {4.0, 3.9, 1.0, 0.9, 0.9};
    auto w = make_weight(tab, Domain::half_line());
    CHECK(w.is_tabulated());
    CHECK(w.monotone_nonincreasing());
    double prev = w(0.0);
    for (double t = 0.0; t <= 6.0; t += 0.01) {
        CHECK(w(t) <= prev + 1e-14);
        prev = w(t);
    }
    for (std::size_t i = 0; i < tab.t.size(); ++i)
        CHECK(w(tab.t[i]) == doctest::Approx(tab.w[i]));
    CHECK(w(100.0) == doctest::Approx(0.9));
}

TEST_CASE("tabulated weights load from csv")
{
    std::string path = "weights_test_table.csv";
    {
        std::ofstream out(path);
        out << "t,w\n0,2\n1,1.5\n2,1\n";
    }
    auto tab = load_tabulated_csv(path);
    std::remove(path.c_str());
    REQUIRE(tab.t.size() == 3);
    CHECK(tab.w[1] == 1.5);
}

TEST_CASE("assumptions for the exponential model case")
{
    auto f = half("const:1");
    auto g = half("exp:0,1,1");
    for (int r = 1; r <= 6; ++r) {
        auto rep = check_assumptions(f, f, g, r);
        CHECK(rep.all_pass());
        CHECK(rep.items().size() == 7);
    }
}

TEST_CASE("assumption failures are reported individually")
{
    auto one = half("const:1");
    SUBCASE("non-integrable g")
    {
        auto rep = check_assumptions(one, one, half("power:0,1,1"), 2);
        CHECK_FALSE(rep.g_integrable.pass);
        CHECK_FALSE(rep.all_pass());
    }
    SUBCASE("tail constants need a fast enough decay")
    {
        auto rep = check_assumptions(one, one, half("power:0,1,2.5"), 3);
        CHECK(rep.g_integrable.pass);
        CHECK_FALSE(rep.tail_constants.pass);
    }
    SUBCASE("envelope vanishing at infinity")
    {
        auto rep = check_assumptions(half("exp:0,1,1"), one, half("exp:0,1,1"), 2);
        CHECK_FALSE(rep.limit_positive.pass);
    }
    SUBCASE("increasing g")
    {
        TabulatedFamily tab{{0.0, 1.0, 2.0}, {0.5, 1.0, 0.5}};
        auto rep = check_assumptions(one, one, make_weight(tab, Domain::half_line()), 1);
        CHECK_FALSE(rep.monotonicity.pass);
    }
}

TEST_CASE("weighted norm examples")
{
    auto f = half("const:1");
    auto fp = half("exp:1,1,1");
    auto fm = half("const:2");
    NormOptions o;
    o.limit = 0.5;
    o.tail_bound = [](double t) { return std::exp(-t); };
    CHECK(weighted_norm([](double t) { return 0.5 - std::exp(-t); }, f, f, o) == doctest::Approx(0.5).epsilon(1e-10));
    // x = f+ and x = -f- both have norm 1
    NormOptions plus;
    plus.limit = 1.0;
    plus.tail_bound = [](double t) { return std::exp(-t); };
    CHECK(weighted_norm([&](double t) { return fp(t); }, fm, fp, plus) == doctest::Approx(1.0).epsilon(1e-10));
    NormOptions minus;
    minus.limit = -2.0;
    CHECK(weighted_norm([&](double t) { return -fm(t); }, fm, fp, minus) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(weighted_norm([](double) { return 0.0; }, f, f, NormOptions{.limit = 0.0}) == 0.0);
}

TEST_CASE("weighted norm is positively homogeneous and agrees with a dense grid")
{
    auto fm = half("exp:0.5,1,2");
    auto fp = half("const:1.5");
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 10; ++trial) {
        double a = u(rng), b = u(rng), c = u(rng);
        auto x = [=](double t) { return a + b * std::exp(-t) * std::cos(3.0 * c * t); };
        NormOptions o;
        o.limit = a;
        o.tail_bound = [=](double t) { return std::abs(b) * std::exp(-t); };
        double n1 = weighted_norm(x, fm, fp, o);
        double lambda = 0.5 + trial;
        NormOptions ol = o;
        ol.limit = lambda * a;
        ol.tail_bound = [=](double t) { return lambda * std::abs(b) * std::exp(-t); };
        double n2 = weighted_norm([&](double t) { return lambda * x(t); }, fm, fp, ol);
        CHECK(n2 == doctest::Approx(lambda * n1).epsilon(1e-9));

        double brute = std::max(a, 0.0) / 1.5 + std::max(-a, 0.0) / 0.5;
        for (double t : testsupport::linspace(0.0, 40.0, 40001)) {
            double v = x(t);
            brute = std::max(brute, std::max(v, 0.0) / fp(t) + std::max(-v, 0.0) / fm(t));
        }
        CHECK(n1 >= brute - 1e-12);
        CHECK(n1 <= brute + 1e-6);
    }
}

TEST_CASE("overflow of x is reported")
{
    auto f = half("const:1");
    CHECK(kind_of([&] { weighted_norm([](double t) { return std::exp(t * t); }, f, f); }) == ErrorKind::NotFinite);
}

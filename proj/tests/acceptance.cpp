// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "oscispline/calculus.hpp"
#include "oscispline/error.hpp"
#include "oscispline/modulus.hpp"
#include "oscispline/oracle.hpp"
#include "oscispline/oscillate.hpp"
#include "oscispline/zerofit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

using namespace oscispline;

namespace {

WeightFunction half(const std::string& spec) { return parse_weight(spec, Domain::half_line()); }
WeightFunction seg(const std::string& spec, double A) { return parse_weight(spec, Domain::segment(A)); }

std::vector<double> linspace(double a, double b, int n)
{
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i)
        v[i] = a + (b - a) * i / (n - 1);
    return v;
}

// Every spline produced by the suite, re-checked by criterion 12.
std::vector<PerfectGSpline> produced;

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void report(int id, const char* title, const std::function<Outcome()>& body)
{
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass)
        ++failures;
    std::printf("%s criterion %d: %s (%s)\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0)
{
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// Touch, containment and zero-ordering errors of one solution.
struct OscCheck {
    double touch = 0.0, contain = 0.0;
    bool ordering = true, count = true;
};

OscCheck inspect(const OscillationSolution& s, int n, const WeightFunction& f, double end)
{
    OscCheck c;
    const auto& G = s.spline;
    c.count = G.knot_count() == n && static_cast<int>(s.oscillation_points.size()) == n + 1;
    for (std::size_t i = 0; i < s.oscillation_points.size(); ++i) {
        double t = s.oscillation_points[i];
        double want = (i % 2 == 0 ? 1.0 : -1.0) * s.C * f(t);
        c.touch = std::max(c.touch, std::abs(G.eval(0, t) - want) / s.C);
    }
    for (double t : linspace(0.0, end, 4096))
        c.contain = std::max(c.contain, (std::abs(G.eval(0, t)) - s.C * f(t)) / s.C);
    if (G.order() >= 2) {
        auto zeros = sign_changes_and_zeros(G, 1, 0.0, end);
        const auto& knots = G.knots();
        for (std::size_t k = 0; k < zeros.size() && k < knots.size(); ++k)
            if (knots[k] < zeros[k].t - 1e-9)
                c.ordering = false;
    }
    return c;
}

}  // namespace

int main()
{
    const auto one = half("const:1");
    const auto gexp = half("exp:0,1,1");

    report(1, "exponential calculus", [&] {
        auto calc = build_calculus(gexp, 4);
        double a_err = 0.0, p_err = 0.0;
        for (double a : calc.tail_constants())
            a_err = std::max(a_err, std::abs(a - 1.0));
        for (int k = 1; k <= 4; ++k)
            for (double t : linspace(0.0, 10.0, 1001))
                p_err = std::max(p_err, std::abs(eval_Pk(calc, k, t) - std::pow(-1.0, k) * std::exp(-t)));
        bool ok = calc.tail_constants().size() == 4 && a_err < 1e-12 && p_err < 1e-8;
        return Outcome{ok, fmt("max |A_k - 1| = %.2e, max |P_k - (-1)^k e^-t| = %.2e", a_err, p_err)};
    });

    report(2, "C_0 exactness", [&] {
        double worst = 0.0, touch = 0.0;
        for (int r = 1; r <= 4; ++r) {
            auto c = compute_C0(r, one, one, gexp);
            worst = std::max(worst, std::abs(c.C0 - 0.5));
            auto W = make_halfline_spline(r, {}, 1, c.a_star, build_calculus(gexp, r));
            produced.push_back(W);
            touch = std::max(touch, std::abs(W.eval(0, c.touch_plus) - c.C0));
            touch = std::max(touch, std::abs(W.eval(0, c.touch_minus) + c.C0));
        }
        return Outcome{worst < 1e-8 && touch < 1e-8, fmt("max |C_0 - 0.5| = %.2e, touch error %.2e", worst, touch)};
    });

    report(3, "C_1 closed form for r = 1", [&] {
        double cerr = 0.0, kerr = 0.0;
        for (double a : {0.5, 1.0, 2.0, 4.0}) {
            auto s = oscillate_halfline(1, 1, a, one, one, gexp);
            produced.push_back(s.spline);
            cerr = std::max(cerr, std::abs(s.C - (1 + a) / (2 * (2 + a))));
            kerr = std::max(kerr, std::abs(s.spline.knots()[0] - std::log(2 + a)));
        }
        return Outcome{cerr < 1e-6 && kerr < 1e-6, fmt("C error %.2e, knot error %.2e", cerr, kerr)};
    });

    report(4, "zerofit on [0, ln 4]", [&] {
        const double A = std::log(4.0);
        ZeroFitProblem p{build_calculus(seg("exp:0,1,1", A), 1), {0.0}, {}, std::nullopt};
        auto res = fit_knots(p);
        produced.push_back(res.spline);
        double kerr = std::abs(res.spline.knots()[0] - std::log(8.0 / 5.0));
        double g0 = std::abs(res.spline.eval(0, 0.0));
        return Outcome{res.spline.knot_count() == 1 && kerr < 1e-8 && g0 < 1e-9,
                       fmt("knot error %.2e, |G(0)| = %.2e", kerr, g0)};
    });

    report(5, "equioscillation property suite", [&] {
        double touch = 0.0, contain = 0.0;
        bool ordering = true, count = true;
        const double A = 5.0;
        for (int r = 1; r <= 3; ++r)
            for (int n = 1; n <= 3; ++n) {
                auto h = oscillate_halfline(r, n, 1.0, one, one, gexp);
                auto s = oscillate_segment(r, n, A, seg("const:1", A), seg("const:1", A), seg("exp:0,1,1", A));
                produced.push_back(h.spline);
                produced.push_back(s.spline);
                for (auto c : {inspect(h, n, one, 60.0), inspect(s, n, seg("const:1", A), A)}) {
                    touch = std::max(touch, c.touch);
                    contain = std::max(contain, c.contain);
                    ordering = ordering && c.ordering;
                    count = count && c.count;
                }
            }
        bool ok = count && ordering && touch < 1e-6 && contain < 1e-7;
        return Outcome{ok, fmt("touch %.2e C, containment %.2e C", touch, contain) +
                               (count ? "" : ", wrong knot count") + (ordering ? "" : ", knot before zero of G'")};
    });

    report(6, "ordering and monotonicity in alpha", [&] {
        std::vector<double> grid{0.1, 0.3, 1.0, 3.0, 10.0};
        const double slack = 1e-7;
        std::vector<std::vector<double>> C(4);
        for (int n = 1; n <= 3; ++n)
            for (const auto& pt : cn_curve(2, n, grid, one, one, gexp).points) {
                if (!pt.ok)
                    throw Error(ErrorKind::NoConvergence, pt.error);
                C[n].push_back(pt.C);
                produced.push_back(pt.solution->spline);
            }
        bool mono = true;
        for (std::size_t i = 1; i < grid.size(); ++i) {
            mono = mono && C[1][i] >= C[1][i - 1] - slack && C[3][i] >= C[3][i - 1] - slack;
            mono = mono && C[2][i] <= C[2][i - 1] + slack;
        }
        double max2 = *std::max_element(C[2].begin(), C[2].end());
        double min1 = *std::min_element(C[1].begin(), C[1].end());
        double c0 = compute_C0(2, one, one, gexp).C0;
        bool order = max2 <= min1 + slack && min1 <= c0 + slack;
        return Outcome{mono && order, fmt("max C_2 = %.6f, min C_1 = %.6f, C_0 = %.6f", max2, min1, c0) +
                                          (mono ? "" : ", not monotone")};
    });

    report(7, "limit matching", [&] {
        double c0 = compute_C0(2, one, one, gexp).C0;
        double hi = compute_Cn(2, 1, 1e4, one, one, gexp);
        double lo1 = compute_Cn(2, 1, 1e-4, one, one, gexp);
        double lo2 = compute_Cn(2, 2, 1e-4, one, one, gexp);
        double d1 = std::abs(hi - c0), d2 = std::abs(lo1 - lo2);
        return Outcome{d1 < 1e-3 && d2 < 1e-3, fmt("|C_1(1e4) - C_0| = %.2e, |C_1(1e-4) - C_2(1e-4)| = %.2e", d1, d2)};
    });

    report(8, "continuation and direct paths agree", [&] {
        OscillateOptions cont, direct;
        cont.path = HalfLinePath::Continuation;
        direct.path = HalfLinePath::Direct;
        auto a = oscillate_halfline(2, 2, 1.0, one, one, gexp, cont);
        auto b = oscillate_halfline(2, 2, 1.0, one, one, gexp, direct);
        produced.push_back(a.spline);
        produced.push_back(b.spline);
        double d = std::abs(a.C - b.C);
        return Outcome{d < 1e-7, fmt("|C_cont - C_direct| = %.2e", d)};
    });

    report(9, "oracle equivalence", [&] {
        const double A = 4.0;
        double worst = 0.0;
        for (int r = 1; r <= 2; ++r)
            for (int n = 1; n <= 2; ++n) {
                auto s = oscillate_segment(r, n, A, seg("const:1", A), seg("const:1", A), seg("exp:0,1,1", A));
                auto bs = brute_oscillation(r, n, Domain::segment(A), 1.0, seg("const:1", A), seg("const:1", A),
                                            seg("exp:0,1,1", A));
                auto h = oscillate_halfline(r, n, 1.0, one, one, gexp);
                auto bh = brute_oscillation(r, n, Domain::half_line(), 1.0, one, one, gexp);
                worst = std::max({worst, std::abs(s.C - bs.C), std::abs(h.C - bh.C)});
            }
        return Outcome{worst < 1e-3, fmt("max |C_solver - C_oracle| = %.2e", worst)};
    });

    report(10, "modulus saturation and monotonicity", [&] {
        std::vector<double> deltas;
        for (int i = 1; i <= 10; ++i)
            deltas.push_back(0.1 * i);
        deltas.push_back(0.35);
        deltas.push_back(0.45);
        std::sort(deltas.begin(), deltas.end());
        auto curve = omega_curve(2, 1, deltas, one, gexp);
        double sat = 0.0, roundtrip = 0.0, gap = -INFINITY;
        bool mono = true, bounded = true;
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const auto& m = curve[i];
            if (i > 0 && m.omega_value < curve[i - 1].omega_value - 1e-12)
                mono = false;
            if (m.omega_value > 1.0 + 1e-12)
                bounded = false;
            for (double d : {0.5, 0.7, 1.0})
                if (std::abs(m.delta - d) < 1e-12)
                    sat = std::max(sat, std::abs(m.omega_value - 1.0));
            if (m.witness) {
                produced.push_back(m.witness->spline);
                for (double d : {0.2, 0.35, 0.45})
                    if (std::abs(m.delta - d) < 1e-12) {
                        const auto& G = m.witness->spline;
                        NormOptions o;
                        o.limit = G.limit_value();
                        o.tail_bound = [&G](double t) { return G.calculus().Q(2, t); };
                        double nrm = weighted_norm([&](double t) { return G.eval(0, t); }, one, one, o);
                        roundtrip = std::max(roundtrip, std::abs(nrm - d));
                    }
            }
            gap = std::max(gap, brute_omega_lower_bound(2, 1, m.delta, one, gexp) - m.omega_value);
        }
        bool ok = sat < 1e-7 && mono && bounded && roundtrip < 1e-6 && gap <= 1e-9;
        return Outcome{ok, fmt("saturation error %.2e, round-trip error %.2e, max(lower bound - omega) = %.2e", sat,
                               roundtrip, gap) +
                               (mono ? "" : ", not monotone") + (bounded ? "" : ", exceeds 1")};
    });

    report(11, "least deviating primitive", [&] {
        double err = 0.0, prev = 0.0, at40 = 0.0;
        bool mono = true;
        for (double a : {1.0, 3.0, 40.0}) {
            auto ld = least_deviating_primitive(1, a, one, gexp);
            err = std::max(err, std::abs(ld.phi - (1 - std::exp(-a)) / 2));
            mono = mono && ld.phi >= prev;
            prev = ld.phi;
            at40 = ld.phi;
        }
        double c0gap = std::abs(at40 - compute_C0(1, one, one, gexp).C0);
        return Outcome{err < 1e-7 && mono && c0gap < 1e-6,
                       fmt("max phi error %.2e, |phi(40) - C_0| = %.2e", err, c0gap) + (mono ? "" : ", not monotone")};
    });

    report(12, "universal bound |G| <= |L| + |P_r|", [&] {
        double worst = -INFINITY;
        for (const auto& G : produced) {
            double end = G.domain().is_half_line() ? 40.0 : G.domain().length;
            for (double t : linspace(0.0, end, 2048))
                worst = std::max(worst, std::abs(G.eval(0, t)) - envelope_bound(G.calculus(), G.limit_value(), t));
        }
        // x = P_r attains the bound
        double eq = 0.0;
        for (int r = 1; r <= 4; ++r) {
            auto calc = build_calculus(gexp, r);
            auto P = make_halfline_spline(r, {}, (r % 2) ? -1 : 1, 0.0, calc);
            for (double t : linspace(0.0, 40.0, 2048))
                eq = std::max(eq, std::abs(std::abs(P.eval(0, t)) - envelope_bound(calc, 0.0, t)));
        }
        return Outcome{worst <= 1e-9 && eq == 0.0,
                       fmt("%.0f splines, max excess %.2e, equality case deviation %.2e",
                           static_cast<double>(produced.size()), worst, eq)};
    });

    std::printf("%d of 12 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}

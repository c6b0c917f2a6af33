#include "oscispline/modulus.hpp"

#include "oscispline/error.hpp"
#include "oscispline/parallel.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

namespace oscispline {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_assumptions(const WeightFunction& fm, const WeightFunction& fp, const WeightFunction& g, int r,
                         bool theorem)
{
    if (!g.domain().is_half_line() || !fm.domain().is_half_line() || !fp.domain().is_half_line())
        throw Error(ErrorKind::DomainMismatch, "half-line weights are required");
    const AssumptionReport rep = check_assumptions(fm, fp, g, r);
    for (const auto& [name, c] : rep.items()) {
        const bool needed = theorem || (name != "liminf_condition" && name != "sup_condition");
        if (needed && !c.pass) throw Error(ErrorKind::AssumptionsNotVerified, name + ": " + c.detail);
    }
}

struct Sides {
    NormResult plus, minus;
};

Sides side_norms(const GCalculus& calc, const WeightFunction& fm, const WeightFunction& fp, double a)
{
    const int r = calc.order();
    NormOptions opt;
    opt.tail_bound = [&calc, r](double t) { return calc.Q(r, t); };
    opt.limit = std::max(a, 0.0);
    Sides s;
    s.plus = weighted_norm_detail([&](double t) { return std::max(calc.P(r, t) + a, 0.0); }, fm, fp, opt);
    opt.limit = std::min(a, 0.0);
    s.minus = weighted_norm_detail([&](double t) { return std::min(calc.P(r, t) + a, 0.0); }, fm, fp, opt);
    return s;
}

}  // namespace

C0Result compute_C0(int r, const WeightFunction& f_minus, const WeightFunction& f_plus, const WeightFunction& g)
{
    if (r < 1) throw Error(ErrorKind::InvalidArgument, "r must be positive");
    require_assumptions(f_minus, f_plus, g, r, false);
    const GCalculus calc = build_calculus(g, r);

    // the positive side grows with a and the negative side shrinks: the max is
    // smallest where they cross, somewhere in [-max|P_r|, max|P_r|]
    const double M = calc.Q(r, 0.0);
    double lo = -M, hi = M;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * M; ++it) {
        const double mid = 0.5 * (lo + hi);
        const Sides s = side_norms(calc, f_minus, f_plus, mid);
        (s.plus.value < s.minus.value ? lo : hi) = mid;
    }
    const double a = 0.5 * (lo + hi);
    const Sides s = side_norms(calc, f_minus, f_plus, a);
    C0Result res;
    res.a_star = a;
    res.C0 = std::max(s.plus.value, s.minus.value);
    res.touch_plus = s.plus.at_infinity ? kInf : s.plus.argmax;
    res.touch_minus = s.minus.at_infinity ? kInf : s.minus.argmax;
    return res;
}

namespace {

OscillationSolution knotless_solution(int r, const C0Result& c0, const WeightFunction& g)
{
    OscillationSolution sol;
    sol.spline = make_halfline_spline(r, {}, 1, c0.a_star, build_calculus(g, r));
    sol.C = c0.C0;
    sol.oscillation_points = {std::min(c0.touch_plus, c0.touch_minus), std::max(c0.touch_plus, c0.touch_minus)};
    sol.diagnostics.path = "knotless";
    sol.diagnostics.converged = true;
    sol.diagnostics.deltas = {c0.C0, c0.C0};
    return sol;
}

struct Probe {
    double u = 0.0;  // log alpha
    double C = 0.0;
    OscillationSolution sol;
};

class NormSearch {
public:
    NormSearch(int r, double C, const WeightFunction& f, const WeightFunction& g, const ModulusOptions& opt)
        : r_(r), C_(C), f_(f), g_(g), opt_(opt) {}

    std::optional<Probe> solve(int n, double u, const Probe* warm) const
    {
        OscillateOptions o = opt_.oscillate;
        o.throw_on_failure = false;
        if (warm) o.initial_zeros = warm->sol.solver_zeros;
        try {
            OscillationSolution s = oscillate_halfline(r_, n, std::exp(u), f_, f_, g_, o);
            if (!s.diagnostics.converged) return std::nullopt;
            const double C = s.C;
            return Probe{u, C, std::move(s)};
        } catch (const Error&) {
            return std::nullopt;
        }
    }

    // Range probe at u, stepping towards alpha = 1 when the extreme solve fails.
    std::optional<Probe> solve_end(int n, double u) const
    {
        for (; std::abs(u) > 1e-9; u -= std::copysign(std::min(std::log(10.0), std::abs(u)), u))
            if (auto p = solve(n, u, nullptr)) return p;
        return solve(n, 0.0, nullptr);
    }

    bool hit(const Probe& p) const { return std::abs(p.C - C_) <= opt_.norm_tol * C_; }

    // C_n is monotone in u; a and b bracket C_.
    Probe refine(int n, Probe a, Probe b) const
    {
        double fa = a.C - C_, fb = b.C - C_;
        int side = 0;
        for (int it = 0; it < 200; ++it) {
            if (hit(a)) return a;
            if (hit(b)) return b;
            if (std::abs(b.u - a.u) < 1e-12 * std::max(1.0, std::abs(a.u))) break;
            double u = (a.u * fb - b.u * fa) / (fb - fa);
            const double w = b.u - a.u;
            if (!(std::min(a.u, b.u) + 0.01 * std::abs(w) < u && u < std::max(a.u, b.u) - 0.01 * std::abs(w)))
                u = 0.5 * (a.u + b.u);
            const Probe& near = std::abs(u - a.u) < std::abs(u - b.u) ? a : b;
            std::optional<Probe> m = solve(n, u, &near);
            if (!m) m = solve(n, u, nullptr);
            if (!m) throw Error(ErrorKind::NoConvergence, "oscillation failed inside the alpha bracket");
            const double fm = m->C - C_;
            if ((fm > 0) == (fa > 0)) {
                a = *m;
                fa = fm;
                if (side == -1) fb *= 0.5;  // Illinois
                side = -1;
            } else {
                b = *m;
                fb = fm;
                if (side == 1) fa *= 0.5;
                side = 1;
            }
        }
        return std::abs(a.C - C_) < std::abs(b.C - C_) ? a : b;
    }

    // Walk u towards +-inf (dir) from start until C_n passes C_; returns the bracket.
    std::optional<Probe> extend(int n, const Probe& start, double dir, bool towards_larger, Probe& last) const
    {
        const double u_max = std::log(opt_.alpha_extreme);
        last = start;
        for (double u = start.u + dir * std::log(100.0); std::abs(u) <= u_max + 1e-9; u += dir * std::log(100.0)) {
            std::optional<Probe> p = solve(n, u, &last);
            if (!p) p = solve(n, u, nullptr);
            if (!p) return std::nullopt;
            const bool passed = towards_larger ? p->C >= C_ : p->C <= C_;
            if (passed) return refine(n, last, *p);
            last = *p;
        }
        return std::nullopt;
    }

private:
    int r_;
    double C_;
    const WeightFunction& f_;
    const WeightFunction& g_;
    const ModulusOptions& opt_;
};

}  // namespace

NormedSpline spline_with_norm(int r, double C, const WeightFunction& f, const WeightFunction& g,
                              const ModulusOptions& options)
{
    if (!(C > 0.0) || !std::isfinite(C)) throw Error(ErrorKind::InvalidArgument, "C must be positive");
    const C0Result c0 = compute_C0(r, f, f, g);
    require_assumptions(f, f, g, r, true);
    if (C > c0.C0 * (1.0 + 1e-10))
        throw Error(ErrorKind::OutOfRange, "C exceeds C_0 = " + std::to_string(c0.C0));
    if (C >= c0.C0 * (1.0 - 1e-12)) return NormedSpline{knotless_solution(r, c0, g), 0, false};

    const NormSearch search(r, C, f, g, options);
    const double u_lo = std::log(options.alpha_lo), u_hi = std::log(options.alpha_hi);
    std::optional<Probe> closest;
    auto consider = [&](const Probe& p) {
        if (!closest || std::abs(p.C - C) < std::abs(closest->C - C)) closest = p;
    };

    for (int n = 1; n <= options.n_max; ++n) {
        // odd n: C_n increases with alpha; even n: decreases
        const double up = n % 2 == 1 ? 1.0 : -1.0;
        std::optional<Probe> a = search.solve_end(n, u_lo);
        std::optional<Probe> b = a ? search.solve_end(n, u_hi) : std::nullopt;
        if (!a || !b) break;
        consider(*a);
        consider(*b);
        const Probe& low = up > 0 ? *a : *b;
        const Probe& high = up > 0 ? *b : *a;
        if (search.hit(low)) return NormedSpline{low.sol, n, false};
        if (search.hit(high)) return NormedSpline{high.sol, n, false};

        Probe last;
        if (C > low.C && C < high.C) {
            const Probe p = search.refine(n, *a, *b);
            return NormedSpline{p.sol, n, false};
        }
        if (C > high.C) {
            // between this range and the previous one; both meet in the limit
            if (auto p = search.extend(n, high, up, true, last)) return NormedSpline{p->sol, n, false};
            consider(last);
            break;
        }
        // below: widen towards the shared limit with n + 1 before moving on
        if (auto p = search.extend(n, low, -up, false, last)) return NormedSpline{p->sol, n, false};
        consider(last);
    }

    if (closest && std::abs(closest->C - C) <= 1e-7 * C)
        return NormedSpline{closest->sol, closest->sol.spline.knot_count(), false};
    if (closest && closest->C > C)
        return NormedSpline{closest->sol, closest->sol.spline.knot_count(), true};
    throw Error(ErrorKind::NoConvergence,
                "no n <= n_max reaches C; closest C_n = " + std::to_string(closest ? closest->C : 0.0),
                closest ? std::abs(closest->C - C) : 0.0);
}

const char* to_string(ModulusRegime regime)
{
    return regime == ModulusRegime::Saturated ? "Saturated" : "SplineDetermined";
}

ModulusResult omega(int r, int k, double delta, const WeightFunction& f, const WeightFunction& g,
                    const ModulusOptions& options)
{
    if (r < 2) throw Error(ErrorKind::PreconditionViolated, "the modulus needs r >= 2");
    if (k < 1 || k > r - 1) throw Error(ErrorKind::PreconditionViolated, "k must lie in [1, r-1]");
    if (!(delta > 0.0) || !std::isfinite(delta)) throw Error(ErrorKind::PreconditionViolated, "delta must be positive");
    require_assumptions(f, f, g, r, true);

    const C0Result c0 = compute_C0(r, f, f, g);
    ModulusResult res;
    res.delta = delta;
    res.k = k;
    res.C0 = c0.C0;
    if (delta >= c0.C0 * (1.0 - 1e-12)) {
        res.regime = ModulusRegime::Saturated;
        res.omega_value = build_calculus(g, r).Q(r - k, 0.0);
        res.witness = knotless_solution(r, c0, g);
        return res;
    }
    NormedSpline ns = spline_with_norm(r, delta, f, g, options);
    res.regime = ModulusRegime::SplineDetermined;
    res.omega_value = std::abs(ns.solution.spline.eval(k, 0.0));
    res.n = ns.n;
    res.alpha = ns.solution.alpha;
    res.truncated = ns.truncated;
    res.witness = std::move(ns.solution);
    return res;
}

std::vector<ModulusResult> omega_curve(int r, int k, const std::vector<double>& deltas, const WeightFunction& f,
                                       const WeightFunction& g, const ModulusOptions& options)
{
    return parallel_map(deltas, [&](double d) { return omega(r, k, d, f, g, options); });
}

namespace {

// Chebyshev T_0 .. T_{m-1} at x
void chebyshev(double x, int m, double* out)
{
    if (m > 0) out[0] = 1.0;
    if (m > 1) out[1] = x;
    for (int j = 2; j < m; ++j) out[j] = 2.0 * x * out[j - 1] - out[j - 2];
}

// Power-series coefficients in t of sum_j c_j T_j(2 t / a - 1).
std::vector<double> to_monomials(const Eigen::VectorXd& c, double a)
{
    const int m = static_cast<int>(c.size());
    std::vector<std::vector<double>> T(static_cast<std::size_t>(m), std::vector<double>(static_cast<std::size_t>(m), 0.0));
    if (m > 0) T[0][0] = 1.0;
    if (m > 1) {
        T[1][0] = -1.0;
        T[1][1] = 2.0 / a;
    }
    for (int j = 2; j < m; ++j)
        for (int i = 0; i < m; ++i) {
            double v = -T[j - 2][i] - 2.0 * T[j - 1][i];
            if (i > 0) v += 4.0 / a * T[j - 1][i - 1];
            T[j][i] = v;
        }
    std::vector<double> out(static_cast<std::size_t>(m), 0.0);
    for (int j = 0; j < m; ++j)
        for (int i = 0; i < m; ++i) out[i] += c[j] * T[j][i];
    return out;
}

}  // namespace

LeastDeviation least_deviating_primitive(int r, double a_end, const WeightFunction& f, const WeightFunction& g,
                                         double tol)
{
    if (r < 1) throw Error(ErrorKind::InvalidArgument, "r must be positive");
    if (!(a_end > 0.0) || !std::isfinite(a_end)) throw Error(ErrorKind::InvalidArgument, "a_end must be positive");
    if (a_end > g.domain().end() || a_end > f.domain().end())
        throw Error(ErrorKind::OutOfDomain, "a_end lies outside the weight domain");
    const GCalculus calc = build_calculus(g, r);

    constexpr int kGrid = 4096;
    std::vector<double> grid(kGrid + 1), P(kGrid + 1), W(kGrid + 1);
    for (int i = 0; i <= kGrid; ++i) {
        grid[i] = a_end * i / kGrid;
        P[i] = calc.gk(r, grid[i]);
        W[i] = f(grid[i]);
        if (!(W[i] > 0.0)) throw Error(ErrorKind::InvalidEnvelope, "f must be positive on [0, a_end]");
    }

    const int m = r;  // polynomial dimension
    std::vector<double> T(static_cast<std::size_t>(m));
    Eigen::VectorXd c = Eigen::VectorXd::Zero(m);
    auto err = [&](double t) {
        chebyshev(2.0 * t / a_end - 1.0, m, T.data());
        double q = 0.0;
        for (int j = 0; j < m; ++j) q += c[j] * T[j];
        return (calc.gk(r, t) + q) / f(t);
    };

    // initial reference: Chebyshev extrema
    std::vector<double> ref(static_cast<std::size_t>(m + 1));
    for (int i = 0; i <= m; ++i) ref[i] = 0.5 * a_end * (1.0 - std::cos(M_PI * i / m));

    LeastDeviation out;
    double E = 0.0, emax = kInf;
    for (int it = 1; it <= 100; ++it) {
        out.iterations = it;
        Eigen::MatrixXd A(m + 1, m + 1);
        Eigen::VectorXd rhs(m + 1);
        for (int i = 0; i <= m; ++i) {
            chebyshev(2.0 * ref[i] / a_end - 1.0, m, T.data());
            for (int j = 0; j < m; ++j) A(i, j) = T[j];
            A(i, m) = -((i % 2 == 0) ? 1.0 : -1.0) * f(ref[i]);
            rhs[i] = -calc.gk(r, ref[i]);
        }
        const Eigen::VectorXd sol = A.fullPivLu().solve(rhs);
        c = sol.head(m);
        E = std::abs(sol[m]);

        // sign runs of the error on the grid, one extremum per run
        std::vector<double> pts, vals;
        int run_sign = 0;
        for (int i = 0; i <= kGrid; ++i) {
            const double e = err(grid[i]);
            const int s = e >= 0 ? 1 : -1;
            if (s != run_sign || pts.empty()) {
                pts.push_back(grid[i]);
                vals.push_back(e);
                run_sign = s;
            } else if (std::abs(e) > std::abs(vals.back())) {
                pts.back() = grid[i];
                vals.back() = e;
            }
        }
        // golden refinement of interior extrema
        const double h = a_end / kGrid;
        for (std::size_t i = 0; i < pts.size(); ++i) {
            double lo = std::max(0.0, pts[i] - h), hi = std::min(a_end, pts[i] + h);
            const double sgn = vals[i] >= 0 ? 1.0 : -1.0;
            const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
            double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo);
            double f1 = sgn * err(x1), f2 = sgn * err(x2);
            for (int k = 0; k < 80 && hi - lo > 1e-15 * a_end; ++k) {
                if (f1 < f2) {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + phi * (hi - lo);
                    f2 = sgn * err(x2);
                } else {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - phi * (hi - lo);
                    f1 = sgn * err(x1);
                }
            }
            const double xm = 0.5 * (lo + hi);
            const double em = err(xm);
            if (sgn * em > std::abs(vals[i])) {
                pts[i] = xm;
                vals[i] = em;
            }
        }
        if (pts.size() < static_cast<std::size_t>(m + 1))
            throw Error(ErrorKind::NoConvergence, "Remez reference lost its alternation");
        // trim to m + 1 alternating points keeping the global maximum
        std::size_t gmax = 0;
        for (std::size_t i = 1; i < vals.size(); ++i)
            if (std::abs(vals[i]) > std::abs(vals[gmax])) gmax = i;
        std::size_t first = 0, last = pts.size() - 1;
        while (last - first + 1 > static_cast<std::size_t>(m + 1)) {
            if (first == gmax || (last != gmax && std::abs(vals[last]) < std::abs(vals[first]))) --last;
            else ++first;
        }
        emax = std::abs(vals[gmax]);
        ref.assign(pts.begin() + static_cast<long>(first), pts.begin() + static_cast<long>(last) + 1);
        if (emax - E <= tol * emax) break;
    }
    if (emax - E > 1e-7 * emax)
        throw Error(ErrorKind::NoConvergence, "Remez exchange did not level the error", emax - E);

    out.phi = emax;
    out.coefficients = to_monomials(c, a_end);
    out.reference = ref;
    return out;
}

}  // namespace oscispline

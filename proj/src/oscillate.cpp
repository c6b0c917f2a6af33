#include "oscispline/oscillate.hpp"

#include "oscispline/error.hpp"
#include "oscispline/optimize.hpp"
#include "oscispline/parallel.hpp"
#include "oscispline/zerofit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numeric>

namespace oscispline {

const char* to_string(HalfLinePath path)
{
    switch (path) {
    case HalfLinePath::Continuation: return "continuation";
    case HalfLinePath::Direct: return "direct";
    case HalfLinePath::TruncatedOnly: return "truncated";
    }
    return "?";
}

namespace {

// Equioscillation of a limit-0 spline S anchored at the calculus anchor b,
// between -C fm and C fp. The unknowns are the zeros z_1 < ... < z_n of S in
// the mass coordinate y = -log(Q_1(t) / Q_1(0)), which maps [0, b) onto [0, inf).
class Engine {
public:
    Engine(GCalculus calc, WeightFunction fm, WeightFunction fp, int n, const OscillateOptions& opt)
        : calc_(std::move(calc)), fm_(std::move(fm)), fp_(std::move(fp)), n_(n), opt_(opt)
    {
        q10_ = calc_.Q(1, 0.0);
        half_ = !std::isfinite(calc_.anchor());
        if (half_) f_floor_ = std::min(fm_.end_value(), fp_.end_value());
    }

    struct State {
        std::vector<double> y;
        ZeroFitResult fit;
        std::vector<double> delta;
        std::vector<double> argmax;
        double residual = INFINITY;
    };

    double y_of(double t) const { return -std::log(calc_.Q(1, t) / q10_); }

    double t_of(double y) const
    {
        const double target = std::log(q10_) - y;
        double lo = 0.0, hi;
        if (half_) {
            hi = 1.0;
            while (std::log(calc_.Q(1, hi)) > target) {
                lo = hi;
                hi *= 2.0;
                if (hi > 1e12) throw Error(ErrorKind::NoConvergence, "mass coordinate out of range");
            }
        } else {
            hi = calc_.anchor();
        }
        double t = 0.5 * (lo + hi);
        for (int it = 0; it < 200; ++it) {
            const double q = calc_.Q(1, t);
            const double phi = std::log(q) - target;  // decreasing in t
            if (phi > 0) lo = t;
            else hi = t;
            double next = t + phi * q / calc_.g()(t);
            if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
            if (std::abs(next - t) <= 1e-16 * std::max(1.0, t) || hi - lo <= 1e-16 * std::max(1.0, hi)) {
                t = next;
                break;
            }
            t = next;
        }
        return t;
    }

    // Weighted extremum of the k-th lobe: S >= 0 against fp on even k, S <= 0 against fm on odd k.
    Extremum lobe_max(const PerfectGSpline& S, int k, double a, double c) const
    {
        const WeightFunction& f = (k % 2 == 0) ? fp_ : fm_;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        auto h = [&](double t) { return sign * S.eval(0, t) / f(t); };

        std::vector<double> grid;
        const int K = opt_.lobe_samples;
        double tail_start = c;
        if (!std::isfinite(c)) {
            // beyond the last knot |S| = Q_r, and f >= f(inf)
            tail_start = std::max(a, S.knots().empty() ? a : S.knots().back());
            double best = 0.0;
            for (int i = 0; i <= K; ++i) best = std::max(best, h(a + (tail_start - a) * i / K));
            double width = std::max(1.0, tail_start - a);
            c = tail_start + width;
            while (calc_.Q(calc_.order(), c) / f_floor_ >= best && c < 1e9) {
                width *= 2.0;
                c = tail_start + width;
            }
            for (int i = 0; i <= K; ++i) grid.push_back(a + (tail_start - a) * i / K);
            for (int i = 1; i <= K; ++i) grid.push_back(tail_start + (c - tail_start) * i / K);
        } else {
            for (int i = 0; i < K; ++i) grid.push_back(a + (c - a) * i / K);
            grid.push_back(c);
        }
        for (double t : S.knots())
            if (t > a && t < c) grid.push_back(t);
        std::sort(grid.begin(), grid.end());

        std::size_t best_i = 0;
        double best_v = -INFINITY;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = h(grid[i]);
            if (v > best_v) {
                best_v = v;
                best_i = i;
            }
        }
        const double lo = grid[best_i == 0 ? 0 : best_i - 1];
        const double hi = grid[std::min(best_i + 1, grid.size() - 1)];
        Extremum e = golden_section_max(h, lo, hi, 1e-15 * std::max(1.0, hi));
        if (best_v > e.value) e = {grid[best_i], best_v};
        return e;
    }

    State evaluate(const std::vector<double>& y, const std::vector<double>* warm) const
    {
        State st;
        st.y = y;
        std::vector<double> z(y.size());
        for (std::size_t i = 0; i < y.size(); ++i) z[i] = t_of(y[i]);
        if (n_ > 0) {
            ZeroFitProblem p;
            p.calc = calc_;
            p.zeros = z;
            p.options.zero_tol = 1e-12;
            if (warm) p.initial_knots = *warm;
            st.fit = fit_knots(p);
        } else {
            const int eps = (calc_.order() % 2 == 0) ? 1 : -1;
            st.fit.spline = make_spline(calc_, {}, eps, 0.0);
        }
        const PerfectGSpline& S = st.fit.spline;
        for (int k = 0; k <= n_; ++k) {
            const double a = k == 0 ? 0.0 : z[k - 1];
            const double c = k == n_ ? calc_.anchor() : z[k];
            const Extremum e = lobe_max(S, k, a, c);
            st.delta.push_back(e.value);
            st.argmax.push_back(e.t);
        }
        const double dmin = *std::min_element(st.delta.begin(), st.delta.end());
        const double dmax = *std::max_element(st.delta.begin(), st.delta.end());
        st.residual = dmin > 0.0 ? (dmax - dmin) / dmin : INFINITY;
        return st;
    }

    std::vector<double> mass_fraction_start() const
    {
        // zeros at mass fractions (2k - 1) / (2n + 1): exact for r = 1 with constant envelopes
        std::vector<double> y;
        for (int k = 1; k <= n_; ++k) y.push_back(-std::log(1.0 - (2.0 * k - 1.0) / (2.0 * n_ + 1.0)));
        return y;
    }

    // Multiplicative reassignment of the lobe masses, damped by the 0.5 / r exponent.
    State equalize(State st, int& iterations) const
    {
        const double gamma = 0.5 / calc_.order();
        for (iterations = 0; iterations < opt_.max_equalize && st.residual > opt_.switch_residual; ++iterations) {
            std::vector<double> w{1.0};
            for (double yy : st.y) w.push_back(std::exp(-yy));
            w.push_back(0.0);
            double logmean = 0.0;
            for (double d : st.delta) logmean += std::log(d);
            logmean /= static_cast<double>(st.delta.size());
            std::vector<double> xi(n_ + 1);
            double total = 0.0;
            for (int k = 0; k <= n_; ++k) {
                xi[k] = (w[k] - w[k + 1]) * std::exp(gamma * (logmean - std::log(st.delta[k])));
                total += xi[k];
            }
            std::vector<double> y(n_);
            double acc = 1.0;
            for (int k = 0; k < n_; ++k) {
                acc -= xi[k] / total;
                y[k] = -std::log(acc);
            }
            st = evaluate(y, &st.fit.spline.knots());
        }
        return st;
    }

    Eigen::VectorXd residual_vector(const State& st) const
    {
        Eigen::VectorXd F(n_);
        for (int k = 0; k < n_; ++k) F[k] = std::log(st.delta[k + 1]) - std::log(st.delta[0]);
        return F;
    }

    double min_gap(const std::vector<double>& y) const
    {
        double gap = y.empty() ? 1.0 : y[0];
        for (std::size_t i = 1; i < y.size(); ++i) gap = std::min(gap, y[i] - y[i - 1]);
        return gap;
    }

    // Newton on log delta_{k+1} - log delta_1 with a finite-difference Jacobian.
    State newton(State st, int& iterations) const
    {
        iterations = 0;
        for (int it = 0; it < opt_.max_newton && st.residual > opt_.tol; ++it) {
            iterations = it + 1;
            const Eigen::VectorXd F = residual_vector(st);
            const double h = 1e-7 * min_gap(st.y);
            Eigen::MatrixXd J(n_, n_);
            for (int j = 0; j < n_; ++j) {
                std::vector<double> yp = st.y;
                yp[j] += h;
                const State sp = evaluate(yp, &st.fit.spline.knots());
                J.col(j) = (residual_vector(sp) - F) / h;
            }
            const Eigen::VectorXd step = J.partialPivLu().solve(-F);
            if (!step.allFinite()) break;

            double lambda = 1.0;
            for (int k = 0; k < n_; ++k) {
                const double left = k == 0 ? st.y[0] : st.y[k] - st.y[k - 1];
                const double dleft = k == 0 ? step[0] : step[k] - step[k - 1];
                if (dleft < 0) lambda = std::min(lambda, 0.5 * left / -dleft);
            }
            bool moved = false;
            for (int ls = 0; ls < 30; ++ls) {
                std::vector<double> y = st.y;
                for (int k = 0; k < n_; ++k) y[k] += lambda * step[k];
                try {
                    State trial = evaluate(y, &st.fit.spline.knots());
                    if (residual_vector(trial).norm() < (1.0 - 1e-4 * lambda) * F.norm()) {
                        st = std::move(trial);
                        moved = true;
                        break;
                    }
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::NoConvergence && e.kind() != ErrorKind::ZerosTooClose) throw;
                }
                lambda *= 0.5;
            }
            if (!moved) break;
        }
        return st;
    }

    struct Outcome {
        State state;
        int equalize_iterations = 0;
        int newton_iterations = 0;
    };

    Outcome solve(const std::vector<double>& y0) const
    {
        Outcome out;
        out.state = evaluate(y0, nullptr);
        if (n_ == 0) return out;
        out.state = equalize(std::move(out.state), out.equalize_iterations);
        out.state = newton(std::move(out.state), out.newton_iterations);
        return out;
    }

    const GCalculus& calc() const { return calc_; }

private:
    GCalculus calc_;
    WeightFunction fm_, fp_;
    int n_;
    OscillateOptions opt_;
    double q10_ = 1.0;
    bool half_ = false;
    double f_floor_ = 1.0;
};

void check_envelope(const WeightFunction& f, const char* name)
{
    const double end = f.domain().is_half_line() ? 100.0 : f.domain().length;
    for (int i = 0; i <= 1024; ++i) {
        const double v = f(end * i / 1024.0);
        if (!(v > 0.0) || !std::isfinite(v))
            throw Error(ErrorKind::InvalidEnvelope, std::string(name) + " is not positive on the domain");
    }
}

void finish(OscillationSolution& sol, const Engine::Outcome& out, const OscillateOptions& opt, const std::string& path)
{
    const auto& st = out.state;
    sol.C = *std::max_element(st.delta.begin(), st.delta.end());
    sol.oscillation_points = st.argmax;
    sol.diagnostics.equalize_iterations = out.equalize_iterations;
    sol.diagnostics.newton_iterations = out.newton_iterations;
    sol.diagnostics.residual = st.residual;
    sol.diagnostics.deltas = st.delta;
    sol.diagnostics.path = path;
    sol.diagnostics.converged = st.residual <= opt.accept_tol;
    if (!sol.diagnostics.converged && opt.throw_on_failure)
        throw Error(ErrorKind::NoConvergence, "equioscillation did not converge", st.residual);
}

WeightFunction on(const WeightFunction& w, const Domain& d) { return w.domain() == d ? w : w.on_domain(d); }

}  // namespace

OscillationSolution oscillate_segment(int r, int n, double A, const WeightFunction& f_minus,
                                      const WeightFunction& f_plus, const WeightFunction& g,
                                      const OscillateOptions& options)
{
    if (n < 0) throw Error(ErrorKind::InvalidArgument, "n must be non-negative");
    const Domain d = Domain::segment(A);
    const WeightFunction fm = on(f_minus, d), fp = on(f_plus, d), gs = on(g, d);
    check_envelope(fm, "f-");
    check_envelope(fp, "f+");

    Engine eng(build_calculus(gs, r), fm, fp, n, options);
    std::vector<double> y0;
    if (options.initial_zeros && static_cast<int>(options.initial_zeros->size()) == n)
        for (double z : *options.initial_zeros) y0.push_back(eng.y_of(z));
    else
        y0 = eng.mass_fraction_start();
    const Engine::Outcome out = eng.solve(y0);

    OscillationSolution sol;
    sol.spline = out.state.fit.spline;
    sol.solver_zeros.clear();
    for (double y : out.state.y) sol.solver_zeros.push_back(eng.t_of(y));
    finish(sol, out, options, "segment");
    return sol;
}

namespace {

AssumptionReport require_halfline_assumptions(const WeightFunction& fm, const WeightFunction& fp,
                                              const WeightFunction& g, int r)
{
    AssumptionReport rep = check_assumptions(fm, fp, g, r);
    for (const auto* c : {&rep.positivity, &rep.monotonicity, &rep.limit_positive, &rep.g_integrable,
                          &rep.tail_constants})
        if (!c->pass) throw Error(ErrorKind::AssumptionsNotVerified, "half-line assumptions fail: " + c->detail);
    return rep;
}

// Smallest truncation point beyond which the spline values change by less than tol * Q_r(0).
double truncation_point(const GCalculus& calc, double start, double tol)
{
    const int r = calc.order();
    const double scale = calc.Q(r, 0.0);
    double A = std::max(8.0, 2.0 * start);
    for (int i = 0; i < 60; ++i, A *= 1.25) {
        double F = 0.0, c = 1.0;
        for (int k = r - 1; k >= 0; --k) {
            F += c * calc.Q(k + 1, A);
            c *= A / (r - k);
        }
        if (F < tol * scale && calc.Q(1, A) < 1e-10 * calc.Q(1, 0.0)) return A;
    }
    throw Error(ErrorKind::NoConvergence, "no truncation point found for the half-line problem");
}

}  // namespace

OscillationSolution oscillate_halfline(int r, int n, double alpha, const WeightFunction& f_minus,
                                       const WeightFunction& f_plus, const WeightFunction& g,
                                       const OscillateOptions& options)
{
    if (n < 1) throw Error(ErrorKind::InvalidArgument, "half-line oscillation needs n >= 1");
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
    if (!g.domain().is_half_line() || !f_minus.domain().is_half_line() || !f_plus.domain().is_half_line())
        throw Error(ErrorKind::DomainMismatch, "half-line oscillation needs half-line weights");
    require_halfline_assumptions(f_minus, f_plus, g, r);

    // G = S + C a with S -> 0 turns the alpha condition into shifted envelopes
    const double a = (*f_plus.limit_at_infinity() - alpha * *f_minus.limit_at_infinity()) / (1.0 + alpha);
    const WeightFunction fp = f_plus.shifted(-a);
    const WeightFunction fm = f_minus.shifted(a);
    const GCalculus calc = build_calculus(g, r);
    Engine eng(calc, fm, fp, n, options);

    std::vector<double> y0;
    const bool warm = options.initial_zeros && static_cast<int>(options.initial_zeros->size()) == n;
    if (warm)
        for (double z : *options.initial_zeros) y0.push_back(eng.y_of(z));
    else
        y0 = eng.mass_fraction_start();

    Engine::Outcome out;
    std::string path = to_string(options.path);
    if (options.path == HalfLinePath::Direct || (warm && options.path == HalfLinePath::Continuation)) {
        out = eng.solve(y0);
        if (warm) path = "warm";
    } else {
        double far = 0.0;
        for (double y : y0) far = std::max(far, eng.t_of(y));
        const double A = truncation_point(calc, far, options.truncation_tol);
        const Domain d = Domain::segment(A);
        Engine seg(build_calculus(g.on_domain(d), r), fm.on_domain(d), fp.on_domain(d), n, options);
        std::vector<double> ys;
        for (double y : y0) ys.push_back(seg.y_of(eng.t_of(y)));
        const Engine::Outcome so = seg.solve(ys);
        std::vector<double> y1;
        for (double y : so.state.y) y1.push_back(eng.y_of(seg.t_of(y)));
        if (options.path == HalfLinePath::TruncatedOnly) {
            out = so;
            const PerfectGSpline& ss = so.state.fit.spline;
            out.state.fit.spline = make_spline(calc, ss.knots(), ss.leading_sign(), 0.0);
            out.state.y = y1;
        } else {
            Engine::Outcome polish = eng.solve(y1);
            polish.equalize_iterations += so.equalize_iterations;
            polish.newton_iterations += so.newton_iterations;
            out = std::move(polish);
        }
    }

    if (out.state.residual > options.accept_tol && options.path != HalfLinePath::TruncatedOnly &&
        (warm || options.path == HalfLinePath::Continuation)) {
        Engine::Outcome direct = eng.solve(eng.mass_fraction_start());
        if (direct.state.residual < out.state.residual) {
            direct.equalize_iterations += out.equalize_iterations;
            direct.newton_iterations += out.newton_iterations;
            out = std::move(direct);
            path += "+direct";
        }
    }

    OscillationSolution sol;
    sol.alpha = alpha;
    for (double y : out.state.y) sol.solver_zeros.push_back(eng.t_of(y));
    finish(sol, out, options, path);
    sol.spline = out.state.fit.spline.with_limit(sol.C * a);
    return sol;
}

double compute_Cn(int r, int n, double alpha, const WeightFunction& f_minus, const WeightFunction& f_plus,
                  const WeightFunction& g, const OscillateOptions& options)
{
    return oscillate_halfline(r, n, alpha, f_minus, f_plus, g, options).C;
}

CnCurve cn_curve(int r, int n, const std::vector<double>& alpha_grid, const WeightFunction& f_minus,
                 const WeightFunction& f_plus, const WeightFunction& g, const OscillateOptions& options,
                 bool warm_start)
{
    for (std::size_t i = 0; i < alpha_grid.size(); ++i)
        if (!(alpha_grid[i] > 0.0) || (i > 0 && !(alpha_grid[i] > alpha_grid[i - 1])))
            throw Error(ErrorKind::InvalidArgument, "alpha grid must be positive and increasing");

    auto solve = [&](double alpha, const OscillateOptions& opt) {
        CnPoint p;
        p.alpha = alpha;
        try {
            OscillateOptions o = opt;
            o.throw_on_failure = false;
            p.solution = oscillate_halfline(r, n, alpha, f_minus, f_plus, g, o);
            p.C = p.solution->C;
            p.ok = p.solution->diagnostics.converged;
            if (!p.ok) p.error = "NoConvergence";
        } catch (const Error& e) {
            p.error = e.what();
        }
        return p;
    };

    CnCurve curve;
    if (warm_start) {
        OscillateOptions opt = options;
        for (double alpha : alpha_grid) {
            CnPoint p = solve(alpha, opt);
            if (!p.ok) p = solve(alpha, options);  // retry cold
            if (p.ok) opt.initial_zeros = p.solution->solver_zeros;
            curve.points.push_back(std::move(p));
        }
    } else {
        curve.points = parallel_map(alpha_grid, [&](double alpha) { return solve(alpha, options); });
    }

    const double dir = (n % 2 == 1) ? 1.0 : -1.0;
    const CnPoint* prev = nullptr;
    for (const auto& p : curve.points) {
        if (!p.ok) continue;
        if (prev && dir * (p.C - prev->C) < -1e-7 * prev->C) curve.monotonicity_warning = true;
        prev = &p;
    }
    return curve;
}

}  // namespace oscispline

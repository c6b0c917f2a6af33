#include "oscispline/zerofit.hpp"

#include "oscispline/error.hpp"

#include <algorithm>
#include <cmath>

namespace oscispline {

namespace {

struct Bounds {
    std::vector<double> lo, hi;
};

// t_k lies between s_k and s_{k+r} (or the anchor) at every solution.
Bounds knot_bounds(const std::vector<double>& s, int r, double b)
{
    const std::size_t n = s.size();
    Bounds bd;
    for (std::size_t k = 0; k < n; ++k) {
        bd.lo.push_back(s[k]);
        bd.hi.push_back(k + r < n ? s[k + r] : b);
    }
    return bd;
}

std::vector<double> interleaved_guess(const std::vector<double>& s, double b, int r, double theta = 0.5)
{
    // t_k between s_k and s_{k+r}, zeros past s_n extrapolated
    const std::size_t n = s.size();
    const double h = n > 1 ? (s.back() - s.front()) / (n - 1) : std::max(1.0, s.back());
    auto ext = [&](std::size_t i) {
        if (i < n) return s[i];
        return std::min(b, s.back() + h * static_cast<double>(i - n + 1));
    };
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = s[k] + theta * (ext(k + static_cast<std::size_t>(r)) - s[k]);
    return t;
}

// |G(s)| <= Q_r(s); dividing by it balances the equations
double row_scale(const GCalculus& calc, double s)
{
    return std::max(calc.Q(calc.order(), s), 1e-300);
}

struct Residual {
    Eigen::VectorXd R;
    double norm = INFINITY;
};

Residual residual_at(const GCalculus& calc, const std::vector<double>& s, const std::vector<double>& t)
{
    const PerfectGSpline sp = make_spline(calc, t, 1, 0.0);
    Residual res;
    res.R.resize(static_cast<Eigen::Index>(s.size()));
    res.norm = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        res.R[static_cast<Eigen::Index>(i)] = sp.eval(0, s[i]) / row_scale(calc, s[i]);
        res.norm = std::max(res.norm, std::abs(res.R[static_cast<Eigen::Index>(i)]));
    }
    return res;
}

bool admissible(const std::vector<double>& t, const Bounds& bd)
{
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (!(t[k] > bd.lo[k] && t[k] < bd.hi[k])) return false;
        if (k > 0 && !(t[k] > t[k - 1])) return false;
    }
    return true;
}

struct NewtonOutcome {
    std::vector<double> t;
    double residual = INFINITY;
    int iterations = 0;
    bool converged = false;
};

NewtonOutcome damped_newton(const GCalculus& calc, const std::vector<double>& s, std::vector<double> t,
                            double tol, int max_iter)
{
    const int n = static_cast<int>(s.size());
    const Bounds bd = knot_bounds(s, calc.order(), calc.anchor());
    NewtonOutcome out;
    if (!admissible(t, bd)) t = interleaved_guess(s, calc.anchor(), calc.order());
    if (!admissible(t, bd)) return out;

    Residual cur = residual_at(calc, s, t);
    const double floor = 1e-15;
    bool stalled = false;
    for (int it = 0; it < max_iter && !stalled; ++it) {
        out.iterations = it + 1;
        if (cur.norm <= floor) break;
        const PerfectGSpline sp = make_spline(calc, t, 1, 0.0);
        Eigen::MatrixXd J(n, n);
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k) J(i, k) = sp.knot_derivative(0, k, s[i]) / row_scale(calc, s[i]);
        const Eigen::VectorXd step = J.partialPivLu().solve(-cur.R);
        if (!step.allFinite()) break;

        // fraction-to-boundary: keep knots sorted and inside their brackets
        double lambda = 1.0;
        for (int k = 0; k < n; ++k) {
            if (step[k] < 0) lambda = std::min(lambda, 0.5 * (t[k] - bd.lo[k]) / -step[k]);
            if (step[k] > 0 && std::isfinite(bd.hi[k])) lambda = std::min(lambda, 0.5 * (bd.hi[k] - t[k]) / step[k]);
            if (k + 1 < n && step[k] > step[k + 1])
                lambda = std::min(lambda, 0.5 * (t[k + 1] - t[k]) / (step[k] - step[k + 1]));
        }

        bool moved = false;
        for (int ls = 0; ls < 40; ++ls) {
            std::vector<double> trial(t);
            for (int k = 0; k < n; ++k) trial[k] += lambda * step[k];
            if (admissible(trial, bd)) {
                const Residual next = residual_at(calc, s, trial);
                if (next.R.squaredNorm() <= (1.0 - 1e-4 * lambda) * cur.R.squaredNorm() || next.norm <= floor) {
                    const double dt = (lambda * step).cwiseAbs().maxCoeff();
                    t = trial;
                    cur = next;
                    moved = true;
                    stalled = dt <= 1e-15 * (1.0 + std::abs(t.back()));
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!moved) break;
    }
    out.t = t;
    out.residual = cur.norm;
    out.converged = cur.norm <= tol;
    return out;
}

void validate_zeros(const GCalculus& calc, const std::vector<double>& s)
{
    if (s.empty()) throw Error(ErrorKind::InvalidArgument, "at least one zero is required");
    const double b = calc.anchor();
    const double length = std::isfinite(b) ? b : std::max(1.0, s.back());
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!std::isfinite(s[i]) || s[i] < 0.0 || s[i] >= b)
            throw Error(ErrorKind::OutOfDomain, "zeros must lie in [0, A)");
        if (i > 0 && !(s[i] > s[i - 1])) throw Error(ErrorKind::InvalidArgument, "zeros must increase");
        if (i > 0 && s[i] - s[i - 1] < 1e-10 * length)
            throw Error(ErrorKind::ZerosTooClose, "zeros closer than the resolution 1e-10 * A");
    }
    if (std::isfinite(b) && b - s.back() < 1e-10 * length)
        throw Error(ErrorKind::ZerosTooClose, "last zero too close to A");
}

// Zeros of the spline with knots t on (0, last knot].
std::vector<double> zeros_of(const GCalculus& calc, const std::vector<double>& t)
{
    const PerfectGSpline sp = make_spline(calc, t, 1, 0.0);
    const double end = t.back();
    std::vector<double> z;
    for (const auto& zz : sign_changes_and_zeros(sp, 0, 0.0, end, 2048))
        if (zz.sign_change) z.push_back(zz.t);
    return z;
}

}  // namespace

ZeroFitResult fit_knots(const ZeroFitProblem& problem)
{
    const GCalculus& calc = problem.calc;
    const std::vector<double>& s = problem.zeros;
    validate_zeros(calc, s);
    // scaled residuals G(s_k) / Q_r(s_k) <= zero_tol imply |G(s_k)| <= zero_tol * Q_r(0)
    const double tol = problem.options.zero_tol;

    std::vector<double> start = problem.initial_knots ? *problem.initial_knots : interleaved_guess(s, calc.anchor(), calc.order());
    if (start.size() != s.size()) start = interleaved_guess(s, calc.anchor(), calc.order());
    NewtonOutcome best = damped_newton(calc, s, start, tol, problem.options.max_newton);
    for (double theta : {0.5, 0.3, 0.7, 0.15, 0.85}) {
        if (best.converged) break;
        best = damped_newton(calc, s, interleaved_guess(s, calc.anchor(), calc.order(), theta), tol,
                             problem.options.max_newton);
    }

    bool homotopy = false;
    if (!best.converged) {
        // deform the zeros of a spline with known knots into the target zeros
        homotopy = true;
        std::vector<double> t = interleaved_guess(s, calc.anchor(), calc.order());
        const std::vector<double> s0 = zeros_of(calc, t);
        if (s0.size() == s.size()) {
            double lambda = 0.0, dl = 0.1;
            int steps = 0;
            while (lambda < 1.0 && steps++ < problem.options.max_homotopy_steps && dl > 1e-8) {
                const double next = std::min(1.0, lambda + dl);
                std::vector<double> sl(s.size());
                for (std::size_t i = 0; i < s.size(); ++i) sl[i] = (1.0 - next) * s0[i] + next * s[i];
                const NewtonOutcome o = damped_newton(calc, sl, t, tol, problem.options.max_newton);
                if (o.converged) {
                    t = o.t;
                    lambda = next;
                    dl *= 1.5;
                } else {
                    dl *= 0.5;
                }
            }
            if (lambda >= 1.0) best = damped_newton(calc, s, t, tol, problem.options.max_newton);
        }
    }
    if (!best.converged)
        throw Error(ErrorKind::NoConvergence, "knot fit did not converge",
                    best.residual * calc.Q(calc.order(), 0.0));

    PerfectGSpline sp = make_spline(calc, best.t, 1, 0.0);
    if (static_cast<std::size_t>(sp.knot_count()) != s.size())
        throw Error(ErrorKind::NoConvergence, "knot fit collapsed a knot pair", best.residual);
    double probe;
    if (s[0] > 0.0) probe = 0.5 * s[0];
    else if (s.size() > 1) probe = 0.5 * (s[0] + s[1]);
    else probe = best.t[0];
    if (sp.eval(0, probe) < 0.0) sp = sp.negated();

    double residual = 0.0;
    for (double z : s) residual = std::max(residual, std::abs(sp.eval(0, z)));
    return ZeroFitResult{sp, residual, best.iterations, homotopy};
}

Eigen::MatrixXd knot_sensitivity(const ZeroFitProblem& problem, const ZeroFitResult& solution, double h)
{
    const std::size_t n = problem.zeros.size();
    Eigen::MatrixXd J(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        auto solve_at = [&](double shift) {
            ZeroFitProblem p = problem;
            p.zeros[j] += shift;
            p.initial_knots = solution.spline.knots();
            return fit_knots(p).spline.knots();
        };
        const bool central = problem.zeros[j] - h >= 0.0;
        const std::vector<double> up = solve_at(h);
        const std::vector<double> down = central ? solve_at(-h) : solution.spline.knots();
        const double width = central ? 2.0 * h : h;
        for (std::size_t i = 0; i < n; ++i)
            J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (up[i] - down[i]) / width;
    }
    return J;
}

Eigen::MatrixXd knot_sensitivity_implicit(const ZeroFitProblem& problem, const ZeroFitResult& solution)
{
    const auto& s = problem.zeros;
    const auto& sp = solution.spline;
    const int n = static_cast<int>(s.size());
    Eigen::MatrixXd Jt(n, n), Js = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < n; ++k) Jt(i, k) = sp.knot_derivative(0, k, s[i]);
        Js(i, i) = sp.eval(1, s[i]);
    }
    return -Jt.partialPivLu().solve(Js);
}

}  // namespace oscispline

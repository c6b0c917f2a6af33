#include "oscispline/oracle.hpp"

#include "oscispline/error.hpp"
#include "oscispline/parallel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

namespace oscispline {

namespace {

constexpr std::array<double, 8> kNode = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290,
                                         -0.1834346424956498, 0.1834346424956498,  0.5255324099163290,
                                         0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kWeight = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873,
                                           0.3626837833783620, 0.3626837833783620, 0.3137066458778873,
                                           0.2223810344533745, 0.1012285362903763};

// out[m] = int_a^b (a - s)^m / m! g(s) ds, m < r
void panel_moments(const WeightFunction& g, double a, double b, int r, double* out)
{
    std::fill(out, out + r, 0.0);
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    for (int q = 0; q < 8; ++q) {
        const double s = c + h * kNode[q];
        double term = h * kWeight[q] * g(s);
        for (int m = 0; m < r; ++m) {
            out[m] += term;
            term *= (a - s) / (m + 1);
        }
    }
}

// int_T^inf (s - T)^(m-1) / (m-1)! g(s) ds, m >= 1
double tail_moment(const WeightFunction& g, double T, int m)
{
    double sum = 0.0, s0 = T, w = 1.0;
    for (int i = 0; i < 200; ++i, s0 += w, w *= 2.0) {
        double part = 0.0;
        for (int sub = 0; sub < 4; ++sub) {
            const double a = s0 + w * sub / 4.0, h = w / 8.0, c = a + h;
            for (int q = 0; q < 8; ++q) {
                const double s = c + h * kNode[q];
                double poly = 1.0;
                for (int j = 1; j < m; ++j) poly *= (s - T) / j;
                part += h * kWeight[q] * poly * g(s);
            }
        }
        sum += part;
        if (i >= 10 && std::abs(part) <= 1e-17 * std::abs(sum)) return sum;
    }
    return std::numeric_limits<double>::infinity();
}

// Uniform panels on [0, T] with cached moments; knots split panels on the fly.
struct Grid {
    int r = 1;
    double T = 0.0;
    int N = 0;
    bool half_line = false;
    std::vector<double> t;
    std::vector<double> mom;   // N x r
    std::vector<double> mass;  // cumulative int_0^t g
    std::vector<double> tailQ; // Q_m(T), m = 0..r

    Grid(const WeightFunction& g, int r_, double T_, int N_, bool half)
        : r(r_), T(T_), N(N_), half_line(half), t(N_ + 1), mom(static_cast<std::size_t>(N_ * r_)),
          mass(N_ + 1, 0.0), tailQ(r_ + 1, 0.0)
    {
        for (int i = 0; i <= N; ++i) t[i] = T * i / N;
        std::vector<double> m(static_cast<std::size_t>(r));
        for (int i = 0; i < N; ++i) {
            panel_moments(g, t[i], t[i + 1], r, &mom[static_cast<std::size_t>(i * r)]);
            mass[i + 1] = mass[i] + mom[static_cast<std::size_t>(i * r)];
        }
        if (half_line)
            for (int k = 1; k <= r; ++k) tailQ[k] = tail_moment(g, T, k);
    }

    double t_of_mass(double m) const
    {
        const double target = m * mass.back();
        const auto it = std::upper_bound(mass.begin(), mass.end(), target);
        const std::size_t i = std::min<std::size_t>(std::max<std::ptrdiff_t>(it - mass.begin(), 1), N) - 1;
        const double span = mass[i + 1] - mass[i];
        const double frac = span > 0 ? (target - mass[i]) / span : 0.5;
        return t[i] + std::clamp(frac, 0.0, 1.0) * (t[i + 1] - t[i]);
    }
};

// Samples of x, x', ..., x^(r-1) at the grid points and knots.
struct Profile {
    std::vector<double> t;
    std::vector<double> d;  // row i: derivatives at t[i]
    double tail_q = 0.0;    // |x(T) - L|
};

Profile integrate(const Grid& G, const WeightFunction& g, const std::vector<double>& knots, double L)
{
    const int r = G.r;
    Profile p;
    std::vector<int> panel;  // grid index, -1 for an inserted knot
    std::vector<char> is_knot;
    {
        std::size_t kn = 0;
        for (int i = 0; i <= G.N; ++i) {
            bool on_grid = false;
            for (; kn < knots.size() && knots[kn] <= G.t[i]; ++kn) {
                if (knots[kn] == G.t[i]) {
                    on_grid = true;
                    continue;
                }
                p.t.push_back(knots[kn]);
                panel.push_back(-1);
                is_knot.push_back(1);
            }
            p.t.push_back(G.t[i]);
            panel.push_back(i);
            is_knot.push_back(on_grid);
        }
    }
    const std::size_t P = p.t.size();
    p.d.assign(P * static_cast<std::size_t>(r), 0.0);
    const int n = static_cast<int>(knots.size());
    double sigma = (n % 2 == 0) ? 1.0 : -1.0;

    // right end: L + sigma P_r beyond the last knot, P_m = (-1)^m Q_m
    double* last = &p.d[(P - 1) * r];
    for (int j = 0; j < r; ++j) {
        const int m = r - j;
        last[j] = sigma * ((m % 2 == 0) ? 1.0 : -1.0) * G.tailQ[m];
    }
    p.tail_q = std::abs(last[0]);
    last[0] += L;

    std::vector<double> M(static_cast<std::size_t>(r));
    for (std::size_t i = P - 1; i-- > 0;) {
        const double a = p.t[i], b = p.t[i + 1];
        // sign on (a, b): flips once per knot at or right of b
        if (is_knot[i + 1]) sigma = -sigma;
        const double* mom;
        if (panel[i] >= 0 && panel[i + 1] >= 0) {
            mom = &G.mom[static_cast<std::size_t>(panel[i] * r)];
        } else {
            panel_moments(g, a, b, r, M.data());
            mom = M.data();
        }
        const double h = a - b;
        const double* xb = &p.d[(i + 1) * r];
        double* xa = &p.d[i * r];
        for (int j = 0; j < r; ++j) {
            double v = 0.0, c = 1.0;
            for (int k = 0; j + k < r; ++k) {
                v += xb[j + k] * c;
                c *= h / (k + 1);
            }
            xa[j] = v - sigma * mom[r - 1 - j];
        }
    }
    return p;
}

Grid make_grid(const WeightFunction& g, int r, const Domain& domain, const BruteForceConfig& cfg)
{
    if (cfg.knot_grid_resolution < 16 || cfg.sample_grid_resolution < 16)
        throw Error(ErrorKind::InvalidArgument, "grid resolutions must be at least 16");
    if (domain.is_half_line()) {
        const double T = cfg.truncation_T > 0 ? cfg.truncation_T : oracle_truncation_point(g, r, cfg.tail_tol);
        return Grid(g, r, T, cfg.sample_grid_resolution, true);
    }
    return Grid(g, r, domain.length, cfg.sample_grid_resolution, false);
}

struct Lobes {
    double residual = 0.0;
    std::vector<double> levels;
};

Lobes lobe_levels(const Profile& p, int r, int n, const std::function<double(double)>& fm,
                  const std::function<double(double)>& fp)
{
    double xmax = 0.0;
    for (std::size_t i = 0; i < p.t.size(); ++i) xmax = std::max(xmax, std::abs(p.d[i * r]));
    const double thr = 1e-12 * xmax;
    std::vector<int> sign;
    std::vector<double> level;
    double flip = 0.0;
    for (std::size_t i = 0; i < p.t.size(); ++i) {
        double x = p.d[i * r];
        if (std::abs(x) <= thr) continue;
        if (flip == 0.0) flip = x > 0 ? 1.0 : -1.0;  // first lobe positive
        x *= flip;
        const int s = x > 0 ? 1 : -1;
        const double lv = s > 0 ? x / fp(p.t[i]) : -x / fm(p.t[i]);
        if (sign.empty() || sign.back() != s) {
            sign.push_back(s);
            level.push_back(lv);
        } else {
            level.back() = std::max(level.back(), lv);
        }
    }
    Lobes out;
    out.levels = level;
    if (static_cast<int>(level.size()) != n + 1) {
        out.residual = 1e6 + std::abs(static_cast<double>(level.size()) - (n + 1));
        return out;
    }
    const auto [lo, hi] = std::minmax_element(level.begin(), level.end());
    out.residual = (*hi - *lo) / *lo;
    return out;
}

void sorted_tuples(const std::vector<std::vector<double>>& axes, std::vector<double>& cur,
                   std::vector<std::vector<double>>& out)
{
    const std::size_t d = cur.size();
    if (d == axes.size()) {
        out.push_back(cur);
        return;
    }
    for (double v : axes[d]) {
        if (v <= 0.0 || v >= 1.0 || (d > 0 && v <= cur.back())) continue;
        cur.push_back(v);
        sorted_tuples(axes, cur, out);
        cur.pop_back();
    }
}

}  // namespace

double oracle_truncation_point(const WeightFunction& g, int r, double tol)
{
    for (double T = 1.0; T < 1e6; T *= 1.25) {
        bool ok = true;
        for (int m = 1; m <= r && ok; ++m) ok = tail_moment(g, T, m) < tol;
        if (ok) return T;
    }
    throw Error(ErrorKind::InvalidArgument, "tail moments of g do not fall below the tolerance");
}

BruteOscillation brute_oscillation(int r, int n, const Domain& domain, double alpha, const WeightFunction& f_minus,
                                   const WeightFunction& f_plus, const WeightFunction& g,
                                   const BruteForceConfig& cfg)
{
    if (r < 1 || n < 1 || n > 3) throw Error(ErrorKind::InvalidArgument, "brute force needs r >= 1 and 1 <= n <= 3");
    const Grid G = make_grid(g, r, domain, cfg);

    // boundary ratio at infinity as a constant shift of the envelopes
    double shift = 0.0;
    if (domain.is_half_line()) {
        if (!(alpha > 0.0)) throw Error(ErrorKind::InvalidArgument, "alpha must be positive");
        shift = (f_plus.end_value() - alpha * f_minus.end_value()) / (1.0 + alpha);
    }
    const std::function<double(double)> fp = [&](double t) { return f_plus(t) - shift; };
    const std::function<double(double)> fm = [&](double t) { return f_minus(t) + shift; };

    auto evaluate = [&](const std::vector<double>& m) {
        std::vector<double> knots(m.size());
        for (std::size_t i = 0; i < m.size(); ++i) knots[i] = G.t_of_mass(m[i]);
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (!(knots[i] > knots[i - 1])) return Lobes{1e9, {}};
        return lobe_levels(integrate(G, g, knots, 0.0), r, n, fm, fp);
    };

    BruteOscillation out;
    std::vector<double> best;
    double best_res = std::numeric_limits<double>::infinity();
    auto scan = [&](const std::vector<std::vector<double>>& axes) {
        std::vector<std::vector<double>> tuples;
        std::vector<double> cur;
        sorted_tuples(axes, cur, tuples);
        const auto res = parallel_map(tuples, [&](const std::vector<double>& m) { return evaluate(m).residual; });
        out.evaluations += static_cast<long>(tuples.size());
        // strict improvement keeps the lexicographically first optimum
        for (std::size_t i = 0; i < tuples.size(); ++i)
            if (res[i] < best_res) {
                best_res = res[i];
                best = tuples[i];
            }
    };

    const int K = cfg.knot_grid_resolution;
    std::vector<double> axis(static_cast<std::size_t>(K));
    for (int i = 0; i < K; ++i) axis[i] = (i + 0.5) / K;
    scan(std::vector<std::vector<double>>(static_cast<std::size_t>(n), axis));

    double w = 1.0 / K;
    const int Z = cfg.zoom_resolution;
    for (int level = 0; level < cfg.zoom_levels && !best.empty(); ++level) {
        std::vector<std::vector<double>> axes;
        for (double c : best) {
            std::vector<double> ax;
            for (int j = -Z; j <= Z; ++j) ax.push_back(c + w * j / Z);
            axes.push_back(ax);
        }
        scan(axes);
        w /= 4.0;
    }
    if (best.empty()) return out;

    const Lobes lb = evaluate(best);
    for (double m : best) out.knots.push_back(G.t_of_mass(m));
    out.deltas = lb.levels;
    out.residual = lb.residual;
    double sum = 0.0;
    for (double v : lb.levels) sum += v;
    out.C = lb.levels.empty() ? 0.0 : sum / static_cast<double>(lb.levels.size());
    return out;
}

double brute_omega_lower_bound(int r, int k, double delta, const WeightFunction& f, const WeightFunction& g,
                               const BruteForceConfig& cfg)
{
    if (r < 2 || k < 1 || k > r - 1) throw Error(ErrorKind::PreconditionViolated, "needs r >= 2 and 1 <= k <= r-1");
    if (!(delta > 0.0)) throw Error(ErrorKind::PreconditionViolated, "delta must be positive");
    if (!f.limit_at_infinity() || !(*f.limit_at_infinity() > 0.0))
        throw Error(ErrorKind::AssumptionsNotVerified, "f needs a positive limit");
    const Grid G = make_grid(g, r, Domain::half_line(), cfg);
    const double f_inf = *f.limit_at_infinity();

    struct Candidate {
        double deriv = 0.0;
        double norm = std::numeric_limits<double>::infinity();
    };
    // |x(t)| on each panel is bounded through the linear interpolation error
    // h^2/8 max|x''|, with max|x''| bounded from the higher derivatives.
    auto assess = [&](const std::vector<double>& m) {
        std::vector<double> knots;
        for (double v : m) knots.push_back(G.t_of_mass(v));
        for (std::size_t i = 1; i < knots.size(); ++i)
            if (!(knots[i] > knots[i - 1])) return Candidate{};
        const Profile p = integrate(G, g, knots, 0.0);
        const std::size_t P = p.t.size();
        std::vector<double> U(P), D(P), W(P);
        for (std::size_t i = 0; i + 1 < P; ++i) {
            const double a = p.t[i], b = p.t[i + 1], h = b - a;
            double B = std::max(g(a), g(b)) * (1.0 + 1e-9);
            for (int j = r - 1; j >= 2; --j)
                B = std::max(std::abs(p.d[i * r + j]), std::abs(p.d[(i + 1) * r + j])) + h * B;
            const double e = h * h / 8.0 * B * (1.0 + 1e-9);
            const double xa = p.d[i * r], xb = p.d[(i + 1) * r];
            U[i] = std::max(xa, xb) + e;
            D[i] = std::min(xa, xb) - e;
            W[i] = std::min(f(a), f(b));
        }
        U[P - 1] = p.tail_q;
        D[P - 1] = -p.tail_q;
        W[P - 1] = f_inf;
        auto N = [&](double L) {
            double v = 0.0;
            for (std::size_t i = 0; i < P; ++i) v = std::max(v, std::max(U[i] + L, -(D[i] + L)) / W[i]);
            return v;
        };
        double X = 0.0;
        for (std::size_t i = 0; i < P; ++i) X = std::max({X, std::abs(U[i]), std::abs(D[i])});
        double lo = -X, hi = X;
        const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
        double x1 = hi - phi * (hi - lo), x2 = lo + phi * (hi - lo), n1 = N(x1), n2 = N(x2);
        for (int it = 0; it < 100 && hi - lo > 1e-14 * X; ++it) {
            if (n1 < n2) {
                hi = x2;
                x2 = x1;
                n2 = n1;
                x1 = hi - phi * (hi - lo);
                n1 = N(x1);
            } else {
                lo = x1;
                x1 = x2;
                n1 = n2;
                x2 = lo + phi * (hi - lo);
                n2 = N(x2);
            }
        }
        return Candidate{std::abs(p.d[k]), std::min(n1, n2)};
    };

    std::vector<std::vector<double>> tuples{{}};
    const int K = cfg.knot_grid_resolution;
    for (int i = 0; i < 2 * K; ++i) tuples.push_back({(i + 0.5) / (2 * K)});
    std::vector<double> axis;
    for (int i = 0; i < K; ++i) axis.push_back((i + 0.5) / K);
    std::vector<double> cur;
    sorted_tuples({axis, axis}, cur, tuples);

    const auto cands = parallel_map(tuples, assess);
    double best = 0.0;
    for (const auto& c : cands) {
        if (!std::isfinite(c.norm) || !(c.norm > 0.0)) continue;
        const double lambda = std::min(1.0, delta / (c.norm * (1.0 + 1e-10)));
        best = std::max(best, lambda * c.deriv);
    }
    return best;
}

}  // namespace oscispline

#include "oscispline/weights.hpp"

#include "oscispline/error.hpp"
#include "oscispline/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace oscispline {

Domain Domain::segment(double A)
{
    if (!(A > 0.0) || !std::isfinite(A))
        throw Error(ErrorKind::InvalidArgument, "segment length must be positive and finite");
    return Domain{Kind::Segment, A};
}

// Fritsch-Carlson monotone piecewise cubic Hermite interpolant.
class MonotoneCubic {
public:
    MonotoneCubic(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)), d_(x_.size(), 0.0)
    {
        const std::size_t n = x_.size();
        if (n < 2) return;
        std::vector<double> delta(n - 1);
        for (std::size_t i = 0; i + 1 < n; ++i)
            delta[i] = (y_[i + 1] - y_[i]) / (x_[i + 1] - x_[i]);
        d_[0] = delta[0];
        d_[n - 1] = delta[n - 2];
        for (std::size_t i = 1; i + 1 < n; ++i) {
            if (delta[i - 1] * delta[i] <= 0.0) {
                d_[i] = 0.0;
            } else {
                // weighted harmonic mean
                const double h0 = x_[i] - x_[i - 1];
                const double h1 = x_[i + 1] - x_[i];
                const double w0 = 2.0 * h1 + h0;
                const double w1 = h1 + 2.0 * h0;
                d_[i] = (w0 + w1) / (w0 / delta[i - 1] + w1 / delta[i]);
            }
        }
        // endpoint slopes must not break monotonicity
        for (std::size_t i : {std::size_t{0}, n - 1}) {
            const double del = (i == 0) ? delta[0] : delta[n - 2];
            if (d_[i] * del <= 0.0) d_[i] = 0.0;
            else if (std::abs(d_[i]) > 3.0 * std::abs(del)) d_[i] = 3.0 * del;
        }
    }

    double operator()(double t) const
    {
        if (x_.size() == 1 || t <= x_.front()) return y_.front();
        if (t >= x_.back()) return y_.back();
        const auto it = std::upper_bound(x_.begin(), x_.end(), t);
        const std::size_t i = static_cast<std::size_t>(it - x_.begin()) - 1;
        const double h = x_[i + 1] - x_[i];
        const double s = (t - x_[i]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * y_[i] + h10 * h * d_[i] + h01 * y_[i + 1] + h11 * h * d_[i + 1];
    }

private:
    std::vector<double> x_, y_, d_;
};

namespace {

template <class... Ts>
struct Overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite(std::initializer_list<double> values)
{
    for (double v : values)
        if (!std::isfinite(v))
            throw Error(ErrorKind::InvalidArgument, "weight parameters must be finite");
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) parts.push_back(item);
    return parts;
}

double parse_number(const std::string& text)
{
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "not a number: '" + text + "'");
    }
}

}  // namespace

double WeightFunction::operator()(double t) const
{
    return std::visit(Overloaded{
                          [](const ConstantFamily& c) { return c.value; },
                          [t](const ExpDecayFamily& e) { return e.base + e.amplitude * std::exp(-e.rate * t); },
                          [t](const PowerDecayFamily& p) {
                              return p.base + p.amplitude * std::pow(1.0 + t, -p.exponent);
                          },
                          [this, t](const TabulatedFamily&) { return (*interp_)(t); },
                      },
                      family_);
}

double WeightFunction::end_value() const
{
    if (domain_.is_half_line()) return *limit_;
    return (*this)(domain_.length);
}

WeightFunction WeightFunction::shifted(double c) const
{
    WeightFamily fam = std::visit(Overloaded{
                                      [c](ConstantFamily f) -> WeightFamily { f.value += c; return f; },
                                      [c](ExpDecayFamily f) -> WeightFamily { f.base += c; return f; },
                                      [c](PowerDecayFamily f) -> WeightFamily { f.base += c; return f; },
                                      [c](TabulatedFamily f) -> WeightFamily {
                                          for (double& w : f.w) w += c;
                                          return f;
                                      },
                                  },
                                  family_);
    return make_weight(fam, domain_);
}

WeightFunction WeightFunction::scaled(double lambda) const
{
    if (!(lambda > 0.0)) throw Error(ErrorKind::NonPositive, "scale factor must be positive");
    WeightFamily fam = std::visit(Overloaded{
                                      [lambda](ConstantFamily f) -> WeightFamily { f.value *= lambda; return f; },
                                      [lambda](ExpDecayFamily f) -> WeightFamily {
                                          f.base *= lambda;
                                          f.amplitude *= lambda;
                                          return f;
                                      },
                                      [lambda](PowerDecayFamily f) -> WeightFamily {
                                          f.base *= lambda;
                                          f.amplitude *= lambda;
                                          return f;
                                      },
                                      [lambda](TabulatedFamily f) -> WeightFamily {
                                          for (double& w : f.w) w *= lambda;
                                          return f;
                                      },
                                  },
                                  family_);
    return make_weight(fam, domain_);
}

WeightFunction WeightFunction::on_domain(const Domain& d) const { return make_weight(family_, d); }

std::string WeightFunction::describe() const
{
    std::ostringstream os;
    os.precision(17);
    std::visit(Overloaded{
                   [&](const ConstantFamily& c) { os << "const:" << c.value; },
                   [&](const ExpDecayFamily& e) { os << "exp:" << e.base << ',' << e.amplitude << ',' << e.rate; },
                   [&](const PowerDecayFamily& p) {
                       os << "power:" << p.base << ',' << p.amplitude << ',' << p.exponent;
                   },
                   [&](const TabulatedFamily& t) { os << "tab:" << t.t.size() << " samples"; },
               },
               family_);
    return os.str();
}

WeightFunction make_weight(const WeightFamily& family, const Domain& domain)
{
    WeightFunction w;
    w.family_ = family;
    w.domain_ = domain;
    const bool half = domain.is_half_line();

    std::visit(Overloaded{
                   [&](const ConstantFamily& c) {
                       require_finite({c.value});
                       if (!(c.value > 0.0)) throw Error(ErrorKind::NonPositive, "constant weight must be > 0");
                       w.monotone_ = true;
                       w.limit_ = c.value;
                   },
                   [&](const ExpDecayFamily& e) {
                       require_finite({e.base, e.amplitude, e.rate});
                       const bool grows = e.amplitude != 0.0 && e.rate < 0.0;
                       if (half && grows && e.amplitude > 0.0)
                           throw Error(ErrorKind::MissingLimit, "growing exponential has no limit at infinity");
                       const double at0 = e.base + e.amplitude;
                       const double atEnd = half ? (e.rate == 0.0 ? at0 : (grows ? -INFINITY : e.base))
                                                 : e.base + e.amplitude * std::exp(-e.rate * domain.length);
                       const bool decays_to_zero_only = half && atEnd == 0.0 && e.amplitude > 0.0 && e.rate > 0.0;
                       if (!(at0 > 0.0) || !(atEnd > 0.0 || decays_to_zero_only))
                           throw Error(ErrorKind::NonPositive, "exponential weight is not positive on the domain");
                       w.monotone_ = e.amplitude == 0.0 || e.amplitude * e.rate >= 0.0;
                       if (half) w.limit_ = (e.rate == 0.0) ? at0 : e.base;
                   },
                   [&](const PowerDecayFamily& p) {
                       require_finite({p.base, p.amplitude, p.exponent});
                       const bool grows = p.amplitude != 0.0 && p.exponent < 0.0;
                       if (half && grows && p.amplitude > 0.0)
                           throw Error(ErrorKind::MissingLimit, "growing power weight has no limit at infinity");
                       const double at0 = p.base + p.amplitude;
                       const double atEnd = half ? (p.exponent == 0.0 ? at0 : (grows ? -INFINITY : p.base))
                                                 : p.base + p.amplitude * std::pow(1.0 + domain.length, -p.exponent);
                       const bool decays_to_zero_only =
                           half && atEnd == 0.0 && p.amplitude > 0.0 && p.exponent > 0.0;
                       if (!(at0 > 0.0) || !(atEnd > 0.0 || decays_to_zero_only))
                           throw Error(ErrorKind::NonPositive, "power weight is not positive on the domain");
                       w.monotone_ = p.amplitude == 0.0 || p.amplitude * p.exponent >= 0.0;
                       if (half) w.limit_ = (p.exponent == 0.0) ? at0 : p.base;
                   },
                   [&](const TabulatedFamily& t) {
                       if (t.t.empty() || t.t.size() != t.w.size())
                           throw Error(ErrorKind::InvalidArgument, "tabulated weight needs matching non-empty columns");
                       for (std::size_t i = 0; i < t.t.size(); ++i) {
                           require_finite({t.t[i], t.w[i]});
                           if (i > 0 && !(t.t[i] > t.t[i - 1]))
                               throw Error(ErrorKind::InvalidArgument, "tabulated abscissae must increase");
                           if (!(t.w[i] > 0.0))
                               throw Error(ErrorKind::NonPositive, "tabulated weight has a non-positive sample");
                       }
                       w.interp_ = std::make_shared<MonotoneCubic>(t.t, t.w);
                       w.monotone_ = std::is_sorted(t.w.rbegin(), t.w.rend());
                       if (half) w.limit_ = t.w.back();
                   },
               },
               family);
    return w;
}

TabulatedFamily load_tabulated_csv(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::InvalidArgument, "cannot open weight table '" + path + "'");
    TabulatedFamily table;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto cols = split(line, ',');
        if (cols.size() < 2) throw Error(ErrorKind::InvalidArgument, "weight table rows need two columns");
        try {
            table.t.push_back(parse_number(cols[0]));
            table.w.push_back(parse_number(cols[1]));
        } catch (const Error&) {
            if (!first) throw;  // only the first line may be a header
        }
        first = false;
    }
    return table;
}

WeightFunction parse_weight(const std::string& spec, const Domain& domain)
{
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw Error(ErrorKind::InvalidArgument, "weight spec must look like family:params, got '" + spec + "'");
    const std::string family = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (family == "tab" || family == "tabulated")
        return make_weight(load_tabulated_csv(rest), domain);

    std::vector<double> params;
    for (const auto& p : split(rest, ',')) params.push_back(parse_number(p));
    auto need = [&](std::size_t n) {
        if (params.size() != n)
            throw Error(ErrorKind::InvalidArgument,
                        "weight family '" + family + "' takes " + std::to_string(n) + " parameters");
    };
    if (family == "const" || family == "constant") {
        need(1);
        return make_weight(ConstantFamily{params[0]}, domain);
    }
    if (family == "exp") {
        need(3);
        return make_weight(ExpDecayFamily{params[0], params[1], params[2]}, domain);
    }
    if (family == "power") {
        need(3);
        return make_weight(PowerDecayFamily{params[0], params[1], params[2]}, domain);
    }
    throw Error(ErrorKind::InvalidArgument, "unknown weight family '" + family + "'");
}

// ---------------------------------------------------------------------------
// assumptions

namespace {

// Asymptotic class of a non-negative function that tends to zero.
struct Decay {
    enum class Kind { Vanishing, Exponential, Power, None } kind = Kind::None;
    double rate = 0.0;
};

// Decay class of f(t) - f(inf).
Decay excess_decay(const WeightFunction& f)
{
    return std::visit(Overloaded{
                          [](const ConstantFamily&) { return Decay{Decay::Kind::Vanishing, 0.0}; },
                          [](const ExpDecayFamily& e) {
                              if (e.amplitude == 0.0 || e.rate == 0.0) return Decay{Decay::Kind::Vanishing, 0.0};
                              return Decay{Decay::Kind::Exponential, e.rate};
                          },
                          [](const PowerDecayFamily& p) {
                              if (p.amplitude == 0.0 || p.exponent == 0.0) return Decay{Decay::Kind::Vanishing, 0.0};
                              return Decay{Decay::Kind::Power, p.exponent};
                          },
                          // constant beyond the last sample
                          [](const TabulatedFamily&) { return Decay{Decay::Kind::Vanishing, 0.0}; },
                      },
                      f.family());
}

// Decay class of |P_r| for an integrable g; None when the moments diverge.
Decay primitive_decay(const WeightFunction& g, int r)
{
    return std::visit(Overloaded{
                          [](const ConstantFamily&) { return Decay{}; },
                          [](const ExpDecayFamily& e) {
                              if (e.base == 0.0 && e.rate > 0.0 && e.amplitude > 0.0)
                                  return Decay{Decay::Kind::Exponential, e.rate};
                              return Decay{};
                          },
                          [r](const PowerDecayFamily& p) {
                              if (p.base == 0.0 && p.amplitude > 0.0 && p.exponent > r)
                                  return Decay{Decay::Kind::Power, p.exponent - r};
                              return Decay{};
                          },
                          [](const TabulatedFamily&) { return Decay{}; },
                      },
                      g.family());
}

// Decay of f itself when f(inf) = 0.
Decay own_decay(const WeightFunction& f)
{
    Decay d = excess_decay(f);
    return d;
}

// true when a/b -> 0 (liminf ratio zero) for decays a (numerator) and b.
bool decays_faster(const Decay& a, const Decay& b)
{
    using K = Decay::Kind;
    if (a.kind == K::Vanishing) return true;
    if (b.kind == K::None) return false;
    if (a.kind == K::Exponential) return b.kind == K::Power || a.rate > b.rate;
    if (a.kind == K::Power) return b.kind == K::Power && a.rate > b.rate;
    return false;
}

// true when a/b stays bounded.
bool decays_at_least_as_fast(const Decay& a, const Decay& b)
{
    using K = Decay::Kind;
    if (a.kind == K::Vanishing) return true;
    if (b.kind == K::None) return false;
    if (a.kind == K::Exponential) return b.kind == K::Power || a.rate >= b.rate;
    if (a.kind == K::Power) return b.kind == K::Power && a.rate >= b.rate;
    return false;
}

bool sampled_positive(const WeightFunction& w, double end)
{
    for (int i = 0; i <= 1024; ++i)
        if (!(w(end * i / 1024.0) > 0.0)) return false;
    return true;
}

bool sampled_nonincreasing(const WeightFunction& w, double end)
{
    double prev = w(0.0);
    for (int i = 1; i <= 1024; ++i) {
        const double v = w(end * i / 1024.0);
        if (v > prev * (1.0 + 1e-14)) return false;
        prev = v;
    }
    return true;
}

double sampling_end(const WeightFunction& w)
{
    if (!w.domain().is_half_line()) return w.domain().length;
    if (const auto* t = std::get_if<TabulatedFamily>(&w.family())) return std::max(1.0, 2.0 * t->t.back());
    return 100.0;
}

}  // namespace

bool AssumptionReport::all_pass() const
{
    for (const auto& [name, check] : items())
        if (!check.pass) return false;
    return true;
}

std::vector<std::pair<std::string, AssumptionCheck>> AssumptionReport::items() const
{
    return {{"positivity", positivity},         {"monotonicity", monotonicity},
            {"limit_positive", limit_positive}, {"g_integrable", g_integrable},
            {"tail_constants", tail_constants}, {"liminf_condition", liminf_condition},
            {"sup_condition", sup_condition}};
}

AssumptionReport check_assumptions(const WeightFunction& f_minus, const WeightFunction& f_plus,
                                   const WeightFunction& g, int r)
{
    if (r < 1) throw Error(ErrorKind::InvalidArgument, "order r must be positive");
    if (!(f_minus.domain() == f_plus.domain()) || !(f_minus.domain() == g.domain()))
        throw Error(ErrorKind::DomainMismatch, "f-, f+ and g must share one domain");

    AssumptionReport report;
    const std::pair<const char*, const WeightFunction*> all[] = {{"f-", &f_minus}, {"f+", &f_plus}, {"g", &g}};

    for (const auto& [name, w] : all) {
        if (w->is_tabulated()) {
            report.positivity.heuristic = true;
            if (!sampled_positive(*w, sampling_end(*w))) {
                report.positivity.pass = false;
                report.positivity.detail += std::string(name) + " not positive; ";
            }
        }
    }
    if (report.positivity.detail.empty()) report.positivity.detail = "all weights positive";

    if (!g.domain().is_half_line()) {
        const char* na = "not required on a segment";
        report.monotonicity.detail = na;
        report.limit_positive.detail = na;
        report.g_integrable.detail = "finite on a segment";
        report.tail_constants.detail = "finite on a segment";
        report.liminf_condition.detail = na;
        report.sup_condition.detail = na;
        return report;
    }

    for (const auto& [name, w] : all) {
        bool mono = w->monotone_nonincreasing();
        if (w->is_tabulated()) {
            report.monotonicity.heuristic = true;
            mono = mono && sampled_nonincreasing(*w, sampling_end(*w));
        }
        if (!mono) {
            report.monotonicity.pass = false;
            report.monotonicity.detail += std::string(name) + " is not non-increasing; ";
        }
    }
    if (report.monotonicity.pass) report.monotonicity.detail = "f-, f+, g non-increasing";

    for (const auto& [name, w] : {all[0], all[1]}) {
        if (!(*w->limit_at_infinity() > 0.0)) {
            report.limit_positive.pass = false;
            report.limit_positive.detail += std::string(name) + "(inf) = 0; ";
        }
    }
    if (report.limit_positive.pass) report.limit_positive.detail = "f-(inf) > 0 and f+(inf) > 0";

    const Decay g1 = primitive_decay(g, 0);
    report.g_integrable.pass = g1.kind != Decay::Kind::None && !(g1.kind == Decay::Kind::Power && g1.rate <= 1.0);
    if (const auto* p = std::get_if<PowerDecayFamily>(&g.family()))
        report.g_integrable.pass = p->base == 0.0 && p->amplitude > 0.0 && p->exponent > 1.0;
    report.g_integrable.detail = report.g_integrable.pass ? "A_0 finite" : "integral of g diverges";

    const Decay pr = primitive_decay(g, r);
    report.tail_constants.pass = report.g_integrable.pass && pr.kind != Decay::Kind::None;
    report.tail_constants.detail = report.tail_constants.pass ? "A_1 ... A_{r-1} finite" : "a tail constant diverges";

    for (const auto& [name, w] : {all[0], all[1]}) {
        if (!decays_faster(excess_decay(*w), pr)) {
            report.liminf_condition.pass = false;
            report.liminf_condition.detail += std::string(name) + ": (f - f(inf))/P_r does not tend to 0; ";
        }
        const bool bounded = report.tail_constants.pass &&
                             (*w->limit_at_infinity() > 0.0 || decays_at_least_as_fast(pr, own_decay(*w)));
        if (!bounded) {
            report.sup_condition.pass = false;
            report.sup_condition.detail += std::string(name) + ": |P_r|/f unbounded; ";
        }
    }
    if (report.liminf_condition.pass) report.liminf_condition.detail = "liminf (f - f(inf))/P_r = 0";
    if (report.sup_condition.pass) report.sup_condition.detail = "sup |P_r|/f finite";
    return report;
}

// ---------------------------------------------------------------------------
// weighted norm

NormResult weighted_norm_detail(const std::function<double(double)>& x, const WeightFunction& f_minus,
                                const WeightFunction& f_plus, const NormOptions& options)
{
    if (!(f_minus.domain() == f_plus.domain()))
        throw Error(ErrorKind::DomainMismatch, "f- and f+ must share one domain");

    auto h = [&](double t) {
        const double v = x(t);
        return v >= 0.0 ? v / f_plus(t) : -v / f_minus(t);
    };

    const bool half = !options.end && f_plus.domain().is_half_line();
    NormResult best;
    best.value = h(0.0);

    double limit_value = 0.0;
    if (half && options.limit) {
        const double L = *options.limit;
        const double fp = f_plus.end_value();
        const double fm = f_minus.end_value();
        if (L > 0.0) limit_value = fp > 0.0 ? L / fp : INFINITY;
        else if (L < 0.0) limit_value = fm > 0.0 ? -L / fm : INFINITY;
    }

    double T;
    if (options.end) {
        T = *options.end;
    } else if (!half) {
        T = f_plus.domain().length;
    } else if (options.tail_bound) {
        const double fmin = std::min(f_minus.end_value(), f_plus.end_value());
        const double scale = std::max({best.value, limit_value, 1e-300});
        T = 1.0;
        while (T < 1e8 && options.tail_bound(T) / std::max(fmin, 1e-300) > 1e-12 * scale) T *= 2.0;
    } else {
        T = options.default_horizon;
    }

    // uniform grid on [0, min(T, 32)], geometric beyond
    std::vector<double> grid;
    const int n = std::max(options.samples, 16);
    const double Tu = std::min(T, 32.0);
    const int nu = T > Tu ? n / 2 : n;
    for (int i = 0; i < nu; ++i) grid.push_back(Tu * i / (nu - 1));
    if (T > Tu) {
        const int ng = n - nu;
        const double ratio = std::pow(T / Tu, 1.0 / ng);
        double t = Tu;
        for (int i = 0; i < ng; ++i) {
            t *= ratio;
            grid.push_back(i == ng - 1 ? T : t);
        }
    }

    std::vector<double> values(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        values[i] = h(grid[i]);
        if (!std::isfinite(values[i]) || values[i] > options.overflow_guard)
            throw Error(ErrorKind::NotFinite, "weighted norm exceeds the overflow guard");
    }

    // local maxima of the samples, best first
    std::vector<std::size_t> peaks;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const bool left = i == 0 || values[i] >= values[i - 1];
        const bool right = i + 1 == grid.size() || values[i] >= values[i + 1];
        if (left && right) peaks.push_back(i);
    }
    std::sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
    if (peaks.size() > 8) peaks.resize(8);

    for (std::size_t i : peaks) {
        if (values[i] > best.value) best = {values[i], grid[i], false};
        const double lo = grid[i == 0 ? 0 : i - 1];
        const double hi = grid[std::min(i + 1, grid.size() - 1)];
        const Extremum e = golden_section_max(h, lo, hi, options.rel_tol * std::max(hi - lo, 1e-300) * 1e-3);
        if (e.value > best.value) best = {e.value, e.t, false};
    }
    if (half && options.limit && limit_value > best.value) best = {limit_value, INFINITY, true};
    if (!std::isfinite(best.value) || best.value > options.overflow_guard)
        throw Error(ErrorKind::NotFinite, "weighted norm exceeds the overflow guard");
    return best;
}

double weighted_norm(const std::function<double(double)>& x, const WeightFunction& f_minus,
                     const WeightFunction& f_plus, const NormOptions& options)
{
    return weighted_norm_detail(x, f_minus, f_plus, options).value;
}

}  // namespace oscispline

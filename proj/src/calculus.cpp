#include "oscispline/calculus.hpp"

#include "oscispline/error.hpp"
#include "oscispline/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace oscispline {

namespace {

enum class Source { ExpHalfLine, PowerHalfLine, ExpSegment, Table };

double factorial(int k)
{
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= i;
    return f;
}

// h^k e^{-x} sum_{i>=k} x^{i-k} / i!  with x = rate * h >= 0, i.e. int_0^h u^{k-1}/(k-1)! e^{-rate u} du.
double lower_gamma_scaled(int k, double h, double rate)
{
    const double x = rate * h;
    if (x < k + 1.0) {
        double term = 1.0 / factorial(k);
        double sum = term;
        for (int i = k + 1; i < k + 200; ++i) {
            term *= x / i;
            sum += term;
            if (term < 1e-17 * sum) break;
        }
        return std::pow(h, k) * std::exp(-x) * sum;
    }
    double term = 1.0, partial = 0.0;
    for (int i = 0; i < k; ++i) {
        partial += term;
        term *= x / (i + 1);
    }
    return (1.0 - std::exp(-x) * partial) / std::pow(rate, k);
}

}  // namespace

struct GCalculus::Impl {
    WeightFunction g;
    int r = 1;
    double b = INFINITY;
    Source source = Source::Table;
    double base = 0.0, amp = 0.0, rate = 0.0, exponent = 0.0;

    // quadrature table: Q_k(tau_j), k = 1..r, row-major by breakpoint
    std::vector<double> tau;
    std::vector<double> q;
    double table_end = INFINITY;

    std::vector<double> tails;

    void local(double t, double right, std::span<double> out) const
    {
        // out[k] += int_t^right (s-t)^{k-1}/(k-1)! g(s) ds, k = 1..r
        const GaussLegendre& rule = GaussLegendre::panel_rule();
        const double half = 0.5 * (right - t);
        if (half <= 0.0) return;
        const double mid = 0.5 * (right + t);
        for (int i = 0; i < rule.size(); ++i) {
            const double s = mid + half * rule.nodes()[i];
            double w = half * rule.weights()[i] * g(s);
            const double u = s - t;
            for (int k = 1; k <= r; ++k) {
                out[k] += w;
                w *= u / k;
            }
        }
    }

    void transfer(double t, double from, const double* q_from, std::span<double> out) const
    {
        // Taylor transfer of the tail beyond `from` back to t
        const double d = from - t;
        for (int k = 1; k <= r; ++k) {
            double c = 1.0, acc = 0.0;
            for (int m = k - 1; m >= 0; --m) {
                acc += c * q_from[m];  // q_from[m] = Q_{m+1}(from), coefficient d^{k-1-m}/(k-1-m)!
                c *= d / (k - m);
            }
            out[k] += acc;
        }
    }

    void direct_tail(double t, std::span<double> out) const
    {
        for (int k = 1; k <= r; ++k) {
            const double fk = factorial(k - 1);
            out[k] = integrate_to_infinity(
                [&](double s) { return std::pow(s - t, k - 1) / fk * g(s); }, t, 1e-15, 1e-17);
        }
    }

    void eval(double t, std::span<double> out) const
    {
        out[0] = g(t);
        for (int k = 1; k <= r; ++k) out[k] = 0.0;
        switch (source) {
        case Source::ExpHalfLine: {
            const double e = amp * std::exp(-rate * t);
            double v = e;
            for (int k = 1; k <= r; ++k) out[k] = (v /= rate);
            return;
        }
        case Source::PowerHalfLine: {
            const double p = exponent;
            double v = amp * std::pow(1.0 + t, -p);
            for (int k = 1; k <= r; ++k) {
                v *= (1.0 + t) / (p - k);
                out[k] = v;
            }
            return;
        }
        case Source::ExpSegment: {
            const double h = std::max(b - t, 0.0);
            const double e = amp * std::exp(-rate * t);
            double hk = 1.0;
            for (int k = 1; k <= r; ++k) {
                hk *= h / k;
                out[k] = base * hk + (amp == 0.0 ? 0.0 : e * lower_gamma_scaled(k, h, rate));
            }
            return;
        }
        case Source::Table:
            break;
        }
        if (t >= table_end) {
            direct_tail(t, out);
            return;
        }
        auto it = std::upper_bound(tau.begin(), tau.end(), t);
        std::size_t j = static_cast<std::size_t>(it - tau.begin());
        if (j >= tau.size()) j = tau.size() - 1;
        local(t, tau[j], out);
        transfer(t, tau[j], &q[j * r], out);
    }
};

int GCalculus::order() const { return impl_->r; }
const WeightFunction& GCalculus::g() const { return impl_->g; }
double GCalculus::anchor() const { return impl_->b; }
bool GCalculus::closed_form() const { return impl_->source != Source::Table; }
const std::vector<double>& GCalculus::tail_constants() const { return impl_->tails; }

void GCalculus::Q_all(double t, std::span<double> out) const
{
    if (!(t >= 0.0) || t > impl_->b * (1.0 + 1e-15) + 1e-300)
        throw Error(ErrorKind::OutOfDomain, "t outside the domain of g");
    impl_->eval(std::min(t, impl_->b), out);
}

double GCalculus::Q(int k, double t) const
{
    if (k < 0 || k > impl_->r) throw Error(ErrorKind::InvalidArgument, "primitive order out of range");
    double buf[32];
    Q_all(t, std::span<double>(buf, impl_->r + 1));
    return buf[k];
}

double GCalculus::P(int k, double t) const { return (k % 2 == 0 ? 1.0 : -1.0) * Q(k, t); }

double GCalculus::gk(int k, double t) const
{
    if (k == 0) return impl_->g(t);
    if (k < 0 || k > impl_->r) throw Error(ErrorKind::InvalidArgument, "primitive order out of range");
    double sum = 0.0;
    double c = 1.0;  // (-t)^{k-1-i}/(k-1-i)!
    for (int i = k - 1; i >= 0; --i) {
        sum += c * impl_->tails[i];
        c *= -t / (k - i);
    }
    const double v = sum - Q(k, t);
    return (k % 2 == 1) ? v : -v;
}

GCalculus build_calculus(const WeightFunction& g, int r, const CalculusOptions& options)
{
    if (r < 1 || r > 30) throw Error(ErrorKind::InvalidArgument, "order r must be in 1..30");
    if (!(options.quad_tol > 0.0)) throw Error(ErrorKind::InvalidArgument, "quad_tol must be positive");

    auto impl = std::make_shared<GCalculus::Impl>();
    impl->g = g;
    impl->r = r;
    const bool half = g.domain().is_half_line();
    impl->b = g.domain().end();

    if (half) {
        bool integrable = false;
        if (const auto* e = std::get_if<ExpDecayFamily>(&g.family())) {
            integrable = e->base == 0.0 && e->rate > 0.0;
            if (integrable && !options.force_quadrature) {
                impl->source = Source::ExpHalfLine;
                impl->amp = e->amplitude;
                impl->rate = e->rate;
            }
        } else if (const auto* p = std::get_if<PowerDecayFamily>(&g.family())) {
            integrable = p->base == 0.0 && p->exponent > r;
            if (integrable && !options.force_quadrature) {
                impl->source = Source::PowerHalfLine;
                impl->amp = p->amplitude;
                impl->exponent = p->exponent;
            }
        }
        if (!integrable)
            throw Error(ErrorKind::Divergent, "the primitives of g up to order r do not exist on the half-line");
    } else if (!options.force_quadrature) {
        if (const auto* c = std::get_if<ConstantFamily>(&g.family())) {
            impl->source = Source::ExpSegment;
            impl->base = c->value;
        } else if (const auto* e = std::get_if<ExpDecayFamily>(&g.family()); e && e->rate >= 0.0) {
            impl->source = Source::ExpSegment;
            impl->base = e->rate == 0.0 ? e->base + e->amplitude : e->base;
            impl->amp = e->rate == 0.0 ? 0.0 : e->amplitude;
            impl->rate = e->rate;
        }
    }

    if (impl->source == Source::Table) {
        double end = impl->b;
        if (half) {
            end = 16.0;
            while (end < 4096.0 && g(end) * std::pow(end, r) > 1e-17 * g(0.0)) end *= 2.0;
        }
        impl->table_end = half ? end : INFINITY;

        // uniform panels up to 32, geometric beyond
        std::vector<double> edges;
        const double uniform_end = std::min(end, 32.0);
        const int panels = std::max(8, static_cast<int>(std::ceil(uniform_end / 0.25)));
        for (int i = 0; i <= panels; ++i) edges.push_back(uniform_end * i / panels);
        for (double x = uniform_end * 1.1; x < end; x *= 1.1) edges.push_back(x);
        if (end > uniform_end) edges.push_back(end);
        if (const auto* t = std::get_if<TabulatedFamily>(&g.family()))
            for (double x : t->t)
                if (x > 0.0 && x < end) edges.push_back(x);
        std::sort(edges.begin(), edges.end());
        edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

        // split panels until the 15-point rule is converged on each
        const GaussLegendre& rule = GaussLegendre::panel_rule();
        auto fg = [&](double s) { return g(s); };
        std::vector<double> refined{edges.front()};
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            std::vector<std::pair<double, double>> stack{{edges[i], edges[i + 1]}};
            std::vector<double> pieces;
            while (!stack.empty()) {
                auto [a, c] = stack.back();
                stack.pop_back();
                const double m = 0.5 * (a + c);
                const double whole = rule.integrate(fg, a, c);
                const double halves = rule.integrate(fg, a, m) + rule.integrate(fg, m, c);
                if (std::abs(whole - halves) <= 1e-3 * options.quad_tol + 1e-15 * std::abs(whole) ||
                    c - a < 1e-6 * std::max(end, 1.0)) {
                    pieces.push_back(c);
                } else {
                    stack.push_back({m, c});
                    stack.push_back({a, m});
                }
            }
            refined.insert(refined.end(), pieces.begin(), pieces.end());
        }
        impl->tau = refined;

        const std::size_t M = impl->tau.size();
        impl->q.assign(M * r, 0.0);
        if (half) {
            std::vector<double> buf(r + 1);
            impl->direct_tail(end, buf);
            for (int k = 1; k <= r; ++k) impl->q[(M - 1) * r + k - 1] = buf[k];
        }
        std::vector<double> buf(r + 1);
        for (std::size_t j = M - 1; j-- > 0;) {
            const double t = impl->tau[j];
            const double right = impl->tau[j + 1];
            std::fill(buf.begin(), buf.end(), 0.0);
            for (int k = 1; k <= r; ++k) {
                const double fk = factorial(k - 1);
                buf[k] = integrate_adaptive([&](double s) { return std::pow(s - t, k - 1) / fk * g(s); }, t,
                                            right, 1e-3 * options.quad_tol);
            }
            impl->transfer(t, right, &impl->q[(j + 1) * r], buf);
            for (int k = 1; k <= r; ++k) impl->q[j * r + k - 1] = buf[k];
        }
    }

    GCalculus calc;
    calc.impl_ = impl;
    std::vector<double> buf(r + 1);
    impl->eval(0.0, buf);
    for (int k = 0; k < r; ++k) {
        if (!std::isfinite(buf[k + 1])) throw Error(ErrorKind::Divergent, "tail constant is not finite");
        impl->tails.push_back(buf[k + 1]);
    }
    return calc;
}

double eval_Pk(const GCalculus& calc, int k, double t)
{
    const double v = calc.P(k, t);
    if (!std::isfinite(v)) throw Error(ErrorKind::NotFinite, "P_k overflowed");
    return v;
}

double envelope_bound(const GCalculus& calc, double limit_value, double t)
{
    return std::abs(limit_value) + std::abs(calc.P(calc.order(), t));
}

}  // namespace oscispline

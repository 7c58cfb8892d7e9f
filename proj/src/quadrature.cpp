#include "barrier_repl/quadrature.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <queue>
#include <sstream>

#include "barrier_repl/errors.hpp"

namespace barrier_repl {

const GaussRule& gauss_legendre_32() {
    static const GaussRule rule = [] {
        using boost::math::quadrature::gauss;
        const auto& x = gauss<double, 32>::abscissa();
        const auto& w = gauss<double, 32>::weights();
        GaussRule r;
        for (std::size_t i = x.size(); i-- > 0;) {
            r.nodes.push_back(-x[i]);
            r.weights.push_back(w[i]);
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            r.nodes.push_back(x[i]);
            r.weights.push_back(w[i]);
        }
        return r;
    }();
    return rule;
}

namespace {

struct Panel {
    double a;
    double b;
    cplx value;
    double error;
    bool operator<(const Panel& o) const { return error < o.error; }
};

Panel gk_panel(const std::function<cplx(double)>& f, double a, double b) {
    double err = 0.0;
    const cplx v = boost::math::quadrature::gauss_kronrod<double, 21>::integrate(f, a, b, 0, 0.0, &err);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        std::ostringstream msg;
        msg << "non-finite integrand on [" << a << ", " << b << "]";
        throw Error(ErrorCode::QuadratureFailure, msg.str());
    }
    return Panel{a, b, v, err};
}

}  // namespace

cplx integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                        const QuadratureSpec& spec, std::span<const double> breakpoints) {
    if (a == b) return 0.0;
    std::vector<double> edges{a};
    for (double p : breakpoints)
        if (p > a && p < b) edges.push_back(p);
    edges.push_back(b);
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    std::priority_queue<Panel> heap;
    cplx total = 0.0;
    double total_err = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        Panel p = gk_panel(f, edges[i], edges[i + 1]);
        total += p.value;
        total_err += p.error;
        heap.push(p);
    }
    int count = static_cast<int>(heap.size());
    while (total_err > std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) {
        if (count >= spec.max_intervals) {
            std::ostringstream msg;
            msg << "tolerance not met on [" << a << ", " << b << "], error estimate " << total_err;
            throw Error(ErrorCode::QuadratureFailure, msg.str());
        }
        const Panel worst = heap.top();
        heap.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw Error(ErrorCode::QuadratureFailure, "interval collapsed to machine resolution");
        }
        Panel left = gk_panel(f, worst.a, mid);
        Panel right = gk_panel(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        ++count;
    }
    // recompute the sum from the final partition to shed accumulated rounding
    std::vector<Panel> panels;
    panels.reserve(heap.size());
    while (!heap.empty()) {
        panels.push_back(heap.top());
        heap.pop();
    }
    std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    cplx sum = 0.0;
    for (const auto& p : panels) sum += p.value;
    return sum;
}

double integrate_adaptive_real(const std::function<double(double)>& f, double a, double b,
                               const QuadratureSpec& spec, std::span<const double> breakpoints) {
    return integrate_adaptive([&](double x) { return cplx(f(x)); }, a, b, spec, breakpoints).real();
}

}  // namespace barrier_repl

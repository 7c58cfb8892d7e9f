#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the library's quadrature or pricing code.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using cplx = std::complex<double>;

/// Composite Simpson rule with `panels` (even) subintervals.
inline cplx simpson(const std::function<cplx(double)>& f, double a, double b, int panels) {
    if (panels % 2) ++panels;
    const double h = (b - a) / panels;
    cplx acc = f(a) + f(b);
    for (int i = 1; i < panels; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + h * i);
    return acc * (h / 3.0);
}

inline double normal_pdf(double x, double mean, double var) {
    return std::exp(-0.5 * (x - mean) * (x - mean) / var) / std::sqrt(2.0 * std::numbers::pi * var);
}

/// E g(Z) for Z ~ N(x0 - v/2, v), with g possibly jumping at the points in `cuts`.
inline cplx normal_expectation(const std::function<cplx(double)>& g, double x0, double v,
                               std::vector<double> cuts = {}, int panels = 20000) {
    const double mean = x0 - 0.5 * v, sd = std::sqrt(v);
    std::vector<double> edges{mean - 14.0 * sd};
    for (double c : cuts)
        if (c > edges.front() && c < mean + 14.0 * sd) edges.push_back(c);
    edges.push_back(mean + 14.0 * sd);
    cplx total = 0.0;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        // nudge off the cut so one-sided limits are used
        const double a = edges[i] + (i > 0 ? 1e-13 : 0.0);
        const double b = edges[i + 1] - (i + 2 < edges.size() ? 1e-13 : 0.0);
        total += simpson([&](double x) { return g(x) * normal_pdf(x, mean, v); }, a, b, panels);
    }
    return total;
}

inline double Phi(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

/// Probability that arithmetic BM x0 + mu t + W_t hits H before time v.
inline double bm_hit_probability(double x0, double H, double mu, double v) {
    // reflect so that the barrier lies above the start
    double b = H - x0;
    if (b < 0) {
        b = -b;
        mu = -mu;
    }
    const double sd = std::sqrt(v);
    return Phi((-b + mu * v) / sd) + std::exp(2.0 * mu * b) * Phi((-b - mu * v) / sd);
}

}  // namespace oracle

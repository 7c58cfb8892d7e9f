#pragma once

#include <functional>
#include <span>
#include <vector>

#include "barrier_repl/dual.hpp"

namespace barrier_repl {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-12;
    int max_intervals = 4000;
};

/// Nodes and weights of a Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// 32-point Gauss-Legendre rule.
const GaussRule& gauss_legendre_32();

/// Globally adaptive Gauss-Kronrod (21 point) integration of a complex function.
/// Interior breakpoints split the initial partition. Throws QuadratureFailure if
/// the interval budget runs out before the tolerance is met.
cplx integrate_adaptive(const std::function<cplx(double)>& f, double a, double b,
                        const QuadratureSpec& spec = {},
                        std::span<const double> breakpoints = {});

double integrate_adaptive_real(const std::function<double(double)>& f, double a, double b,
                               const QuadratureSpec& spec = {},
                               std::span<const double> breakpoints = {});

/// Sum in a fixed pairwise order, independent of how the terms were produced.
template <class T>
T pairwise_sum(std::span<const T> terms) {
    if (terms.empty()) return T{};
    if (terms.size() <= 8) {
        T acc = terms[0];
        for (std::size_t i = 1; i < terms.size(); ++i) acc += terms[i];
        return acc;
    }
    const std::size_t half = terms.size() / 2;
    T left = pairwise_sum(terms.first(half));
    left += pairwise_sum(terms.subspan(half));
    return left;
}

}  // namespace barrier_repl

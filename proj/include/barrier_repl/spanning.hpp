#pragma once

#include <functional>
#include <ostream>
#include <vector>

#include "barrier_repl/dual.hpp"

namespace barrier_repl {

struct StrikeWeight {
    double strike;
    double weight;
};

/// Bond, forward and a strip of puts (strikes <= kappa) and calls (strikes >= kappa).
struct SpanningPortfolio {
    double kappa = 0.0;
    double bond_weight = 0.0;
    double forward_weight = 0.0;
    std::vector<StrikeWeight> puts;
    std::vector<StrikeWeight> calls;

    /// Terminal value at spot S.
    double payoff(double spot) const;

    /// Columns instrument_type,strike,weight.
    void write_csv(std::ostream& out) const;
};

/// Spans f from its values on the strike grid: weights are slope jumps of the
/// piecewise-linear interpolant, so kinks and jumps are captured as point masses.
/// kappa is inserted into the grid if absent.
SpanningPortfolio span_payoff(const std::function<double(double)>& f, double kappa, std::vector<double> strikes);

/// Spans f using exact second derivatives from forward-mode differentiation,
/// midpoint strike weights with half cells at the ends, and point masses where the
/// one-sided first derivatives disagree.
SpanningPortfolio span_payoff_ad(const std::function<Dual(const Dual&)>& f, double kappa,
                                 std::vector<double> strikes);

}  // namespace barrier_repl

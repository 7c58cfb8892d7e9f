#pragma once

#include <cstdint>
#include <vector>

#include "barrier_repl/charfun.hpp"
#include "barrier_repl/simulator.hpp"

namespace barrier_repl {

/// Conditional value Q_t = E_t exp(i u X_T) under a volatility model.
class QEngine {
public:
    QEngine(VolModel model, double maturity);

    /// E[exp(kappa * integrated variance over [t, T]) | state at t], with kappa carrying partials.
    Dual laplace(double t, int state, const Dual& kappa) const;

    /// Q_t given X_t and the current regime; partials follow u.
    Dual q_value(double t, double x, int state, const Dual& u) const;

    const VolModel& model() const { return model_; }
    double maturity() const { return maturity_; }

private:
    VolModel model_;
    double maturity_;
};

struct HedgeParams {
    int n = 0;  // order in omega
    int m = 0;  // order in s
    cplx omega = 0.0;
    cplx s = 0.0;
    Branch branch = Branch::Plus;
};

struct HedgeOutcome {
    cplx terminal_portfolio;
    cplx target;
    cplx error;
    /// Share position times spot at each rebalance.
    std::vector<cplx> share_notional;
    /// Largest |wealth change - holdings . price change| over the path.
    double financing_residual = 0.0;
};

/// Discretely rebalanced replication of X_T^n QV_T^m exp(i omega X_T + i s QV_T)
/// along one path. Rebalancing happens at every `stride`-th node of the path grid.
HedgeOutcome simulate_hedge(const HedgeParams& params, const QEngine& engine, const PathRecord& path,
                            std::size_t stride);

struct HedgeLevel {
    int steps;
    double rms;
    double max;
};

struct HedgeReport {
    HedgeParams params;
    std::size_t n_paths = 0;
    std::vector<HedgeLevel> levels;
    /// Least-squares slope of log RMS against log rebalance interval.
    double slope = 0.0;
    /// Largest deviation of the share notional from its first value (constant-holding checks).
    double max_share_notional_drift = 0.0;
    /// Real parts of the smallest and largest share notional seen.
    double min_share_notional = 0.0;
    double max_share_notional = 0.0;
};

/// Runs the hedge on common paths for each rebalance count (each must divide path_steps).
HedgeReport hedge_report(const HedgeParams& params, const VolModel& model, double x0, double maturity,
                         int path_steps, const std::vector<int>& rebalance_counts, std::size_t n_paths,
                         std::uint64_t seed);

}  // namespace barrier_repl

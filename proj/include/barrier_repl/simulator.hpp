#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <variant>
#include <vector>

#include "barrier_repl/claims.hpp"

namespace barrier_repl {

/// Piecewise-constant volatility: sigmas[i] on [breaks[i], breaks[i+1]), the last piece open-ended.
struct DeterministicVol {
    std::vector<double> breaks{0.0};
    std::vector<double> sigmas{0.2};

    static DeterministicVol constant(double sigma) { return {{0.0}, {sigma}}; }
    /// Integrated variance over [a, b].
    double integrated_variance(double a, double b) const;
    std::size_t piece(double t) const;
};

/// Continuous-time Markov chain over volatility levels.
struct RegimeSwitchingVol {
    std::vector<double> sigmas;
    Eigen::MatrixXd generator;
    int initial_state = 0;
};

using VolModel = std::variant<DeterministicVol, RegimeSwitchingVol>;

/// Throws InvalidArgument on malformed models.
void validate(const VolModel& model);

std::vector<double> uniform_grid(double maturity, int steps);

struct VolPath {
    std::vector<double> qv_steps;  // integrated variance per grid step
    std::vector<int> regime;       // state at each node
};

VolPath simulate_vol(const VolModel& model, const std::vector<double>& times, std::uint64_t seed,
                     std::uint64_t path);

struct PathRecord {
    std::vector<double> times;
    std::vector<double> x;
    std::vector<double> qv;
    std::vector<int> regime;
};

/// Exact conditional-Gaussian stepping of X given the per-step integrated variance.
PathRecord simulate_x(const std::vector<double>& times, const VolPath& vol, double x0, std::uint64_t seed,
                      std::uint64_t path);

enum class Monitoring { GridOnly, BridgeCorrected };

struct Hit {
    double time;
    double qv;
    double x;
};

struct BarrierHits {
    std::optional<Hit> lower;
    std::optional<Hit> upper;

    /// Earliest hit of either barrier.
    std::optional<Hit> first() const;
};

BarrierHits detect_barrier(const PathRecord& path, const BarrierSpec& barriers, Monitoring mode,
                           std::uint64_t seed, std::uint64_t path_index);

struct McEstimate {
    cplx mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
};

struct SimulationSetup {
    VolModel model = DeterministicVol::constant(0.2);
    std::vector<double> times = uniform_grid(1.0, 512);
    double x0 = 0.0;
    BarrierSpec barriers;
    Monitoring monitoring = Monitoring::BridgeCorrected;
    std::uint64_t seed = 1;
    std::size_t n_paths = 100000;
};

/// Writes one value per slot for a simulated path.
using PathFunctional = std::function<void(const PathRecord&, const BarrierHits&, std::span<cplx>)>;

/// Sample means and standard errors of path functionals. Paths are processed in
/// fixed blocks and reduced in a fixed order, so results do not depend on the
/// number of worker threads.
std::vector<McEstimate> mc_expectations(const SimulationSetup& setup, std::size_t slots, const PathFunctional& f);

/// Pathwise payoff of a claim.
cplx claim_payoff(const ClaimSpec& claim, const PathRecord& path, const BarrierHits& hits);

McEstimate mc_price(const ClaimSpec& claim, const VolModel& model, std::size_t n_paths,
                    const std::vector<double>& times, std::uint64_t seed,
                    Monitoring mode = Monitoring::BridgeCorrected);

/// Total integrated variance over [0, T] for paths 0..n-1.
std::vector<double> sample_total_qv(const VolModel& model, double maturity, std::size_t n, std::uint64_t seed);

/// E[integrated variance over [0, T]] from the model (matrix exponential for regimes).
double expected_total_qv(const VolModel& model, double maturity);

/// Probability that X, with dX = -dV/2 + dW in its QV clock, touches H from x0
/// before accumulating QV v (reflection principle for drifted Brownian motion).
double first_passage_probability(double x0, double H, double v);

void write_path_csv(std::ostream& out, const PathRecord& path);

}  // namespace barrier_repl

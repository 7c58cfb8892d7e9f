#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "barrier_repl/claims.hpp"
#include "barrier_repl/hedger.hpp"
#include "barrier_repl/pricer.hpp"
#include "barrier_repl/simulator.hpp"

namespace barrier_repl::cli {

enum class Command { Price, Curve, Verify, Hedge, Span };
enum class OutputFormat { Csv, Json };

struct Numerics {
    std::vector<int> smoothing{25};
    std::optional<double> omega_i_g;
    std::optional<double> omega_i_h;
    std::optional<double> half_width;
    ContourRule rule = ContourRule::GaussLegendrePanels;
    std::size_t mc_paths = 0;
    int steps = 512;
    std::uint64_t seed = 1;
    Monitoring monitoring = Monitoring::BridgeCorrected;
    std::size_t qv_samples = 100000;
    int qv_bins = 512;
};

struct CurveGrid {
    std::optional<double> s_min;
    std::optional<double> s_max;
    int points = 400;
    double qv = 0.0;
};

struct HedgeConfig {
    HedgeParams params;
    std::vector<int> rebalances{32, 128, 512};
    int path_steps = 512;
    std::size_t paths = 1000;
};

struct SpanConfig {
    std::string payoff = "log";  // log, call, put, claim
    double kappa = 100.0;
    double k_min = 50.0;
    double k_max = 200.0;
    int strikes = 200;
    double strike = 100.0;
    double qv = 0.04;
    std::string method = "differences";  // differences, ad
};

struct RunConfig {
    Command command = Command::Price;
    ClaimSpec claim;
    Branch branch = Branch::Plus;
    VolModel model = DeterministicVol::constant(0.2);
    double maturity = 1.0;
    Numerics numerics;
    CurveGrid curve;
    HedgeConfig hedge;
    SpanConfig span;
    std::string out_path;
    std::optional<OutputFormat> format;
};

/// Builds and validates a config from its JSON form. Prices and barriers are
/// given in price space; complex numbers as [re, im]. Throws ConfigError.
RunConfig parse_config(const nlohmann::json& doc);

/// Reads TOML (or JSON for a .json path) into its JSON form.
nlohmann::json load_document(const std::string& path);

/// Runs one command, writing its output to `out`. Returns the process exit code.
int run_command(const RunConfig& cfg, std::ostream& out);

/// The invariant suite behind `verify`.
nlohmann::json verify_suite(const RunConfig& cfg);

/// Entry point: parses flags, dispatches, maps errors to exit codes.
int main(int argc, char** argv);

}  // namespace barrier_repl::cli

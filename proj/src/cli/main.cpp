#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "barrier_repl/cli.hpp"
#include "barrier_repl/errors.hpp"
#include "barrier_repl/parallel.hpp"

namespace barrier_repl::cli {

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalFailure = 3;

int exit_code_for(ErrorCode code) {
    switch (code) {
        case ErrorCode::ConfigError:
        case ErrorCode::InvalidArgument:
        case ErrorCode::InvalidGrid: return kConfigError;
        default: return kNumericalFailure;
    }
}

void report(const std::string& code, const std::string& message) {
    std::cerr << nlohmann::json{{"error", code}, {"message", message}}.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Barrier-claim pricing, replication and verification"};
    std::string command, config_path, out_path, format;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("command", command, "price, curve, verify, hedge or span (overrides the config)")
        ->check(CLI::IsMember({"price", "curve", "verify", "hedge", "span"}));
    app.add_option("--config", config_path, "TOML or JSON run configuration")->required();
    app.add_option("--seed", seed, "random seed (overrides the config)");
    app.add_option("--out", out_path, "output file (default: stdout)");
    app.add_option("--format", format, "output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kConfigError;
    }

    try {
        if (threads) {
            set_thread_count(*threads);
        } else if (const char* env = std::getenv("BARRIER_REPL_THREADS")) {
            try {
                set_thread_count(std::stoi(env));
            } catch (const std::exception&) {
                throw Error(ErrorCode::ConfigError, "BARRIER_REPL_THREADS must be an integer");
            }
        }
        nlohmann::json doc = load_document(config_path);
        if (!command.empty()) doc["command"] = command;
        RunConfig cfg = parse_config(doc);
        if (seed) cfg.numerics.seed = *seed;
        if (!format.empty()) cfg.format = format == "csv" ? OutputFormat::Csv : OutputFormat::Json;
        if (!out_path.empty()) cfg.out_path = out_path;

        // buffer so a failing run leaves no partial file behind
        std::ostringstream buffer;
        const int rc = run_command(cfg, buffer);
        if (cfg.out_path.empty()) {
            std::cout << buffer.str();
        } else {
            std::ofstream out(cfg.out_path, std::ios::binary);
            if (!out) throw Error(ErrorCode::ConfigError, "cannot write '" + cfg.out_path + "'");
            out << buffer.str();
        }
        return rc;
    } catch (const Error& e) {
        report(std::string(to_string(e.code())), e.what());
        return exit_code_for(e.code());
    } catch (const std::exception& e) {
        report("NumericalFailure", e.what());
        return kNumericalFailure;
    }
}

}  // namespace barrier_repl::cli

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#define TOML_EXCEPTIONS 1
#include <toml.hpp>

#include "barrier_repl/cli.hpp"
#include "barrier_repl/errors.hpp"

namespace barrier_repl::cli {

using nlohmann::json;

namespace {

[[noreturn]] void config_error(const std::string& what) { throw Error(ErrorCode::ConfigError, what); }

json to_json(const toml::node& node) {
    if (const auto* t = node.as_table()) {
        json out = json::object();
        for (const auto& [k, v] : *t) out[std::string(k.str())] = to_json(v);
        return out;
    }
    if (const auto* a = node.as_array()) {
        json out = json::array();
        for (const auto& v : *a) out.push_back(to_json(v));
        return out;
    }
    if (const auto* v = node.as_string()) return v->get();
    if (const auto* v = node.as_integer()) return v->get();
    if (const auto* v = node.as_floating_point()) return v->get();
    if (const auto* v = node.as_boolean()) return v->get();
    config_error("unsupported TOML value type");
}

/// Reads keys of one table and rejects anything it does not know.
class Table {
public:
    Table(const json& doc, std::string name) : name_(std::move(name)) {
        if (doc.is_null()) return;
        if (!doc.is_object()) config_error("[" + name_ + "] must be a table");
        doc_ = &doc;
    }
    Table(const json& root, const std::string& key, bool) : Table(root.contains(key) ? root.at(key) : null_, key) {}

    /// Rejects keys that were never asked for.
    void finish() const {
        if (!doc_) return;
        for (const auto& [k, v] : doc_->items())
            if (!seen_.count(k)) config_error("unknown key '" + k + "' in [" + name_ + "]");
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return doc_ && doc_->contains(key);
    }
    const json& at(const std::string& key) {
        seen_.insert(key);
        return doc_->at(key);
    }

    double number(const std::string& key, double fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_number()) config_error(where(key) + " must be a number");
        return v.get<double>();
    }
    std::optional<double> maybe_number(const std::string& key) {
        if (!has(key)) return std::nullopt;
        return number(key, 0.0);
    }
    long long integer(const std::string& key, long long fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_number_integer()) config_error(where(key) + " must be an integer");
        return v.get<long long>();
    }
    std::string string(const std::string& key, const std::string& fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_string()) config_error(where(key) + " must be a string");
        return v.get<std::string>();
    }
    cplx complex(const std::string& key, cplx fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (v.is_number()) return v.get<double>();
        if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
            return {v[0].get<double>(), v[1].get<double>()};
        config_error(where(key) + " must be a number or [re, im]");
    }
    std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (!v.is_array()) config_error(where(key) + " must be an array of numbers");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) config_error(where(key) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }
    std::vector<int> integers(const std::string& key, std::vector<int> fallback) {
        if (!has(key)) return fallback;
        const auto& v = at(key);
        if (v.is_number_integer()) return {v.get<int>()};
        if (!v.is_array()) config_error(where(key) + " must be an integer or array of integers");
        std::vector<int> out;
        for (const auto& e : v) {
            if (!e.is_number_integer()) config_error(where(key) + " must be an array of integers");
            out.push_back(e.get<int>());
        }
        return out;
    }
    std::string where(const std::string& key) const { return "[" + name_ + "]." + key; }

private:
    static inline const json null_{};
    std::string name_;
    const json* doc_ = nullptr;
    std::set<std::string> seen_;
};

double log_level(Table& t, const std::string& key) {
    const double v = t.number(key, 0.0);
    if (!(v > 0.0)) config_error(t.where(key) + " must be a positive price");
    return std::log(v);
}

Branch parse_branch(const std::string& s) {
    if (s == "plus") return Branch::Plus;
    if (s == "minus") return Branch::Minus;
    config_error("branch must be 'plus' or 'minus'");
}

void parse_claim(const json& root, RunConfig& cfg) {
    Table t(root, "claim", true);
    ClaimSpec& c = cfg.claim;
    c.kind = claim_kind_from_string(t.string("kind", "european"));
    if (t.has("lower")) c.barriers.lower = log_level(t, "lower");
    if (t.has("upper")) c.barriers.upper = log_level(t, "upper");
    c.barriers.x0 = std::log(100.0);
    if (t.has("spot")) c.barriers.x0 = log_level(t, "spot");
    if (t.has("spot_log")) c.barriers.x0 = t.number("spot_log", 0.0);
    c.j = static_cast<int>(t.integer("j", 0));
    c.k = static_cast<int>(t.integer("k", 0));
    c.p = t.complex("p", 0.0);
    c.s = t.complex("s", 0.0);
    c.r = t.number("r", 0.5);
    c.eps = t.number("eps", 1e-3);
    c.q = static_cast<int>(t.integer("q", 5));
    cfg.branch = parse_branch(t.string("branch", "plus"));
    t.finish();
}

void parse_model(const json& root, RunConfig& cfg) {
    Table t(root, "model", true);
    const std::string type = t.string("type", "deterministic");
    cfg.maturity = t.number("maturity", 1.0);
    if (!(cfg.maturity > 0.0)) config_error("[model].maturity must be positive");
    if (type == "deterministic") {
        DeterministicVol d;
        if (t.has("sigma")) {
            d = DeterministicVol::constant(t.number("sigma", 0.2));
        } else {
            d.sigmas = t.numbers("sigmas", {0.2});
            d.breaks = t.numbers("breaks", {0.0});
        }
        cfg.model = d;
    } else if (type == "regime") {
        RegimeSwitchingVol r;
        r.sigmas = t.numbers("sigmas", {});
        const auto n = static_cast<Eigen::Index>(r.sigmas.size());
        r.generator = Eigen::MatrixXd::Zero(n, n);
        if (t.has("generator")) {
            const auto& g = t.at("generator");
            if (!g.is_array() || static_cast<Eigen::Index>(g.size()) != n)
                config_error("[model].generator must be a square array matching sigmas");
            for (Eigen::Index i = 0; i < n; ++i) {
                const auto& row = g[static_cast<std::size_t>(i)];
                if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
                    config_error("[model].generator must be a square array matching sigmas");
                for (Eigen::Index j = 0; j < n; ++j) {
                    if (!row[static_cast<std::size_t>(j)].is_number()) config_error("[model].generator entries must be numbers");
                    r.generator(i, j) = row[static_cast<std::size_t>(j)].get<double>();
                }
            }
        }
        r.initial_state = static_cast<int>(t.integer("initial_state", 0));
        cfg.model = r;
    } else {
        config_error("[model].type must be 'deterministic' or 'regime'");
    }
    t.finish();
}

void parse_numerics(const json& root, RunConfig& cfg) {
    Table t(root, "numerics", true);
    Numerics& n = cfg.numerics;
    if (t.has("n")) {
        const auto& v = t.at("n");
        if (v.is_string() && v.get<std::string>() == "sequence") n.smoothing = {12, 25, 50, 100};
        else n.smoothing = t.integers("n", {25});
    }
    for (int v : n.smoothing)
        if (v < 1) config_error("[numerics].n must be positive");
    n.omega_i_g = t.maybe_number("omega_i_g");
    n.omega_i_h = t.maybe_number("omega_i_h");
    n.half_width = t.maybe_number("half_width");
    const std::string rule = t.string("contour_rule", "gauss_legendre");
    if (rule == "gauss_legendre") n.rule = ContourRule::GaussLegendrePanels;
    else if (rule == "trapezoid") n.rule = ContourRule::Trapezoid;
    else config_error("[numerics].contour_rule must be 'gauss_legendre' or 'trapezoid'");
    const auto paths = t.integer("mc_paths", 0);
    if (paths < 0) config_error("[numerics].mc_paths must be >= 0");
    n.mc_paths = static_cast<std::size_t>(paths);
    n.steps = static_cast<int>(t.integer("steps", 512));
    if (n.steps < 1) config_error("[numerics].steps must be positive");
    const auto seed = t.integer("seed", 1);
    if (seed < 0) config_error("[numerics].seed must be >= 0");
    n.seed = static_cast<std::uint64_t>(seed);
    const std::string mon = t.string("monitoring", "bridge");
    if (mon == "bridge") n.monitoring = Monitoring::BridgeCorrected;
    else if (mon == "grid") n.monitoring = Monitoring::GridOnly;
    else config_error("[numerics].monitoring must be 'bridge' or 'grid'");
    const auto qs = t.integer("qv_samples", 100000);
    if (qs < 1) config_error("[numerics].qv_samples must be positive");
    n.qv_samples = static_cast<std::size_t>(qs);
    n.qv_bins = static_cast<int>(t.integer("qv_bins", 512));
    if (n.qv_bins < 1) config_error("[numerics].qv_bins must be positive");
    t.finish();
}

void parse_curve(const json& root, RunConfig& cfg) {
    Table t(root, "curve", true);
    cfg.curve.s_min = t.maybe_number("s_min");
    cfg.curve.s_max = t.maybe_number("s_max");
    cfg.curve.points = static_cast<int>(t.integer("points", 400));
    cfg.curve.qv = t.number("qv", 0.0);
    if (cfg.curve.points < 2) config_error("[curve].points must be at least 2");
    if (cfg.curve.s_min && !(*cfg.curve.s_min > 0.0)) config_error("[curve].s_min must be positive");
    if (cfg.curve.s_min && cfg.curve.s_max && !(*cfg.curve.s_max > *cfg.curve.s_min))
        config_error("[curve].s_max must exceed s_min");
    t.finish();
}

void parse_hedge(const json& root, RunConfig& cfg) {
    Table t(root, "hedge", true);
    HedgeConfig& h = cfg.hedge;
    h.params.n = static_cast<int>(t.integer("n", 0));
    h.params.m = static_cast<int>(t.integer("m", 0));
    h.params.omega = t.complex("omega", 0.0);
    h.params.s = t.complex("s", 0.0);
    h.params.branch = parse_branch(t.string("branch", "plus"));
    h.rebalances = t.integers("rebalances", {32, 128, 512});
    h.path_steps = static_cast<int>(t.integer("path_steps", 512));
    const auto paths = t.integer("paths", 1000);
    if (paths < 1) config_error("[hedge].paths must be positive");
    h.paths = static_cast<std::size_t>(paths);
    if (h.params.n < 0 || h.params.m < 0 || h.params.n + h.params.m > 2)
        config_error("[hedge] orders must be non-negative with n + m <= 2");
    for (int r : h.rebalances)
        if (r < 1 || h.path_steps % r != 0) config_error("[hedge].rebalances must divide path_steps");
    t.finish();
}

void parse_span(const json& root, RunConfig& cfg) {
    Table t(root, "span", true);
    SpanConfig& s = cfg.span;
    s.payoff = t.string("payoff", "log");
    s.kappa = t.number("kappa", 100.0);
    s.k_min = t.number("k_min", 50.0);
    s.k_max = t.number("k_max", 200.0);
    s.strikes = static_cast<int>(t.integer("strikes", 200));
    s.strike = t.number("strike", 100.0);
    s.qv = t.number("qv", 0.04);
    s.method = t.string("method", "differences");
    if (s.payoff != "log" && s.payoff != "call" && s.payoff != "put" && s.payoff != "claim")
        config_error("[span].payoff must be log, call, put or claim");
    if (s.method != "differences" && s.method != "ad") config_error("[span].method must be 'differences' or 'ad'");
    if (s.method == "ad" && s.payoff == "claim") config_error("[span].method 'ad' supports log, call and put");
    if (s.strikes < 2) config_error("[span].strikes must be at least 2");
    t.finish();
}

Command parse_command(const std::string& s) {
    if (s == "price") return Command::Price;
    if (s == "curve") return Command::Curve;
    if (s == "verify") return Command::Verify;
    if (s == "hedge") return Command::Hedge;
    if (s == "span") return Command::Span;
    config_error("command must be one of price, curve, verify, hedge, span");
}

}  // namespace

RunConfig parse_config(const json& doc) {
    if (!doc.is_object()) config_error("config must be a table");
    RunConfig cfg;
    {
        Table top(doc, "top level");
        cfg.command = parse_command(top.string("command", "price"));
        for (const char* section : {"claim", "model", "numerics", "curve", "hedge", "span", "output"}) top.has(section);
        top.string("comment", "");
        top.finish();
    }
    parse_claim(doc, cfg);
    parse_model(doc, cfg);
    parse_numerics(doc, cfg);
    parse_curve(doc, cfg);
    parse_hedge(doc, cfg);
    parse_span(doc, cfg);
    {
        Table t(doc, "output", true);
        cfg.out_path = t.string("path", "");
        if (t.has("format")) {
            const std::string f = t.string("format", "");
            if (f == "csv") cfg.format = OutputFormat::Csv;
            else if (f == "json") cfg.format = OutputFormat::Json;
            else config_error("[output].format must be csv or json");
        }
        t.finish();
    }
    try {
        validate(cfg.model);
        if (cfg.command == Command::Price || cfg.command == Command::Curve) cfg.claim.validate();
    } catch (const Error& e) {
        config_error(e.what());
    }
    return cfg;
}

json load_document(const std::string& path) {
    std::ifstream in(path);
    if (!in) config_error("cannot read config '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    if (std::filesystem::path(path).extension() == ".json") {
        try {
            return json::parse(buf.str());
        } catch (const json::exception& e) {
            config_error(std::string("invalid JSON: ") + e.what());
        }
    }
    try {
        return to_json(toml::parse(buf.str(), path));
    } catch (const toml::parse_error& e) {
        std::ostringstream msg;
        msg << "invalid TOML: " << e.description() << " at line " << e.source().begin.line;
        config_error(msg.str());
    }
}

}  // namespace barrier_repl::cli

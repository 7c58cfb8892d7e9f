#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "barrier_repl/cli.hpp"
#include "barrier_repl/errors.hpp"
#include "barrier_repl/payoffs.hpp"
#include "barrier_repl/spanning.hpp"

namespace barrier_repl::cli {

using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v == 0.0 ? 0.0 : v);
    return buf;
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

json claim_json(const ClaimSpec& c, Branch branch) {
    json j{{"kind", to_string(c.kind)}, {"spot", std::exp(c.barriers.x0)}, {"j", c.j}, {"k", c.k},
           {"p", complex_json(c.p)}, {"s", complex_json(c.s)},
           {"branch", branch == Branch::Plus ? "plus" : "minus"}};
    if (c.barriers.lower) j["lower"] = std::exp(*c.barriers.lower);
    if (c.barriers.upper) j["upper"] = std::exp(*c.barriers.upper);
    if (c.kind == ClaimKind::DBKO) j["q"] = c.q;
    if (c.kind == ClaimKind::SBKI_FracQV || c.kind == ClaimKind::SBKI_Ratio) j["r"] = c.r;
    if (c.kind == ClaimKind::SBKI_Ratio) j["eps"] = c.eps;
    return j;
}

bool uses_contour(ClaimKind k) { return k == ClaimKind::SBKO || k == ClaimKind::DBKO || k == ClaimKind::Rebate; }

PricingOptions pricing_options(const RunConfig& cfg, int n) {
    PricingOptions o;
    o.n = n;
    o.branch = cfg.branch;
    o.contour_g.omega_i = cfg.numerics.omega_i_g;
    o.contour_h.omega_i = cfg.numerics.omega_i_h;
    o.contour_g.half_width = o.contour_h.half_width = cfg.numerics.half_width;
    o.contour_g.rule = o.contour_h.rule = cfg.numerics.rule;
    return o;
}

/// The European payoff (in log price and QV) whose price equals the claim's.
PayoffFn replicating_payoff(const ClaimSpec& c, Branch branch) {
    switch (c.kind) {
        case ClaimKind::EuropeanStylePowerExp: return power_exp_payoff(c.j, c.k, c.p, c.s);
        case ClaimKind::SBKO: {
            const auto phi = power_exp_payoff(c.j, c.k, c.p, c.s);
            return c.side() == Side::Lower ? sbko_image(phi, c.barrier()) : sbko_image_upper(phi, c.barrier());
        }
        case ClaimKind::DBKO:
            return dbko_image(power_exp_payoff(c.j, c.k, c.p, c.s), *c.barriers.lower, *c.barriers.upper, c.q);
        case ClaimKind::SBKI_PowerExp: return ski_payoff(c.j, c.k, c.barrier(), c.p, c.s, c.side(), branch);
        case ClaimKind::SBKI_FracQV: return frac_ki_payoff_fn(c.barrier(), c.r);
        case ClaimKind::SBKI_Ratio: return ratio_ki_payoff_fn(c.barrier(), c.r, c.eps, c.p);
        case ClaimKind::Rebate:
            if (c.k != 0) throw Error(ErrorCode::InvalidArgument, "rebate image payoff covers k = 0 only");
            return rebate_image(c.barrier(), c.s, c.side(), branch);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown claim kind");
}

struct LawInfo {
    TerminalLaw law;
    json description;
};

LawInfo terminal_law(const RunConfig& cfg) {
    const double x0 = cfg.claim.barriers.x0;
    if (const auto* d = std::get_if<DeterministicVol>(&cfg.model)) {
        const double v = d->integrated_variance(0.0, cfg.maturity);
        return {TerminalLaw::deterministic(x0, v), json{{"type", "deterministic"}, {"qv", v}}};
    }
    const auto samples = sample_total_qv(cfg.model, cfg.maturity, cfg.numerics.qv_samples, cfg.numerics.seed);
    return {mixture_from_qv_samples(x0, samples, cfg.numerics.qv_bins),
            json{{"type", "mixture"},
                 {"qv_samples", cfg.numerics.qv_samples},
                 {"bins", cfg.numerics.qv_bins},
                 {"seed", cfg.numerics.seed}}};
}

json contour_json(const std::vector<ContourReport>& reports) {
    json out = json::array();
    for (const auto& r : reports)
        out.push_back({{"term", r.term},
                       {"omega_i", r.omega_i},
                       {"half_width", r.half_width},
                       {"doublings", r.doublings},
                       {"nodes", r.nodes}});
    return out;
}

PriceResult contour_price(const RunConfig& cfg, const TerminalLaw& law, int n) {
    const ClaimSpec& c = cfg.claim;
    const double x0 = c.barriers.x0;
    const auto opts = pricing_options(cfg, n);
    switch (c.kind) {
        case ClaimKind::SBKO:
            return price_sbko_powerexp(law, x0, SbkoClaim{c.side(), c.barrier(), c.j, c.k, c.p, c.s}, opts);
        case ClaimKind::DBKO:
            return price_dbko_powerexp(law, x0,
                                       DbkoClaim{*c.barriers.lower, *c.barriers.upper, c.j, c.k, c.p, c.s, c.q}, opts);
        default:
            return price_rebate_powerexp(law, x0, RebateClaim{c.side(), c.barrier(), c.k, c.s}, opts);
    }
}

int cmd_price(const RunConfig& cfg, std::ostream& out, OutputFormat format) {
    const auto [law, law_desc] = terminal_law(cfg);
    json results = json::array();
    if (uses_contour(cfg.claim.kind)) {
        for (int n : cfg.numerics.smoothing) {
            const PriceResult r = contour_price(cfg, law, n);
            json row{{"n", n}, {"price", complex_json(r.price)}, {"contours", contour_json(r.contours)}};
            if (cfg.claim.kind == ClaimKind::DBKO) row["truncation"] = r.truncation;
            results.push_back(row);
        }
    } else {
        const cplx price = price_payoff_under_law(replicating_payoff(cfg.claim, cfg.branch), law);
        results.push_back({{"n", nullptr}, {"price", complex_json(price)}});
    }
    std::optional<McEstimate> mc;
    if (cfg.numerics.mc_paths > 0)
        mc = mc_price(cfg.claim, cfg.model, cfg.numerics.mc_paths, uniform_grid(cfg.maturity, cfg.numerics.steps),
                      cfg.numerics.seed, cfg.numerics.monitoring);

    if (format == OutputFormat::Csv) {
        out << "n,price_real,price_imag\n";
        for (const auto& r : results)
            out << (r["n"].is_null() ? std::string("") : std::to_string(r["n"].get<int>())) << ','
                << fmt(r["price"][0].get<double>()) << ',' << fmt(r["price"][1].get<double>()) << '\n';
        if (mc) out << "mc," << fmt(mc->mean.real()) << ',' << fmt(mc->mean.imag()) << '\n';
        return 0;
    }
    json doc{{"command", "price"},
             {"claim", claim_json(cfg.claim, cfg.branch)},
             {"maturity", cfg.maturity},
             {"law", law_desc},
             {"results", results}};
    if (mc)
        doc["mc"] = {{"mean", complex_json(mc->mean)},
                     {"std_error", mc->std_error},
                     {"n_paths", mc->n_paths},
                     {"seed", mc->seed},
                     {"steps", cfg.numerics.steps},
                     {"monitoring", cfg.numerics.monitoring == Monitoring::BridgeCorrected ? "bridge" : "grid"}};
    out << doc.dump(2) << '\n';
    return 0;
}

std::vector<double> curve_grid(const RunConfig& cfg) {
    const ClaimSpec& c = cfg.claim;
    double lo = std::exp(c.barriers.x0), hi = lo;
    for (const auto& b : {c.barriers.lower, c.barriers.upper})
        if (b) {
            lo = std::min(lo, std::exp(*b));
            hi = std::max(hi, std::exp(*b));
        }
    const double a = std::log(cfg.curve.s_min.value_or(0.5 * lo));
    const double b = std::log(cfg.curve.s_max.value_or(2.0 * hi));
    if (!(b > a)) throw Error(ErrorCode::ConfigError, "[curve] range is empty");
    const int n = cfg.curve.points;
    const double dx = (b - a) / (n - 1);
    std::vector<double> xs(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double x = a + dx * i;
        // keep off the barrier abscissas, where the images jump
        for (const auto& h : {c.barriers.lower, c.barriers.upper})
            if (h && std::abs(x - *h) < 1e-9 * dx) x -= 1e-3 * dx;
        xs[static_cast<std::size_t>(i)] = x;
    }
    return xs;
}

int cmd_curve(const RunConfig& cfg, std::ostream& out, OutputFormat format) {
    const ClaimSpec& c = cfg.claim;
    const auto xs = curve_grid(cfg);
    const double x0 = c.barriers.x0;
    const auto opts = pricing_options(cfg, cfg.numerics.smoothing.front());
    std::vector<cplx> ys;
    switch (c.kind) {
        case ClaimKind::SBKO: ys = curve_sbko(x0, SbkoClaim{c.side(), c.barrier(), c.j, c.k, c.p, c.s}, xs, opts); break;
        case ClaimKind::DBKO:
            ys = curve_dbko(x0, DbkoClaim{*c.barriers.lower, *c.barriers.upper, c.j, c.k, c.p, c.s, c.q}, xs, opts);
            break;
        case ClaimKind::Rebate: ys = curve_rebate(x0, RebateClaim{c.side(), c.barrier(), c.k, c.s}, xs, opts); break;
        default: {
            const PayoffFn f = replicating_payoff(c, cfg.branch);
            ys.reserve(xs.size());
            for (double x : xs) ys.push_back(f(x, cfg.curve.qv));
        }
    }
    if (format == OutputFormat::Json) {
        json doc{{"command", "curve"}, {"claim", claim_json(c, cfg.branch)}, {"S", json::array()},
                 {"payoff_real", json::array()}, {"payoff_imag", json::array()}};
        if (uses_contour(c.kind)) doc["n"] = opts.n;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            doc["S"].push_back(std::exp(xs[i]));
            doc["payoff_real"].push_back(ys[i].real());
            doc["payoff_imag"].push_back(ys[i].imag());
        }
        out << doc.dump(2) << '\n';
        return 0;
    }
    out << "S,payoff_real,payoff_imag\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << fmt(std::exp(xs[i])) << ',' << fmt(ys[i].real()) << ',' << fmt(ys[i].imag()) << '\n';
    return 0;
}

int cmd_hedge(const RunConfig& cfg, std::ostream& out, OutputFormat format) {
    const HedgeConfig& h = cfg.hedge;
    const HedgeReport rep = hedge_report(h.params, cfg.model, cfg.claim.barriers.x0, cfg.maturity, h.path_steps,
                                         h.rebalances, h.paths, cfg.numerics.seed);
    if (format == OutputFormat::Csv) {
        out << "steps,rms,max\n";
        for (const auto& l : rep.levels) out << l.steps << ',' << fmt(l.rms) << ',' << fmt(l.max) << '\n';
        return 0;
    }
    json steps = json::array(), rms = json::array(), mx = json::array();
    for (const auto& l : rep.levels) {
        steps.push_back(l.steps);
        rms.push_back(l.rms);
        mx.push_back(l.max);
    }
    json doc{{"params",
              {{"n", h.params.n},
               {"m", h.params.m},
               {"omega", complex_json(h.params.omega)},
               {"s", complex_json(h.params.s)},
               {"branch", h.params.branch == Branch::Plus ? "plus" : "minus"},
               {"spot", std::exp(cfg.claim.barriers.x0)},
               {"maturity", cfg.maturity},
               {"path_steps", h.path_steps},
               {"seed", cfg.numerics.seed}}},
             {"steps", steps},
             {"n_paths", rep.n_paths},
             {"rms", rms},
             {"max", mx},
             {"slope", rep.slope},
             {"share_notional_drift", rep.max_share_notional_drift},
             {"share_notional_range", {rep.min_share_notional, rep.max_share_notional}}};
    out << doc.dump(2) << '\n';
    return 0;
}

int cmd_span(const RunConfig& cfg, std::ostream& out, OutputFormat format) {
    const SpanConfig& sp = cfg.span;
    std::vector<double> strikes(static_cast<std::size_t>(sp.strikes));
    for (int i = 0; i < sp.strikes; ++i)
        strikes[static_cast<std::size_t>(i)] = sp.k_min + (sp.k_max - sp.k_min) * i / (sp.strikes - 1);
    std::function<double(double)> f;
    if (sp.payoff == "log") f = [k = sp.kappa](double s) { return -2.0 * std::log(s / k); };
    else if (sp.payoff == "call") f = [k = sp.strike](double s) { return std::max(s - k, 0.0); };
    else if (sp.payoff == "put") f = [k = sp.strike](double s) { return std::max(k - s, 0.0); };
    else {
        cfg.claim.validate();
        const PayoffFn g = replicating_payoff(cfg.claim, cfg.branch);
        f = [g, v = sp.qv](double s) { return g(std::log(s), v).real(); };
    }
    SpanningPortfolio port;
    if (sp.method == "ad") {
        std::function<Dual(const Dual&)> fd;
        if (sp.payoff == "log") fd = [k = sp.kappa](const Dual& s) { return -2.0 * log(s / k); };
        else if (sp.payoff == "call")
            fd = [k = sp.strike](const Dual& s) { return s.value().real() > k ? s - Dual(k) : Dual(0.0); };
        else fd = [k = sp.strike](const Dual& s) { return s.value().real() < k ? Dual(k) - s : Dual(0.0); };
        port = span_payoff_ad(fd, sp.kappa, strikes);
    } else {
        port = span_payoff(f, sp.kappa, strikes);
    }
    if (format == OutputFormat::Csv) {
        port.write_csv(out);
        return 0;
    }
    double err = 0.0;
    const int probes = 4 * sp.strikes;
    for (int i = 0; i <= probes; ++i) {
        const double s = sp.k_min + (sp.k_max - sp.k_min) * i / probes;
        err = std::max(err, std::abs(port.payoff(s) - f(s)));
    }
    json puts = json::array(), calls = json::array();
    for (const auto& p : port.puts) puts.push_back({p.strike, p.weight});
    for (const auto& c : port.calls) calls.push_back({c.strike, c.weight});
    json doc{{"command", "span"},      {"payoff", sp.payoff},   {"kappa", port.kappa},
             {"bond", port.bond_weight}, {"forward", port.forward_weight}, {"puts", puts},
             {"calls", calls},         {"max_reconstruction_error", err}};
    out << doc.dump(2) << '\n';
    return 0;
}

OutputFormat default_format(Command c) {
    return c == Command::Curve || c == Command::Span ? OutputFormat::Csv : OutputFormat::Json;
}

}  // namespace

int run_command(const RunConfig& cfg, std::ostream& out) {
    const OutputFormat format = cfg.format.value_or(default_format(cfg.command));
    switch (cfg.command) {
        case Command::Price: return cmd_price(cfg, out, format);
        case Command::Curve: return cmd_curve(cfg, out, format);
        case Command::Hedge: return cmd_hedge(cfg, out, format);
        case Command::Span: return cmd_span(cfg, out, format);
        case Command::Verify: {
            const json report = verify_suite(cfg);
            if (format == OutputFormat::Csv) {
                out << "check,passed,expected_fail,measured,tolerance\n";
                for (const auto& c : report["checks"])
                    out << c["name"].get<std::string>() << ',' << c["passed"].get<bool>() << ','
                        << c["expected_fail"].get<bool>() << ',' << fmt(c["measured"].get<double>()) << ','
                        << fmt(c["tolerance"].get<double>()) << '\n';
            } else {
                out << report.dump(2) << '\n';
            }
            return report["ok"].get<bool>() ? 0 : 4;
        }
    }
    return 0;
}

}  // namespace barrier_repl::cli

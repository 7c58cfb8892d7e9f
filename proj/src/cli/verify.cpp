#include <algorithm>
#include <cmath>

#include "barrier_repl/cli.hpp"
#include "barrier_repl/errors.hpp"
#include "barrier_repl/payoffs.hpp"

namespace barrier_repl::cli {

using nlohmann::json;

namespace {

constexpr cplx I{0.0, 1.0};

struct Check {
    std::string name;
    double measured;
    double tolerance;
    bool expected_fail = false;
    std::string detail;

    bool passed() const { return std::isfinite(measured) && measured <= tolerance; }
};

double z_score(const McEstimate& e) {
    if (e.std_error == 0.0) return std::abs(e.mean) == 0.0 ? 0.0 : INFINITY;
    return std::abs(e.mean) / e.std_error;
}

Check root_residuals() {
    double worst = 0.0;
    const cplx omegas[] = {0.0, 1.0, -0.7, {0.5, -0.25}, {2.0, 0.3}};
    const cplx ss[] = {0.0, 0.2, {0.1, -0.05}, -1.0};
    for (cplx s : ss) {
        for (Branch b : {Branch::Plus, Branch::Minus}) {
            const cplx v = root_v(s, b).value;
            worst = std::max(worst, std::abs(v * v + I * v - 2.0 * I * s) / (1.0 + std::abs(s)));
            for (cplx w : omegas) {
                const cplx u = root_u(w, s, b).value;
                const cplx rhs = w * w + I * w - 2.0 * I * s;
                worst = std::max(worst, std::abs(u * u + I * u - rhs) / (1.0 + std::abs(rhs)));
            }
        }
    }
    return {"root_residuals", worst, 1e-12, false, "u and v root equations over a grid of (omega, s)"};
}

SimulationSetup setup_for(const RunConfig& cfg, std::size_t paths, int steps) {
    SimulationSetup s;
    s.model = cfg.model;
    s.times = uniform_grid(cfg.maturity, steps);
    s.x0 = cfg.claim.barriers.x0;
    s.seed = cfg.numerics.seed;
    s.n_paths = paths;
    return s;
}

std::vector<Check> identity_checks(const RunConfig& cfg, std::size_t paths) {
    const double x0 = cfg.claim.barriers.x0;
    const std::vector<std::pair<cplx, cplx>> points{{1.0, 0.0}, {0.5, 0.2}, {-1.0, 0.5}};
    std::vector<Check> out;
    for (Branch b : {Branch::Plus, Branch::Minus}) {
        const auto est = mc_expectations(setup_for(cfg, paths, 1), points.size(),
                                         [&](const PathRecord& p, const BarrierHits&, std::span<cplx> v) {
                                             const double x = p.x.back(), q = p.qv.back();
                                             for (std::size_t i = 0; i < points.size(); ++i) {
                                                 const auto [w, s] = points[i];
                                                 const cplx u = root_u(w, s, b).value;
                                                 v[i] = std::exp(I * w * x + I * s * q) -
                                                        std::exp(I * (w - u) * x0 + I * u * x);
                                             }
                                         });
        double worst = 0.0;
        for (const auto& e : est) worst = std::max(worst, z_score(e));
        out.push_back({std::string("charfun_identity_") + (b == Branch::Plus ? "plus" : "minus"), worst, 3.0, false,
                       "max |paired difference| / standard error over 3 (omega, s) points"});
    }
    // exp(i v (X_T - X_0) + i s QV_T) has mean one
    const cplx rs[] = {0.0, 0.2, 0.5};
    const auto est = mc_expectations(setup_for(cfg, paths, 1), 3,
                                     [&](const PathRecord& p, const BarrierHits&, std::span<cplx> v) {
                                         for (int i = 0; i < 3; ++i) {
                                             const cplx r = root_v(rs[i]).value;
                                             v[static_cast<std::size_t>(i)] =
                                                 std::exp(I * r * (p.x.back() - x0) + I * rs[i] * p.qv.back()) - 1.0;
                                         }
                                     });
    double worst = 0.0;
    for (const auto& e : est) worst = std::max(worst, z_score(e));
    out.push_back({"rebate_martingale", worst, 3.0, false, "max |mean - 1| / standard error over s in {0, 0.2, 0.5}"});
    return out;
}

Check pcs_check(const RunConfig& cfg, std::size_t paths) {
    const double x0 = cfg.claim.barriers.x0;
    const double s0 = std::exp(x0);
    const auto est = mc_expectations(setup_for(cfg, paths, 1), 9,
                                     [&](const PathRecord& p, const BarrierHits&, std::span<cplx> v) {
                                         const double x = p.x.back();
                                         for (int i = 0; i < 9; ++i) {
                                             const double k = s0 * (0.8 + 0.05 * i);
                                             const double direct = std::max(std::exp(x) - k, 0.0);
                                             const double reflected =
                                                 std::exp(x - x0) * std::max(std::exp(2.0 * x0 - x) - k, 0.0);
                                             v[static_cast<std::size_t>(i)] = direct - reflected;
                                         }
                                     });
    double worst = 0.0;
    for (const auto& e : est) worst = std::max(worst, z_score(e));
    return {"put_call_symmetry", worst, 3.0, false, "max z-score of paired difference over 9 strikes"};
}

std::vector<Check> zero_at_barrier() {
    const double L = std::log(90.0), U = std::log(110.0);
    const auto phi = power_exp_payoff(0, 1, 0.0, 0.0);
    const auto lower = sbko_image(phi, L);
    const auto upper = sbko_image_upper(phi, U);
    const auto dbl = dbko_image(phi, L, U, 5);
    double single = 0.0, dbko = 0.0;
    for (double v : {0.01, 0.04, 0.16}) {
        single = std::max(single, std::abs(price_payoff_under_law(lower, TerminalLaw::deterministic(L, v))));
        single = std::max(single, std::abs(price_payoff_under_law(upper, TerminalLaw::deterministic(U, v))));
        dbko = std::max(dbko, std::abs(price_payoff_under_law(dbl, TerminalLaw::deterministic(L, v))));
        dbko = std::max(dbko, std::abs(price_payoff_under_law(dbl, TerminalLaw::deterministic(U, v))));
    }
    return {{"zero_at_barrier_single", single, 1e-8, false, "variance-swap images at the barrier, v in {0.01, 0.04, 0.16}"},
            {"zero_at_barrier_double", dbko, 1e-5, false, "q = 5 double image at either barrier"}};
}

TerminalLaw law_for(const RunConfig& cfg, double x0) {
    if (const auto* d = std::get_if<DeterministicVol>(&cfg.model))
        return TerminalLaw::deterministic(x0, d->integrated_variance(0.0, cfg.maturity));
    return mixture_from_qv_samples(x0, sample_total_qv(cfg.model, cfg.maturity, 100000, cfg.numerics.seed), 256);
}

Check rebate_closed_form(const RunConfig& cfg) {
    const double x0 = std::log(100.0), L = std::log(90.0);
    const TerminalLaw law = law_for(cfg, x0);
    PricingOptions o;
    o.n = 50;
    const cplx price = price_rebate_powerexp(law, x0, RebateClaim{Side::Lower, L, 0, 0.0}, o).price;
    double exact = 0.0;
    for (const auto& c : law.components()) exact += c.weight * first_passage_probability(x0, L, c.qv);
    return {"rebate_closed_form", std::abs(price - exact), 5e-3, false, "n = 50 rebate vs first-passage probability"};
}

Check sbko_vs_mc(const RunConfig& cfg, std::size_t paths) {
    const double x0 = std::log(110.0), L = std::log(90.0);
    const TerminalLaw law = law_for(cfg, x0);
    PricingOptions o;
    o.n = 25;
    const SbkoClaim claim{Side::Lower, L, 0, 1, 0.0, 0.0};
    const double p25 = price_sbko_powerexp(law, x0, claim, o).price.real();
    o.n = 50;
    const double p50 = price_sbko_powerexp(law, x0, claim, o).price.real();
    ClaimSpec spec;
    spec.kind = ClaimKind::SBKO;
    spec.barriers.lower = L;
    spec.barriers.x0 = x0;
    spec.k = 1;
    const McEstimate mc = mc_price(spec, cfg.model, paths, uniform_grid(cfg.maturity, 256), cfg.numerics.seed);
    const double gap = std::abs(p50 - mc.mean.real());
    // tolerance: three standard errors plus the n = 25 to 50 smoothing gap
    const double tol = 3.0 * mc.std_error + std::abs(p50 - p25);
    return {"sbko_variance_swap_vs_mc", gap, tol, false, "n = 50 contour price vs bridge-corrected MC"};
}

Check varswap_holding(const RunConfig& cfg, Branch branch) {
    HedgeParams p;
    p.m = 1;
    p.branch = branch;
    const auto rep = hedge_report(p, cfg.model, cfg.claim.barriers.x0, cfg.maturity, 64, {64}, 20, cfg.numerics.seed);
    const bool minus = branch == Branch::Minus;
    const double off = std::max({rep.max_share_notional_drift, std::abs(rep.min_share_notional - 2.0),
                                 std::abs(rep.max_share_notional - 2.0)});
    return {minus ? "varswap_two_units_minus_branch" : "varswap_two_units", off, 1e-12, minus,
            minus ? "broken-branch fixture: the two-unit holding needs the plus root" : "share notional stays at 2"};
}

}  // namespace

json verify_suite(const RunConfig& cfg) {
    const std::size_t paths = cfg.numerics.mc_paths > 0 ? cfg.numerics.mc_paths : 20000;
    std::vector<Check> checks;
    checks.push_back(root_residuals());
    for (auto& c : identity_checks(cfg, paths)) checks.push_back(std::move(c));
    checks.push_back(pcs_check(cfg, paths));
    for (auto& c : zero_at_barrier()) checks.push_back(std::move(c));
    checks.push_back(rebate_closed_form(cfg));
    checks.push_back(sbko_vs_mc(cfg, paths));
    checks.push_back(varswap_holding(cfg, Branch::Plus));
    checks.push_back(varswap_holding(cfg, Branch::Minus));

    bool ok = true;
    json rows = json::array();
    for (const auto& c : checks) {
        const bool as_expected = c.passed() != c.expected_fail;
        ok = ok && as_expected;
        rows.push_back({{"name", c.name},
                        {"passed", c.passed()},
                        {"expected_fail", c.expected_fail},
                        {"as_expected", as_expected},
                        {"measured", c.measured},
                        {"tolerance", c.tolerance},
                        {"detail", c.detail}});
    }
    return {{"command", "verify"},
            {"model", std::holds_alternative<DeterministicVol>(cfg.model) ? "deterministic" : "regime"},
            {"paths", paths},
            {"seed", cfg.numerics.seed},
            {"checks", rows},
            {"ok", ok}};
}

}  // namespace barrier_repl::cli

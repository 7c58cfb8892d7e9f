#include <doctest.h>

#include "barrier_repl/errors.hpp"
#include "barrier_repl/parallel.hpp"
#include "barrier_repl/payoffs.hpp"
#include "barrier_repl/pricer.hpp"
#include "oracles.hpp"

using namespace barrier_repl;

namespace {
constexpr cplx I{0.0, 1.0};
const double L = std::log(90.0);
const double U = std::log(110.0);

PricingOptions with_n(int n) {
    PricingOptions o;
    o.n = n;
    return o;
}
}  // namespace

TEST_SUITE("pricer") {

TEST_CASE("kernel against a numerical Fourier transform") {
    // H_1(x) = (1 + tanh x)/2, transformed along Im omega = -1/2
    const cplx w{0.0, -0.5};
    const cplx ft = oracle::simpson(
                        [&](double x) { return 0.5 * (1.0 + std::tanh(x)) * std::exp(-I * w * x); }, -80.0, 80.0,
                        64000) /
                    (2.0 * std::numbers::pi);
    CHECK(std::abs(ft - std::sqrt(2.0) / 4.0) < 1e-10);
    CHECK(std::abs(heaviside_kernel(w, 1) - ft) < 1e-10);
    const cplx w2{0.8, -0.3};
    const cplx ft2 = oracle::simpson(
                         [&](double x) { return 0.5 * (1.0 + std::tanh(3.0 * x)) * std::exp(-I * w2 * x); }, -80.0,
                         80.0, 64000) /
                     (2.0 * std::numbers::pi);
    CHECK(std::abs(heaviside_kernel(w2, 3) - ft2) < 1e-9);
}

TEST_CASE("kernel decay and pole guard") {
    const double ratio = std::abs(heaviside_kernel(cplx(100.0, -0.5), 25)) / std::abs(heaviside_kernel(cplx(50.0, -0.5), 25));
    CHECK(ratio == doctest::Approx(std::exp(-std::numbers::pi)).epsilon(0.05));
    try {
        heaviside_kernel(0.0, 25);
        FAIL("expected KernelPole");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::KernelPole);
    }
}

TEST_CASE("law expectations") {
    const auto law = TerminalLaw::deterministic(0.0, 0.04);
    CHECK(std::abs(price_payoff_under_law(constant_payoff(1.0), law) - 1.0) < 1e-12);
    CHECK(std::abs(price_payoff_under_law(power_exp_payoff(1, 0, 0.0, 0.0), law) + 0.02) < 1e-12);
    const auto mix = TerminalLaw::mixture(0.1, {{0.3, 0.01}, {0.7, 0.09}});
    const cplx expected = 0.3 * std::exp(I * 0.1) * conditional_charfun(1.0, 0.0, 0.01) +
                          0.7 * std::exp(I * 0.1) * conditional_charfun(1.0, 0.0, 0.09);
    CHECK(std::abs(mix.expect_exp(Dual(1.0)).value() - expected) < 1e-14);
}

TEST_CASE("unreachable barriers reduce to the European price") {
    const double x0 = std::log(110.0);
    const auto law = TerminalLaw::deterministic(x0, 0.04);
    const auto sb = price_sbko_powerexp(law, x0, SbkoClaim{Side::Lower, x0 - 40.0, 0, 1, 0.0, 0.0}, with_n(25));
    CHECK(std::abs(sb.price - 0.04) < 1e-4);
    const auto db = price_dbko_powerexp(law, x0, DbkoClaim{L, x0 + 40.0, 0, 1, 0.0, 0.0, 0}, with_n(25));
    const auto single = price_sbko_powerexp(law, x0, SbkoClaim{Side::Lower, L, 0, 1, 0.0, 0.0}, with_n(25));
    CHECK(std::abs(db.price - single.price) < 1e-4);
    const auto rb = price_rebate_powerexp(law, x0, RebateClaim{Side::Lower, x0 - 40.0, 0, 0.0}, with_n(25));
    CHECK(std::abs(rb.price) < 1e-4);
    const auto ru = price_rebate_powerexp(law, x0, RebateClaim{Side::Upper, x0 + 40.0, 0, 0.0}, with_n(25));
    CHECK(std::abs(ru.price) < 1e-4);
}

TEST_CASE("contour prices converge to the image-payoff price") {
    const double x0 = std::log(110.0);
    const auto law = TerminalLaw::deterministic(x0, 0.04);
    const SbkoClaim claim{Side::Lower, L, 0, 1, 0.0, 0.0};
    const cplx image = price_payoff_under_law(sbko_image(power_exp_payoff(0, 1, 0.0, 0.0), L), law);
    const cplx p25 = price_sbko_powerexp(law, x0, claim, with_n(25)).price;
    const cplx p50 = price_sbko_powerexp(law, x0, claim, with_n(50)).price;
    const cplx p100 = price_sbko_powerexp(law, x0, claim, with_n(100)).price;
    CHECK(std::abs(p50 - p25) >= std::abs(p100 - p50));
    CHECK(std::abs(p100 - image) < std::abs(p25 - image));
    CHECK(std::abs(p100 - image) < 5e-5);
    // second-order smoothing bias: halving 1/n quarters the gap
    CHECK(std::abs(p50 - image) / std::abs(p100 - image) == doctest::Approx(4.0).epsilon(0.15));
    CHECK(std::abs(p25.imag()) < 1e-8);
}

TEST_CASE("upper knock-out and double knock-out against image quadrature") {
    const double x0 = std::log(100.0);
    const auto law = TerminalLaw::deterministic(x0, 0.02);
    const auto phi = power_exp_payoff(0, 1, 0.0, 0.0);
    const cplx up = price_payoff_under_law(sbko_image_upper(phi, U), law);
    const cplx up100 = price_sbko_powerexp(law, x0, SbkoClaim{Side::Upper, U, 0, 1, 0.0, 0.0}, with_n(100)).price;
    CHECK(std::abs(up100 - up) < 1e-4);
    const cplx dbl = price_payoff_under_law(dbko_image(phi, L, U, 5), law);
    const auto d100 = price_dbko_powerexp(law, x0, DbkoClaim{L, U, 0, 1, 0.0, 0.0, 5}, with_n(100));
    CHECK(std::abs(d100.price - dbl) < 2e-4);
    CHECK(d100.truncation < 1e-12);
}

TEST_CASE("power-exponential claims with p and s") {
    const double x0 = std::log(110.0);
    const auto law = TerminalLaw::deterministic(x0, 0.04);
    const cplx p = 0.3, s = 0.5;
    const cplx image = price_payoff_under_law(sbko_image(power_exp_payoff(1, 1, p, s), L), law);
    const cplx p100 = price_sbko_powerexp(law, x0, SbkoClaim{Side::Lower, L, 1, 1, p, s}, with_n(100)).price;
    CHECK(std::abs(p100 - image) < 5e-4 * std::max(1.0, std::abs(image)));
}

TEST_CASE("contour shifts inside the strip leave the price unchanged") {
    const double x0 = std::log(110.0);
    const auto law = TerminalLaw::deterministic(x0, 0.04);
    const SbkoClaim claim{Side::Lower, L, 0, 1, 0.0, 0.0};
    const cplx base = price_sbko_powerexp(law, x0, claim, with_n(25)).price;
    for (double wi : {-0.75, -1.25}) {
        PricingOptions o = with_n(25);
        o.contour_g.omega_i = wi;
        CHECK(std::abs(price_sbko_powerexp(law, x0, claim, o).price - base) <= 1e-7);
    }
    PricingOptions bad = with_n(25);
    bad.contour_g.omega_i = 0.5;
    CHECK_THROWS_AS(price_sbko_powerexp(law, x0, claim, bad), Error);
}

TEST_CASE("rebate matches the first-passage probability") {
    const double x0 = std::log(100.0);
    const double v = 0.04;
    const auto law = TerminalLaw::deterministic(x0, v);
    const double exact = oracle::bm_hit_probability(x0, L, -0.5, v);
    const cplx p50 = price_rebate_powerexp(law, x0, RebateClaim{Side::Lower, L, 0, 0.0}, with_n(50)).price;
    CHECK(std::abs(p50 - exact) < 5e-3);
    const double x1 = std::log(80.0);
    const auto law_u = TerminalLaw::deterministic(x1, v);
    const double exact_u = oracle::bm_hit_probability(x1, L, -0.5, v);
    const cplx pu = price_rebate_powerexp(law_u, x1, RebateClaim{Side::Upper, L, 0, 0.0}, with_n(50)).price;
    CHECK(std::abs(pu - exact_u) < 5e-3);
}

TEST_CASE("European-style pricing of a Gaussian payoff") {
    const double x0 = 0.1;
    const auto law = TerminalLaw::mixture(x0, {{0.5, 0.02}, {0.5, 0.08}});
    // f(x) = exp(-(x - x0)^2 / 2) has f_hat(w) = exp(-w^2/2 - i w x0) / sqrt(2 pi)
    auto f_hat = [&](cplx w) { return std::exp(-0.5 * w * w - I * w * x0) / std::sqrt(2.0 * std::numbers::pi); };
    ContourSpec c;
    c.omega_i = -0.3;
    const cplx price = price_european_style(law, x0, f_hat, c, 0, 0.0);
    cplx direct = 0.0;
    for (const auto& comp : law.components())
        direct += comp.weight * oracle::normal_expectation(
                                    [&](double x) { return cplx(std::exp(-0.5 * (x - x0) * (x - x0))); }, x0, comp.qv);
    CHECK(std::abs(price - direct) <= 1e-8);
    // variance swap through the QV order
    ContourSpec c2;
    c2.omega_i = -0.3;
    const cplx swap = price_european_style(TerminalLaw::deterministic(x0, 0.04), x0, f_hat, c2, 1, 0.0);
    const cplx unit = price_european_style(TerminalLaw::deterministic(x0, 0.04), x0, f_hat, c2, 0, 0.0);
    CHECK(std::abs(swap - 0.04 * unit) < 1e-10);
}

TEST_CASE("prices do not depend on the thread count") {
    const double x0 = std::log(110.0);
    const auto law = TerminalLaw::deterministic(x0, 0.04);
    const SbkoClaim claim{Side::Lower, L, 0, 1, 0.0, 0.0};
    set_thread_count(1);
    const cplx a = price_sbko_powerexp(law, x0, claim, with_n(25)).price;
    set_thread_count(3);
    const cplx b = price_sbko_powerexp(law, x0, claim, with_n(25)).price;
    set_thread_count(0);
    CHECK(a == b);
}

}

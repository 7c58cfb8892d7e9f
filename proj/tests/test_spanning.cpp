#include <doctest.h>

#include <sstream>

#include "barrier_repl/errors.hpp"
#include "barrier_repl/payoffs.hpp"
#include "barrier_repl/pricer.hpp"
#include "barrier_repl/spanning.hpp"

using namespace barrier_repl;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = a + (b - a) * i / (n - 1);
    return out;
}

double max_error(const SpanningPortfolio& p, const std::function<double(double)>& f, double a, double b) {
    double worst = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double s = a + (b - a) * i / 20000.0;
        worst = std::max(worst, std::abs(p.payoff(s) - f(s)));
    }
    return worst;
}

}  // namespace

TEST_SUITE("spanning") {

TEST_CASE("a call on the grid is a single call") {
    const auto p = span_payoff([](double s) { return std::max(s - 120.0, 0.0); }, 100.0, linspace(50, 200, 151));
    CHECK(p.bond_weight == 0.0);
    CHECK(p.forward_weight == 0.0);
    CHECK(p.puts.empty());
    REQUIRE(p.calls.size() == 1);
    CHECK(p.calls[0].strike == 120.0);
    CHECK(p.calls[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    const auto q = span_payoff_ad([](const Dual& s) { return s.value().real() > 120.0 ? s - Dual(120.0) : Dual(0.0); },
                                  100.0, linspace(50, 200, 151));
    REQUIRE(q.calls.size() == 1);
    CHECK(q.calls[0].weight == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(q.puts.empty());
}

TEST_CASE("log contract weights") {
    const double s0 = 100.0;
    const auto strikes = linspace(50, 200, 151);
    const auto p = span_payoff_ad([&](const Dual& s) { return -2.0 * log(s / s0); }, s0, strikes);
    CHECK(p.bond_weight == 0.0);
    CHECK(std::abs(p.forward_weight + 2.0 / s0) < 1e-15);
    const double dk = 1.0;
    for (const auto& leg : {p.puts, p.calls})
        for (const auto& w : leg) {
            if (w.strike == 50.0 || w.strike == 200.0 || w.strike == s0) continue;
            CHECK(std::abs(w.weight / dk - 2.0 / (w.strike * w.strike)) <= 1e-10 * 2.0 / (w.strike * w.strike));
        }
    // the difference route agrees to second order in the strike spacing
    const auto d = span_payoff([&](double s) { return -2.0 * std::log(s / s0); }, s0, strikes);
    CHECK(d.forward_weight == doctest::Approx(-2.0 / s0).epsilon(1e-4));
    for (std::size_t i = 0; i < d.calls.size(); ++i)
        if (d.calls[i].strike != s0) CHECK(d.calls[i].weight == doctest::Approx(2.0 / std::pow(d.calls[i].strike, 2)).epsilon(1e-3));
}

TEST_CASE("piecewise-linear payoffs are exact at the nodes") {
    auto f = [](double s) { return std::max(s - 80.0, 0.0) - 2.0 * std::max(s - 130.0, 0.0) + 0.5 * std::max(95.0 - s, 0.0); };
    const auto strikes = linspace(50, 200, 31);
    const auto p = span_payoff(f, 100.0, strikes);
    for (double k : strikes) CHECK(std::abs(p.payoff(k) - f(k)) < 1e-12);
}

TEST_CASE("smooth payoffs converge at second order") {
    const std::vector<std::function<double(double)>> payoffs{
        [](double s) { return -2.0 * std::log(s / 100.0); },
        [](double s) { return std::sqrt(s); },
        [](double s) { return std::exp(-(s - 100.0) * (s - 100.0) / 800.0); },
    };
    for (const auto& f : payoffs) {
        const double coarse = max_error(span_payoff(f, 100.0, linspace(50, 200, 76)), f, 60, 150);
        const double fine = max_error(span_payoff(f, 100.0, linspace(50, 200, 151)), f, 60, 150);
        CHECK(coarse / fine >= 3.5);
        CHECK(coarse / fine <= 4.5);
    }
}

TEST_CASE("knock-out image reconstruction away from the jump") {
    const double L = std::log(90.0), v = 0.04;
    const auto img = sbko_image(power_exp_payoff(0, 1, 0.0, 0.0), L);
    auto f = [&](double s) { return img(std::log(s), v).real(); };
    const auto strikes = linspace(50, 200, 200);
    const auto p = span_payoff(f, 100.0, strikes);
    const auto cell = std::upper_bound(strikes.begin(), strikes.end(), 90.0);
    const double lo = *(cell - 1), hi = *cell;
    double worst = 0.0;
    for (int i = 0; i <= 9000; ++i) {
        const double s = 60.0 + 90.0 * i / 9000.0;
        if (s >= lo && s <= hi) continue;
        worst = std::max(worst, std::abs(p.payoff(s) - f(s)));
    }
    CHECK(worst <= 1e-3);
}

TEST_CASE("portfolio value under a law matches the payoff price") {
    auto f = [](double s) { return std::sqrt(s); };
    const auto p = span_payoff(f, 100.0, linspace(50, 200, 151));
    const double bound = max_error(p, f, 50, 200);
    const auto law = TerminalLaw::mixture(std::log(100.0), {{0.5, 0.01}, {0.5, 0.03}});
    PayoffFn direct, spanned;
    direct.eval = [&](double x, double) { return cplx(f(std::exp(x))); };
    direct.depends_on_qv = false;
    spanned.eval = [&](double x, double) { return cplx(p.payoff(std::exp(x))); };
    spanned.depends_on_qv = false;
    for (const auto& leg : {p.puts, p.calls})
        for (const auto& w : leg) spanned.breakpoints.push_back(std::log(w.strike));
    const double gap = std::abs(price_payoff_under_law(direct, law) - price_payoff_under_law(spanned, law));
    CHECK(gap <= bound + 1e-6);
}

TEST_CASE("grid validation and export") {
    auto f = [](double s) { return s; };
    CHECK_THROWS_AS(span_payoff(f, 100.0, {50.0, 40.0, 200.0}), Error);
    CHECK_THROWS_AS(span_payoff(f, 100.0, {-1.0, 150.0, 200.0}), Error);
    CHECK_THROWS_AS(span_payoff(f, 300.0, {50.0, 200.0}), Error);
    try {
        span_payoff(f, 100.0, {50.0, 50.0, 200.0});
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::InvalidGrid);
    }
    const auto p = span_payoff([](double s) { return std::max(90.0 - s, 0.0); }, 100.0, linspace(50, 200, 16));
    std::ostringstream out;
    p.write_csv(out);
    CHECK(out.str() == "instrument_type,strike,weight\nbond,0,0\nforward,100,0\nput,90,1\n");
}

}

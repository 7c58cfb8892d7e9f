#include <doctest.h>

#include "barrier_repl/parallel.hpp"
#include "barrier_repl/payoffs.hpp"
#include "barrier_repl/rng.hpp"
#include "barrier_repl/simulator.hpp"
#include "oracles.hpp"

using namespace barrier_repl;

namespace {
constexpr cplx I{0.0, 1.0};

RegimeSwitchingVol two_state(double rate, double lo = 0.1, double hi = 0.3) {
    RegimeSwitchingVol r;
    r.sigmas = {lo, hi};
    r.generator = Eigen::MatrixXd(2, 2);
    r.generator << -rate, rate, rate, -rate;
    r.initial_state = 0;
    return r;
}

bool within(const McEstimate& e, cplx target, double k = 3.0) { return std::abs(e.mean - target) <= k * e.std_error; }

SimulationSetup setup(VolModel model, std::size_t paths, int steps, double x0 = 0.0) {
    SimulationSetup s;
    s.model = std::move(model);
    s.times = uniform_grid(1.0, steps);
    s.x0 = x0;
    s.n_paths = paths;
    s.seed = 2024;
    return s;
}
}  // namespace

TEST_SUITE("simulator") {

TEST_CASE("Philox4x32-10 known answers") {
    using C = Philox4x32::Counter;
    CHECK(Philox4x32::generate({0, 0, 0, 0}, {0, 0}) == C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(Philox4x32::generate({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(Philox4x32::generate({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("streams are reproducible and role separated") {
    RandomStream a(7, StreamRole::Price, 3), b(7, StreamRole::Price, 3), c(7, StreamRole::Vol, 3);
    for (int i = 0; i < 10; ++i) {
        const double x = a.normal();
        CHECK(x == b.normal());
        CHECK(x != c.normal());
    }
}

TEST_CASE("integrated variance") {
    const auto times = uniform_grid(1.0, 37);
    const auto det = simulate_vol(DeterministicVol::constant(0.2), times, 1, 0);
    double total = 0.0;
    for (double q : det.qv_steps) total += q;
    CHECK(total == doctest::Approx(0.04).epsilon(1e-14));
    const auto frozen = simulate_vol(two_state(0.0), times, 1, 5);
    total = 0.0;
    for (double q : frozen.qv_steps) total += q;
    CHECK(total == doctest::Approx(0.01).epsilon(1e-14));
    DeterministicVol pieces{{0.0, 0.5}, {0.1, 0.3}};
    CHECK(pieces.integrated_variance(0.0, 1.0) == doctest::Approx(0.5 * 0.01 + 0.5 * 0.09).epsilon(1e-14));
}

TEST_CASE("regime expected QV against the two-state closed form") {
    const double rate = 1.0, T = 1.0;
    const auto model = two_state(rate);
    // p0(t) = (1 + exp(-2 rate t)) / 2
    const double mean_p0 = 0.5 * T + (1.0 - std::exp(-2.0 * rate * T)) / (4.0 * rate);
    const double exact = 0.01 * mean_p0 + 0.09 * (T - mean_p0);
    CHECK(expected_total_qv(model, T) == doctest::Approx(exact).epsilon(1e-12));
    const auto samples = sample_total_qv(model, T, 100000, 9);
    double m = 0.0, m2 = 0.0;
    for (double q : samples) {
        m += q;
        m2 += q * q;
    }
    m /= samples.size();
    const double se = std::sqrt((m2 / samples.size() - m * m) / samples.size());
    CHECK(std::abs(m - exact) <= 3.0 * se);
}

TEST_CASE("exact conditional-Gaussian stepping") {
    const auto zero = simulate_x(uniform_grid(1.0, 16), simulate_vol(DeterministicVol::constant(0.0), uniform_grid(1.0, 16), 1, 0), 0.3, 1, 0);
    for (double x : zero.x) CHECK(x == 0.3);
    const auto est = mc_expectations(setup(DeterministicVol::constant(0.2), 100000, 8), 3,
                                     [](const PathRecord& p, const BarrierHits&, std::span<cplx> v) {
                                         const double d = p.x.back() - p.x.front();
                                         v[0] = d;
                                         v[1] = (d + 0.02) * (d + 0.02);
                                         v[2] = std::exp(d);
                                     });
    CHECK(within(est[0], -0.02));
    CHECK(within(est[1], 0.04));
    CHECK(within(est[2], 1.0));
}

TEST_CASE("price randomness is independent of the volatility model") {
    const auto times = uniform_grid(1.0, 32);
    const auto a = simulate_vol(DeterministicVol::constant(0.2), times, 5, 11);
    const auto b = simulate_vol(two_state(2.0), times, 5, 11);
    const auto pa = simulate_x(times, a, 0.0, 5, 11), pb = simulate_x(times, b, 0.0, 5, 11);
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double za = (pa.x[i + 1] - pa.x[i] + a.qv_steps[i] / 2) / std::sqrt(a.qv_steps[i]);
        const double zb = (pb.x[i + 1] - pb.x[i] + b.qv_steps[i] / 2) / std::sqrt(b.qv_steps[i]);
        CHECK(za == doctest::Approx(zb).epsilon(1e-12));
    }
}

TEST_CASE("barrier detection edge cases") {
    PathRecord far{{0.0, 1.0}, {0.0, 0.0}, {0.0, 0.04}, {0, 0}};
    BarrierSpec b;
    b.lower = -30.0;
    for (auto mode : {Monitoring::GridOnly, Monitoring::BridgeCorrected})
        CHECK_FALSE(detect_barrier(far, b, mode, 1, 0).lower.has_value());
    PathRecord straddle{{0.0, 1.0}, {0.0, -0.5}, {0.0, 0.04}, {0, 0}};
    b.lower = -0.2;
    for (auto mode : {Monitoring::GridOnly, Monitoring::BridgeCorrected}) {
        const auto h = detect_barrier(straddle, b, mode, 1, 0);
        REQUIRE(h.lower.has_value());
        CHECK(h.lower->time == doctest::Approx(0.4));
        CHECK(h.lower->qv == doctest::Approx(0.016));
        CHECK(h.lower->x == -0.2);
    }
}

TEST_CASE("survival probability: bridge correction is unbiased, grid monitoring is not") {
    const double x0 = std::log(100.0), L = std::log(90.0);
    const double exact = 1.0 - oracle::bm_hit_probability(x0, L, -0.5, 0.04);
    double previous_gap = 1.0;
    for (int steps : {64, 256, 1024}) {
        auto s = setup(DeterministicVol::constant(0.2), 20000, steps, x0);
        s.barriers.lower = L;
        s.barriers.x0 = x0;
        auto survive = [](const PathRecord&, const BarrierHits& h, std::span<cplx> v) { v[0] = h.lower ? 0.0 : 1.0; };
        s.monitoring = Monitoring::BridgeCorrected;
        const auto bridged = mc_expectations(s, 1, survive)[0];
        CHECK(within(bridged, exact));
        s.monitoring = Monitoring::GridOnly;
        const auto grid = mc_expectations(s, 1, survive)[0];
        const double gap = grid.mean.real() - exact;
        CHECK(gap > 0.0);
        CHECK(gap < previous_gap);
        previous_gap = gap;
    }
}

TEST_CASE("charfun identity and rebate martingale under regime switching") {
    for (VolModel model : {VolModel{DeterministicVol::constant(0.2)}, VolModel{two_state(1.0)}}) {
        const double x0 = 0.2;
        const cplx w = 0.7, s{0.0, 0.3};
        const auto est = mc_expectations(setup(model, 50000, 1, x0), 4,
                                         [&](const PathRecord& p, const BarrierHits&, std::span<cplx> v) {
                                             const double x = p.x.back(), q = p.qv.back();
                                             for (int b = 0; b < 2; ++b) {
                                                 const cplx u = root_u(w, s, b ? Branch::Minus : Branch::Plus).value;
                                                 v[static_cast<std::size_t>(b)] =
                                                     std::exp(I * w * x + I * s * q) - std::exp(I * (w - u) * x0 + I * u * x);
                                             }
                                             v[2] = rebate_psi(x, q, -0.1, 0.4) - rebate_psi(x0, 0.0, -0.1, 0.4);
                                             const cplx s2{-0.2, 0.1};
                                             v[3] = rebate_psi(x, q, -0.1, s2) - rebate_psi(x0, 0.0, -0.1, s2);
                                         });
        for (const auto& e : est) CHECK(within(e, 0.0));
    }
}

TEST_CASE("put-call symmetry under regime switching") {
    const double x0 = std::log(100.0);
    const auto est = mc_expectations(setup(two_state(1.5), 50000, 1, x0), 9,
                                     [&](const PathRecord& p, const BarrierHits&, std::span<cplx> v) {
                                         const double x = p.x.back();
                                         for (int i = 0; i < 9; ++i) {
                                             const double k = 80.0 + 5.0 * i;
                                             v[static_cast<std::size_t>(i)] =
                                                 std::max(std::exp(x) - k, 0.0) -
                                                 std::exp(x - x0) * std::max(std::exp(2 * x0 - x) - k, 0.0);
                                         }
                                     });
    for (const auto& e : est) CHECK(within(e, 0.0));
}

TEST_CASE("claim prices") {
    const auto times = uniform_grid(1.0, 64);
    ClaimSpec swap;
    swap.k = 1;
    swap.barriers.x0 = std::log(100.0);
    const auto e = mc_price(swap, DeterministicVol::constant(0.2), 2000, times, 3);
    CHECK(std::abs(e.mean - 0.04) < 1e-14);
    // unreachable barrier: knock-out equals the European claim path by path
    ClaimSpec ko = swap;
    ko.kind = ClaimKind::SBKO;
    ko.j = 1;
    ko.k = 0;
    ko.barriers.lower = swap.barriers.x0 - 40.0;
    ClaimSpec eu = ko;
    eu.kind = ClaimKind::EuropeanStylePowerExp;
    eu.barriers.lower.reset();
    CHECK(mc_price(ko, two_state(1.0), 3000, times, 8).mean == mc_price(eu, two_state(1.0), 3000, times, 8).mean);
}

TEST_CASE("knock-in claims equal their psi claims on common paths") {
    const double x0 = std::log(100.0), L = std::log(95.0);
    auto s = setup(two_state(1.0, 0.15, 0.3), 40000, 256, x0);
    s.barriers.lower = L;
    s.barriers.x0 = x0;
    ClaimSpec ki;
    ki.kind = ClaimKind::SBKI_PowerExp;
    ki.barriers = s.barriers;
    ki.p = 0.5;
    ki.s = 0.2;
    const auto psi = ski_payoff(0, 0, L, ki.p, ki.s, Side::Lower);
    const auto est = mc_expectations(s, 1, [&](const PathRecord& p, const BarrierHits& h, std::span<cplx> v) {
        v[0] = claim_payoff(ki, p, h) - psi(p.x.back(), p.qv.back());
    });
    CHECK(within(est[0], 0.0));
}

TEST_CASE("estimates do not depend on the thread count") {
    auto s = setup(two_state(1.0), 3000, 32, 0.0);
    s.barriers.lower = -0.1;
    auto f = [](const PathRecord& p, const BarrierHits& h, std::span<cplx> v) {
        v[0] = h.lower ? cplx(h.lower->qv) : cplx(p.x.back());
    };
    set_thread_count(1);
    const auto a = mc_expectations(s, 1, f)[0];
    set_thread_count(4);
    const auto b = mc_expectations(s, 1, f)[0];
    set_thread_count(0);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("path dump") {
    const auto times = uniform_grid(1.0, 2);
    const auto rec = simulate_x(times, simulate_vol(DeterministicVol::constant(0.2), times, 1, 0), 0.0, 1, 0);
    std::ostringstream out;
    write_path_csv(out, rec);
    const std::string text = out.str();
    CHECK(text.rfind("t,x,qv,regime\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);
}

}

#include "barrier_repl/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unsupported/Eigen/MatrixFunctions>

#include "barrier_repl/errors.hpp"
#include "barrier_repl/parallel.hpp"
#include "barrier_repl/rng.hpp"

namespace barrier_repl {

namespace {
constexpr cplx I{0.0, 1.0};
constexpr double kInf = std::numeric_limits<double>::infinity();
}  // namespace

std::size_t DeterministicVol::piece(double t) const {
    const auto it = std::upper_bound(breaks.begin(), breaks.end(), t);
    return it == breaks.begin() ? 0 : static_cast<std::size_t>(it - breaks.begin() - 1);
}

double DeterministicVol::integrated_variance(double a, double b) const {
    double total = 0.0;
    for (std::size_t i = 0; i < sigmas.size(); ++i) {
        const double lo = std::max(a, breaks[i]);
        const double hi = std::min(b, i + 1 < breaks.size() ? breaks[i + 1] : kInf);
        if (hi > lo) total += sigmas[i] * sigmas[i] * (hi - lo);
    }
    return total;
}

void validate(const VolModel& model) {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
    if (const auto* d = std::get_if<DeterministicVol>(&model)) {
        if (d->sigmas.empty() || d->sigmas.size() != d->breaks.size()) fail("volatility schedule is malformed");
        if (d->breaks.front() != 0.0) fail("volatility schedule must start at t = 0");
        if (!std::is_sorted(d->breaks.begin(), d->breaks.end())) fail("volatility breaks must be increasing");
        for (double s : d->sigmas)
            if (!(s >= 0.0) || !std::isfinite(s)) fail("volatility levels must be finite and >= 0");
        return;
    }
    const auto& r = std::get<RegimeSwitchingVol>(model);
    const auto n = static_cast<Eigen::Index>(r.sigmas.size());
    if (n == 0) fail("regime model needs at least one state");
    if (r.generator.rows() != n || r.generator.cols() != n) fail("generator must be square with one row per state");
    if (r.initial_state < 0 || r.initial_state >= n) fail("initial state out of range");
    for (double s : r.sigmas)
        if (!(s >= 0.0) || !std::isfinite(s)) fail("volatility levels must be finite and >= 0");
    for (Eigen::Index i = 0; i < n; ++i) {
        if (std::abs(r.generator.row(i).sum()) > 1e-10) fail("generator rows must sum to zero");
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && r.generator(i, j) < 0.0) fail("generator off-diagonal rates must be >= 0");
    }
}

std::vector<double> uniform_grid(double maturity, int steps) {
    if (!(maturity > 0.0) || steps < 1) throw Error(ErrorCode::InvalidArgument, "grid needs T > 0 and steps >= 1");
    std::vector<double> t(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) t[i] = maturity * i / steps;
    return t;
}

VolPath simulate_vol(const VolModel& model, const std::vector<double>& times, std::uint64_t seed,
                     std::uint64_t path) {
    const std::size_t steps = times.size() - 1;
    VolPath out;
    out.qv_steps.resize(steps);
    out.regime.resize(times.size());
    if (const auto* d = std::get_if<DeterministicVol>(&model)) {
        for (std::size_t i = 0; i < steps; ++i) out.qv_steps[i] = d->integrated_variance(times[i], times[i + 1]);
        for (std::size_t i = 0; i < times.size(); ++i) out.regime[i] = static_cast<int>(d->piece(times[i]));
        return out;
    }
    const auto& r = std::get<RegimeSwitchingVol>(model);
    RandomStream rng(seed, StreamRole::Vol, path);
    int state = r.initial_state;
    auto holding = [&](int st) {
        const double rate = -r.generator(st, st);
        return rate > 0.0 ? rng.exponential() / rate : kInf;
    };
    auto jump = [&](int st) {
        const double rate = -r.generator(st, st);
        const double u = rng.uniform() * rate;
        double acc = 0.0;
        int last = st;
        for (int j = 0; j < static_cast<int>(r.sigmas.size()); ++j) {
            if (j == st || r.generator(st, j) <= 0.0) continue;
            acc += r.generator(st, j);
            last = j;
            if (u < acc) return j;
        }
        return last;
    };
    double next_jump = times.front() + holding(state);
    out.regime[0] = state;
    for (std::size_t i = 0; i < steps; ++i) {
        double cur = times[i];
        double acc = 0.0;
        while (next_jump < times[i + 1]) {
            acc += r.sigmas[state] * r.sigmas[state] * (next_jump - cur);
            cur = next_jump;
            state = jump(state);
            next_jump = cur + holding(state);
        }
        acc += r.sigmas[state] * r.sigmas[state] * (times[i + 1] - cur);
        out.qv_steps[i] = acc;
        out.regime[i + 1] = state;
    }
    return out;
}

PathRecord simulate_x(const std::vector<double>& times, const VolPath& vol, double x0, std::uint64_t seed,
                      std::uint64_t path) {
    PathRecord rec;
    rec.times = times;
    rec.regime = vol.regime;
    rec.x.resize(times.size());
    rec.qv.resize(times.size());
    rec.x[0] = x0;
    rec.qv[0] = 0.0;
    RandomStream rng(seed, StreamRole::Price, path);
    for (std::size_t i = 0; i < vol.qv_steps.size(); ++i) {
        const double v = vol.qv_steps[i];
        rec.x[i + 1] = rec.x[i] - 0.5 * v + std::sqrt(v) * rng.normal();
        rec.qv[i + 1] = rec.qv[i] + v;
    }
    return rec;
}

std::optional<Hit> BarrierHits::first() const {
    if (lower && upper) return lower->time <= upper->time ? lower : upper;
    return lower ? lower : upper;
}

namespace {

std::optional<Hit> scan(const PathRecord& p, double H, bool is_lower, Monitoring mode, RandomStream& rng) {
    auto dist = [&](double x) { return is_lower ? x - H : H - x; };  // > 0 on the live side
    if (dist(p.x[0]) <= 0.0) return Hit{p.times[0], 0.0, p.x[0]};
    for (std::size_t i = 0; i + 1 < p.x.size(); ++i) {
        const double a = dist(p.x[i]);
        const double b = dist(p.x[i + 1]);
        const double v = p.qv[i + 1] - p.qv[i];
        double theta = -1.0;
        if (b <= 0.0) {
            theta = a / (a - b);
        } else if (mode == Monitoring::BridgeCorrected && v > 0.0) {
            const double crossing = std::exp(-2.0 * a * b / v);
            if (rng.uniform() < crossing) theta = a / (a + b);
        }
        if (theta >= 0.0) {
            return Hit{p.times[i] + theta * (p.times[i + 1] - p.times[i]), p.qv[i] + theta * v, H};
        }
    }
    return std::nullopt;
}

}  // namespace

BarrierHits detect_barrier(const PathRecord& path, const BarrierSpec& barriers, Monitoring mode, std::uint64_t seed,
                           std::uint64_t path_index) {
    BarrierHits hits;
    RandomStream rng(seed, StreamRole::Bridge, path_index);
    if (barriers.lower) hits.lower = scan(path, *barriers.lower, true, mode, rng);
    if (barriers.upper) hits.upper = scan(path, *barriers.upper, false, mode, rng);
    return hits;
}

namespace {

struct Moments {
    double n = 0.0;
    cplx mean = 0.0;
    double m2 = 0.0;  // sum of |x - mean|^2

    void add(cplx x) {
        n += 1.0;
        const cplx d = x - mean;
        mean += d / n;
        m2 += std::real(std::conj(d) * (x - mean));
    }
    void merge(const Moments& o) {
        if (o.n == 0.0) return;
        if (n == 0.0) {
            *this = o;
            return;
        }
        const double total = n + o.n;
        const cplx d = o.mean - mean;
        mean += d * (o.n / total);
        m2 += o.m2 + std::norm(d) * n * o.n / total;
        n = total;
    }
};

Moments reduce(std::span<const Moments> parts) {
    if (parts.size() == 1) return parts[0];
    const std::size_t half = parts.size() / 2;
    Moments left = reduce(parts.first(half));
    left.merge(reduce(parts.subspan(half)));
    return left;
}

constexpr std::size_t kBlock = 512;

}  // namespace

std::vector<McEstimate> mc_expectations(const SimulationSetup& setup, std::size_t slots, const PathFunctional& f) {
    validate(setup.model);
    if (setup.n_paths == 0) throw Error(ErrorCode::InvalidArgument, "need at least one path");
    if (setup.times.size() < 2) throw Error(ErrorCode::InvalidArgument, "time grid needs at least one step");
    const std::size_t blocks = (setup.n_paths + kBlock - 1) / kBlock;
    std::vector<Moments> acc(blocks * slots);
    parallel_for(blocks, [&](std::size_t b) {
        std::vector<cplx> values(slots);
        const std::size_t end = std::min(setup.n_paths, (b + 1) * kBlock);
        for (std::size_t path = b * kBlock; path < end; ++path) {
            const VolPath vol = simulate_vol(setup.model, setup.times, setup.seed, path);
            const PathRecord rec = simulate_x(setup.times, vol, setup.x0, setup.seed, path);
            const BarrierHits hits = detect_barrier(rec, setup.barriers, setup.monitoring, setup.seed, path);
            std::fill(values.begin(), values.end(), cplx(0.0));
            f(rec, hits, values);
            for (std::size_t s = 0; s < slots; ++s) acc[b * slots + s].add(values[s]);
        }
    });
    std::vector<McEstimate> out(slots);
    for (std::size_t s = 0; s < slots; ++s) {
        std::vector<Moments> column(blocks);
        for (std::size_t b = 0; b < blocks; ++b) column[b] = acc[b * slots + s];
        const Moments m = reduce(column);
        const double var = m.n > 1.0 ? m.m2 / (m.n - 1.0) : 0.0;
        out[s] = McEstimate{m.mean, std::sqrt(var / m.n), setup.n_paths, setup.seed};
    }
    return out;
}

cplx claim_payoff(const ClaimSpec& c, const PathRecord& path, const BarrierHits& hits) {
    const double xT = path.x.back();
    const double vT = path.qv.back();
    auto power_exp = [&](double x, double v) {
        return std::pow(x, c.j) * std::pow(v, c.k) * std::exp(I * c.p * x + I * c.s * v);
    };
    const auto hit = hits.first();
    switch (c.kind) {
        case ClaimKind::EuropeanStylePowerExp:
            return power_exp(xT, vT);
        case ClaimKind::SBKO:
        case ClaimKind::DBKO:
            return hit ? cplx(0.0) : power_exp(xT, vT);
        case ClaimKind::SBKI_PowerExp:
            return hit ? power_exp(xT - hit->x, vT - hit->qv) : cplx(0.0);
        case ClaimKind::SBKI_FracQV:
            return hit ? cplx(std::pow(std::max(0.0, vT - hit->qv), c.r)) : cplx(0.0);
        case ClaimKind::SBKI_Ratio: {
            if (!hit) return 0.0;
            const double dx = xT - hit->x;
            return dx * std::exp(I * c.p * dx) / std::pow(vT - hit->qv + c.eps, c.r);
        }
        case ClaimKind::Rebate:
            return hit ? std::pow(hit->qv, c.k) * std::exp(I * c.s * hit->qv) : cplx(0.0);
    }
    return 0.0;
}

McEstimate mc_price(const ClaimSpec& claim, const VolModel& model, std::size_t n_paths,
                    const std::vector<double>& times, std::uint64_t seed, Monitoring mode) {
    claim.validate();
    SimulationSetup setup{model, times, claim.barriers.x0, claim.barriers, mode, seed, n_paths};
    return mc_expectations(setup, 1, [&](const PathRecord& p, const BarrierHits& h, std::span<cplx> out) {
        out[0] = claim_payoff(claim, p, h);
    })[0];
}

std::vector<double> sample_total_qv(const VolModel& model, double maturity, std::size_t n, std::uint64_t seed) {
    validate(model);
    const std::vector<double> grid{0.0, maturity};
    std::vector<double> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = simulate_vol(model, grid, seed, i).qv_steps[0]; });
    return out;
}

double expected_total_qv(const VolModel& model, double maturity) {
    validate(model);
    if (const auto* d = std::get_if<DeterministicVol>(&model)) return d->integrated_variance(0.0, maturity);
    const auto& r = std::get<RegimeSwitchingVol>(model);
    const auto n = static_cast<Eigen::Index>(r.sigmas.size());
    // d/dt [P, m] = [P, m] [[G, sigma^2], [0, 0]]
    Eigen::MatrixXd aug = Eigen::MatrixXd::Zero(n + 1, n + 1);
    aug.topLeftCorner(n, n) = r.generator;
    for (Eigen::Index i = 0; i < n; ++i) aug(i, n) = r.sigmas[i] * r.sigmas[i];
    const Eigen::MatrixXd e = (aug * maturity).exp();
    return e(r.initial_state, n);
}

double first_passage_probability(double x0, double H, double v) {
    if (x0 == H) return 1.0;
    if (v <= 0.0) return 0.0;
    // distance to the barrier measured in the direction of travel
    const double b = std::abs(H - x0);
    const double mu = H < x0 ? 0.5 : -0.5;
    const double sd = std::sqrt(v);
    auto Phi = [](double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); };
    return Phi((-b + mu * v) / sd) + std::exp(2.0 * mu * b) * Phi((-b - mu * v) / sd);
}

void write_path_csv(std::ostream& out, const PathRecord& path) {
    out << "t,x,qv,regime\n";
    out.precision(17);
    for (std::size_t i = 0; i < path.times.size(); ++i)
        out << path.times[i] << ',' << path.x[i] << ',' << path.qv[i] << ',' << path.regime[i] << '\n';
}

}  // namespace barrier_repl

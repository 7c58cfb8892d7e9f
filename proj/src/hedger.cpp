#include "barrier_repl/hedger.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "barrier_repl/errors.hpp"
#include "barrier_repl/parallel.hpp"

namespace barrier_repl {

namespace {

constexpr cplx I{0.0, 1.0};

cplx minus_i_pow(int k) {
    static constexpr cplx table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return table[k % 4];
}

cplx scaled_partial(const Dual& d, int a, int b) { return minus_i_pow(a + b) * d.partial(a, b); }

double binom(int n, int k) { return (k == 0 || k == n) ? 1.0 : static_cast<double>(n); }  // n <= 2

}  // namespace

QEngine::QEngine(VolModel model, double maturity) : model_(std::move(model)), maturity_(maturity) {
    validate(model_);
    if (!(maturity > 0.0)) throw Error(ErrorCode::InvalidArgument, "maturity must be positive");
}

Dual QEngine::laplace(double t, int state, const Dual& kappa) const {
    const double tau = std::max(0.0, maturity_ - t);
    if (const auto* d = std::get_if<DeterministicVol>(&model_)) {
        const double rem = d->integrated_variance(t, maturity_);
        const cplx e = std::exp(kappa.value() * rem);
        return kappa.apply(e, rem * e, rem * rem * e);
    }
    const auto& r = std::get<RegimeSwitchingVol>(model_);
    const auto n = static_cast<Eigen::Index>(r.sigmas.size());
    Eigen::MatrixXcd loading = Eigen::MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) loading(i, i) = r.sigmas[i] * r.sigmas[i] * tau;
    const Eigen::MatrixXcd base = r.generator.cast<cplx>() * tau + kappa.value() * loading;
    // exp of the block-bidiagonal matrix carries the first two kappa-derivatives
    Eigen::MatrixXcd big = Eigen::MatrixXcd::Zero(3 * n, 3 * n);
    for (int b = 0; b < 3; ++b) big.block(b * n, b * n, n, n) = base;
    big.block(0, n, n, n) = loading;
    big.block(n, 2 * n, n, n) = loading;
    const Eigen::MatrixXcd e = big.exp();
    const Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n);
    const cplx f0 = (e.block(0, 0, n, n) * ones)(state);
    const cplx f1 = (e.block(0, n, n, n) * ones)(state);
    const cplx f2 = 2.0 * (e.block(0, 2 * n, n, n) * ones)(state);
    return kappa.apply(f0, f1, f2);
}

Dual QEngine::q_value(double t, double x, int state, const Dual& u) const {
    const Dual kappa = -0.5 * (u * u + I * u);
    return exp(I * u * x) * laplace(t, state, kappa);
}

HedgeOutcome simulate_hedge(const HedgeParams& prm, const QEngine& engine, const PathRecord& path,
                            std::size_t stride) {
    if (prm.n < 0 || prm.m < 0 || prm.n + prm.m > Dual::kMaxOrder)
        throw Error(ErrorCode::InvalidArgument, "hedge orders must satisfy n + m <= 2");
    if (stride == 0 || (path.times.size() - 1) % stride != 0)
        throw Error(ErrorCode::InvalidArgument, "rebalance stride must divide the path grid");
    const Dual omega = Dual::variable(prm.omega, 0);
    const Dual s = Dual::variable(prm.s, 1);
    const Dual u = root_u(omega, s, prm.branch);
    const Dual gap = I * (omega - u);

    auto numeraire = [&](std::size_t i) { return exp(gap * path.x[i] + I * s * path.qv[i]); };
    auto q_at = [&](std::size_t i) {
        return engine.q_value(path.times[i], path.x[i], path.regime[i], u);
    };

    // Q-claim (c, d) is held in C(n, n-c) C(m, m-d) N^{(n-c, m-d)} units.
    struct Holdings {
        cplx units[3][3]{};
        cplx shares = 0.0;
        cplx bonds = 0.0;
    };
    auto claim_value = [&](const Holdings& h, const Dual& q) {
        cplx v = 0.0;
        for (int c = 0; c <= prm.n; ++c)
            for (int d = 0; d <= prm.m; ++d) v += h.units[c][d] * scaled_partial(q, c, d);
        return v;
    };

    HedgeOutcome out;
    std::size_t i = 0;
    Dual q = q_at(0);
    Dual nq = numeraire(0) * q;
    cplx wealth = scaled_partial(nq, prm.n, prm.m);
    const std::size_t last = path.times.size() - 1;
    while (true) {
        const Dual N = numeraire(i);
        const double spot = std::exp(path.x[i]);
        Holdings h;
        for (int a = 0; a <= prm.n; ++a)
            for (int b = 0; b <= prm.m; ++b)
                h.units[prm.n - a][prm.m - b] = binom(prm.n, a) * binom(prm.m, b) * scaled_partial(N, a, b);
        const cplx notional = scaled_partial(gap * N * q, prm.n, prm.m);
        h.shares = notional / spot;
        h.bonds = wealth - claim_value(h, q) - h.shares * spot;
        out.share_notional.push_back(notional);
        if (i == last) break;

        const std::size_t next = i + stride;
        const Dual q_next = q_at(next);
        const double spot_next = std::exp(path.x[next]);
        const cplx new_wealth = claim_value(h, q_next) + h.shares * spot_next + h.bonds;
        const cplx gains = claim_value(h, q_next) - claim_value(h, q) + h.shares * (spot_next - spot);
        out.financing_residual = std::max(out.financing_residual, std::abs((new_wealth - wealth) - gains));
        wealth = new_wealth;
        q = q_next;
        i = next;
    }
    const double xT = path.x[last], vT = path.qv[last];
    out.terminal_portfolio = wealth;
    out.target = std::pow(xT, prm.n) * std::pow(vT, prm.m) * std::exp(I * prm.omega * xT + I * prm.s * vT);
    out.error = out.terminal_portfolio - out.target;
    return out;
}

HedgeReport hedge_report(const HedgeParams& params, const VolModel& model, double x0, double maturity,
                         int path_steps, const std::vector<int>& rebalance_counts, std::size_t n_paths,
                         std::uint64_t seed) {
    if (rebalance_counts.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one rebalance count");
    for (int c : rebalance_counts)
        if (c < 1 || path_steps % c != 0)
            throw Error(ErrorCode::InvalidArgument, "rebalance counts must divide the path step count");
    const QEngine engine(model, maturity);
    const auto times = uniform_grid(maturity, path_steps);
    const std::size_t levels = rebalance_counts.size();
    std::vector<double> sq(n_paths * levels), mx(n_paths * levels), drift(n_paths, 0.0);
    std::vector<double> lo(n_paths, HUGE_VAL), hi(n_paths, -HUGE_VAL);
    parallel_for(n_paths, [&](std::size_t p) {
        const VolPath vol = simulate_vol(model, times, seed, p);
        const PathRecord rec = simulate_x(times, vol, x0, seed, p);
        for (std::size_t l = 0; l < levels; ++l) {
            const auto stride = static_cast<std::size_t>(path_steps / rebalance_counts[l]);
            const HedgeOutcome o = simulate_hedge(params, engine, rec, stride);
            sq[p * levels + l] = std::norm(o.error);
            mx[p * levels + l] = std::abs(o.error);
            for (const cplx& v : o.share_notional) {
                drift[p] = std::max(drift[p], std::abs(v - o.share_notional.front()));
                lo[p] = std::min(lo[p], v.real());
                hi[p] = std::max(hi[p], v.real());
            }
        }
    });
    HedgeReport rep;
    rep.params = params;
    rep.n_paths = n_paths;
    std::vector<double> lx, ly;
    for (std::size_t l = 0; l < levels; ++l) {
        std::vector<double> column(n_paths);
        double worst = 0.0;
        for (std::size_t p = 0; p < n_paths; ++p) {
            column[p] = sq[p * levels + l];
            worst = std::max(worst, mx[p * levels + l]);
        }
        const double rms = std::sqrt(pairwise_sum(std::span<const double>(column)) / static_cast<double>(n_paths));
        rep.levels.push_back({rebalance_counts[l], rms, worst});
        if (rms > 0.0) {
            lx.push_back(std::log(maturity / rebalance_counts[l]));
            ly.push_back(std::log(rms));
        }
    }
    if (lx.size() >= 2) {
        double mxv = 0, myv = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) mxv += lx[i], myv += ly[i];
        mxv /= lx.size();
        myv /= ly.size();
        double sxy = 0, sxx = 0;
        for (std::size_t i = 0; i < lx.size(); ++i) {
            sxy += (lx[i] - mxv) * (ly[i] - myv);
            sxx += (lx[i] - mxv) * (lx[i] - mxv);
        }
        rep.slope = sxy / sxx;
    }
    for (double d : drift) rep.max_share_notional_drift = std::max(rep.max_share_notional_drift, d);
    if (n_paths > 0) {
        rep.min_share_notional = *std::min_element(lo.begin(), lo.end());
        rep.max_share_notional = *std::max_element(hi.begin(), hi.end());
    }
    return rep;
}

}  // namespace barrier_repl

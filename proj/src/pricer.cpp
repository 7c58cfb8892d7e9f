#include "barrier_repl/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <optional>
#include <span>
#include <sstream>

#include "barrier_repl/errors.hpp"
#include "barrier_repl/parallel.hpp"

namespace barrier_repl {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kPi = std::numbers::pi;
constexpr int kMaxDoublings = 8;
constexpr double kEdgeRatio = 1e-10;
constexpr double kKernelImagTarget = -0.25;
constexpr double kZeroClearance = 0.1;
constexpr double kMaxGrowth = 1.0;

cplx minus_i_pow(int k) {
    static constexpr cplx table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return table[k % 4];
}

void check_orders(int a, int b) {
    if (a < 0 || b < 0 || a + b > Dual::kMaxOrder)
        throw Error(ErrorCode::InvalidArgument, "derivative orders must be non-negative with total <= 2");
}

double magnitude(const Dual& d) {
    double m = 0.0;
    for (int j = 0; j <= 2; ++j)
        for (int k = 0; j + k <= 2; ++k) m = std::max(m, std::abs(d.partial(j, k)));
    return m;
}

}  // namespace

// ---------------------------------------------------------------- terminal law

TerminalLaw TerminalLaw::mixture(double x0, std::vector<MixtureComponent> components) {
    if (components.empty()) throw Error(ErrorCode::InvalidArgument, "mixture law needs at least one component");
    double total = 0.0;
    for (const auto& c : components) {
        if (!(c.qv >= 0.0) || !(c.weight >= 0.0))
            throw Error(ErrorCode::InvalidArgument, "mixture components need qv >= 0 and weight >= 0");
        total += c.weight;
    }
    if (std::abs(total - 1.0) > 1e-9) throw Error(ErrorCode::InvalidArgument, "mixture weights must sum to 1");
    for (auto& c : components) c.weight /= total;
    TerminalLaw law;
    law.x0_ = x0;
    law.components_ = std::move(components);
    return law;
}

TerminalLaw TerminalLaw::deterministic(double x0, double qv) { return mixture(x0, {{1.0, qv}}); }

TerminalLaw TerminalLaw::empirical(std::vector<double> x, std::vector<double> qv) {
    if (x.empty()) throw Error(ErrorCode::InvalidArgument, "empirical law needs samples");
    if (!qv.empty() && qv.size() != x.size())
        throw Error(ErrorCode::InvalidArgument, "empirical QV samples must match X samples");
    TerminalLaw law;
    law.x_ = std::move(x);
    law.qv_ = std::move(qv);
    return law;
}

Dual TerminalLaw::expect_exp(const Dual& u) const {
    if (is_mixture()) {
        // E e^{iuX} = e^{iu x0} sum_k w_k e^{kappa v_k}, kappa = -(u^2 + iu)/2
        const Dual kappa = -0.5 * (u * u + I * u);
        const cplx k0 = kappa.value();
        cplx f0 = 0.0, f1 = 0.0, f2 = 0.0;
        for (const auto& c : components_) {
            const cplx e = c.weight * std::exp(k0 * c.qv);
            f0 += e;
            f1 += c.qv * e;
            f2 += c.qv * c.qv * e;
        }
        return exp(I * u * x0_) * kappa.apply(f0, f1, f2);
    }
    const cplx u0 = u.value();
    cplx f0 = 0.0, f1 = 0.0, f2 = 0.0;
    for (double x : x_) {
        const cplx e = std::exp(I * u0 * x);
        f0 += e;
        f1 += I * x * e;
        f2 += -x * x * e;
    }
    const double n = static_cast<double>(x_.size());
    return u.apply(f0 / n, f1 / n, f2 / n);
}

double TerminalLaw::density(double x) const {
    double total = 0.0;
    for (const auto& c : components_) {
        if (c.qv <= 0.0) continue;
        const double z = (x - x0_ + 0.5 * c.qv);
        total += c.weight * std::exp(-z * z / (2.0 * c.qv)) / std::sqrt(2.0 * kPi * c.qv);
    }
    return total;
}

TerminalLaw mixture_from_qv_samples(double x0, std::vector<double> qv_samples, int bins) {
    if (qv_samples.empty()) throw Error(ErrorCode::InvalidArgument, "no QV samples");
    if (bins < 1) throw Error(ErrorCode::InvalidArgument, "bin count must be positive");
    std::sort(qv_samples.begin(), qv_samples.end());
    const std::size_t n = qv_samples.size();
    const std::size_t b = std::min<std::size_t>(static_cast<std::size_t>(bins), n);
    std::vector<MixtureComponent> comps;
    comps.reserve(b);
    for (std::size_t i = 0; i < b; ++i) {
        const std::size_t lo = i * n / b;
        const std::size_t hi = (i + 1) * n / b;
        const double sum = std::accumulate(qv_samples.begin() + lo, qv_samples.begin() + hi, 0.0);
        comps.push_back({static_cast<double>(hi - lo) / n, std::max(0.0, sum / (hi - lo))});
    }
    return TerminalLaw::mixture(x0, std::move(comps));
}

// ---------------------------------------------------------------- kernel

Dual heaviside_kernel(const Dual& omega, int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "smoothing n must be >= 1");
    const cplx z = omega.value();
    const double k = std::round(z.imag() / (2.0 * n));
    if (std::abs(z - cplx(0.0, 2.0 * n * k)) < 1e-10) {
        std::ostringstream msg;
        msg << "kernel evaluated at pole omega=" << z;
        throw Error(ErrorCode::KernelPole, msg.str());
    }
    const double a = kPi / (2.0 * n);
    const cplx c = -I / (4.0 * n);
    cplx w = a * z;
    const double flip = w.real() < 0.0 ? -1.0 : 1.0;
    w *= flip;
    const cplx e = std::exp(-w);
    const cplx e2 = e * e;
    const cplx csch = flip * 2.0 * e / (1.0 - e2);
    const cplx coth = flip * (1.0 + e2) / (1.0 - e2);
    return omega.apply(c * csch, -c * a * csch * coth, c * a * a * csch * (coth * coth + csch * csch));
}

cplx heaviside_kernel(cplx omega, int n) { return heaviside_kernel(Dual(omega), n).value(); }

// ---------------------------------------------------------------- contour machinery

namespace {

/// Kernel argument as an affine function slope * omega + shift of the node.
struct KernelArg {
    double slope;
    cplx shift;
};

using NodeWeight = std::function<void(cplx omega, std::span<Dual> out)>;

struct Term {
    std::string name;
    KernelArg arg;
    ContourSpec spec;
    double sign;
};

/// Growth of |e^{i omega (x - H)}| along the line is e^{-omega_i (x - H)}; `reach` holds the
/// extreme values of x - H that the line has to serve.
double resolve_omega_i(const Term& term, int n, cplx s, std::pair<double, double> reach) {
    const auto zeros = discriminant_zeros(s);
    auto clearance = [&](double wi) {
        return std::min(std::abs(wi - zeros[0].imag()), std::abs(wi - zeros[1].imag()));
    };
    auto kernel_imag = [&](double wi) { return term.arg.slope * wi + term.arg.shift.imag(); };
    auto growth = [&](double wi) { return std::max(-wi * reach.first, -wi * reach.second); };
    if (term.spec.omega_i) {
        const double wi = *term.spec.omega_i;
        const double t = kernel_imag(wi);
        if (!(t > -2.0 * n && t < 0.0)) {
            std::ostringstream msg;
            msg << term.name << " contour omega_i=" << wi << " puts the kernel argument at imaginary part " << t
                << ", outside (" << -2.0 * n << ", 0)";
            throw Error(ErrorCode::ContourViolation, msg.str());
        }
        for (const auto& z : zeros) {
            if (std::abs(wi - z.imag()) < 1e-8 && std::abs(z.real()) < 1e-8) {
                throw Error(ErrorCode::ContourViolation, term.name + " contour passes through a discriminant zero");
            }
        }
        return wi;
    }
    auto at = [&](double target) { return (target - term.arg.shift.imag()) / term.arg.slope; };
    std::optional<double> fallback;
    for (double target = kKernelImagTarget; target > -2.0 * n + 0.25; target += kKernelImagTarget) {
        const double wi = at(target);
        if (clearance(wi) < kZeroClearance) continue;
        if (growth(wi) <= kMaxGrowth) return wi;
        if (!fallback) fallback = wi;
    }
    // far barriers: creep toward the kernel pole until the growth is tame
    for (double target = 0.5 * kKernelImagTarget; target > -1e-6; target *= 0.5) {
        const double wi = at(target);
        if (clearance(wi) >= kZeroClearance && growth(wi) <= kMaxGrowth) return wi;
    }
    if (fallback) return *fallback;
    throw Error(ErrorCode::ContourViolation, term.name + ": no admissible contour clears the discriminant zeros");
}

std::vector<cplx> term_singularities(const Term& term, int n, cplx s) {
    std::vector<cplx> out;
    for (int k = -1; k <= 1; ++k) out.push_back((cplx(0.0, 2.0 * n * k) - term.arg.shift) / term.arg.slope);
    for (const cplx& z : discriminant_zeros(s)) out.push_back(z);
    return out;
}

struct PanelRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

PanelRule panel_rule(const ContourSpec& spec) {
    if (spec.nodes < 2) throw Error(ErrorCode::InvalidArgument, "contour needs at least 2 nodes per panel");
    if (spec.rule == ContourRule::GaussLegendrePanels) {
        if (spec.nodes != 32) throw Error(ErrorCode::InvalidArgument, "Gauss-Legendre panels use 32 nodes");
        const auto& g = gauss_legendre_32();
        return {g.nodes, g.weights};
    }
    PanelRule r;
    const int m = spec.nodes;
    for (int i = 0; i <= m; ++i) {
        r.nodes.push_back(-1.0 + 2.0 * i / m);
        r.weights.push_back((i == 0 || i == m) ? 1.0 / m : 2.0 / m);
    }
    return r;
}

struct LineResult {
    std::vector<Dual> values;
    ContourReport report;
};

/// Panel edges on [-W, W]. Width is capped by the kernel decay length and the phase
/// frequency, and shrinks geometrically towards nearby singularities so each 32-node
/// panel stays well inside its region of analyticity.
std::vector<double> panel_edges(double half_width, double max_width, double omega_i,
                                const std::vector<cplx>& singularities) {
    auto local_width = [&](double x) {
        double w = max_width;
        for (const cplx& z : singularities) {
            const double depth = std::abs(z.imag() - omega_i);
            w = std::min(w, 3.0 * depth + 0.5 * std::abs(x - z.real()));
        }
        return std::max(w, 1e-6);
    };
    std::vector<double> edges{-half_width};
    double x = -half_width;
    while (x < half_width) {
        x = std::min(half_width, x + local_width(x));
        edges.push_back(x);
    }
    return edges;
}

LineResult integrate_line(const NodeWeight& f, std::size_t nvals, double omega_i, const ContourSpec& spec,
                          double decay_length, double phase_bound, const std::vector<cplx>& singularities,
                          const std::string& name) {
    const double width = std::min(decay_length, 8.0 / std::max(phase_bound, 1e-12));
    double half_width = spec.half_width.value_or(40.0 * decay_length);
    if (!(half_width > 0.0)) throw Error(ErrorCode::InvalidArgument, "contour half width must be positive");
    const PanelRule rule = panel_rule(spec);

    for (int doubling = 0; doubling <= kMaxDoublings; ++doubling) {
        const std::vector<double> edges_x = panel_edges(half_width, width, omega_i, singularities);
        const std::size_t panels = edges_x.size() - 1;
        std::vector<Dual> sums(panels * nvals);
        std::vector<double> peak(panels, 0.0);
        std::vector<double> edge(panels, 0.0);
        parallel_for(panels, [&](std::size_t p) {
            const double a = edges_x[p];
            const double h = edges_x[p + 1] - a;
            std::vector<Dual> buf(nvals);
            std::span<Dual> acc(sums.data() + p * nvals, nvals);
            for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
                const double x = a + 0.5 * h * (rule.nodes[i] + 1.0);
                std::fill(buf.begin(), buf.end(), Dual());
                f(cplx(x, omega_i), buf);
                const double w = 0.5 * h * rule.weights[i];
                double mag = 0.0;
                for (std::size_t v = 0; v < nvals; ++v) {
                    acc[v] += buf[v] * w;
                    mag = std::max(mag, magnitude(buf[v]));
                }
                if (!std::isfinite(mag)) {
                    std::ostringstream msg;
                    msg << name << ": non-finite integrand at omega=" << cplx(x, omega_i);
                    throw Error(ErrorCode::NonfiniteTerm, msg.str());
                }
                peak[p] = std::max(peak[p], mag);
                if ((p == 0 && i == 0) || (p + 1 == panels && i + 1 == rule.nodes.size()))
                    edge[p] = std::max(edge[p], mag);
            }
        });
        const double peak_all = *std::max_element(peak.begin(), peak.end());
        const double edge_all = std::max(edge.front(), edge.back());
        if (edge_all <= kEdgeRatio * peak_all || peak_all == 0.0) {
            LineResult out;
            out.values.resize(nvals);
            for (std::size_t v = 0; v < nvals; ++v) {
                std::vector<Dual> column(panels);
                for (std::size_t p = 0; p < panels; ++p) column[p] = sums[p * nvals + v];
                out.values[v] = pairwise_sum(std::span<const Dual>(column));
            }
            out.report = ContourReport{name, omega_i, half_width, doubling, panels * rule.nodes.size()};
            return out;
        }
        half_width *= 2.0;
    }
    std::ostringstream msg;
    msg << name << ": integrand does not decay within half width " << half_width / 2.0;
    throw Error(ErrorCode::QuadratureFailure, msg.str());
}

/// Integrand of one contour term, stripped of the terminal-value factor.
/// Writes weight(omega) * e^{i(omega - u) x0} for each output slot and the root u.
using TermIntegrand = std::function<Dual(cplx omega, const Dual& p, const Dual& s, std::span<Dual> weights)>;

struct Problem {
    std::vector<Term> terms;
    std::vector<TermIntegrand> integrands;
    std::size_t weight_slots = 1;
    double phase_bound = 1.0;
    std::optional<double> anchor;  // barrier whose phase e^{-i omega H} the integrand carries
    cplx p0 = 0.0;
    cplx s0 = 0.0;
    int dj = 0;  // derivative order in p
    int dk = 0;  // derivative order in s
};

/// Price: per node sum over weight slots of weight * e^{i(omega-u)x0} * E e^{iuX_T}.
std::pair<std::vector<cplx>, std::vector<ContourReport>> run_price(const Problem& prob, const TerminalLaw& law,
                                                                   double x0, int n) {
    std::vector<cplx> totals(prob.weight_slots, 0.0);
    std::vector<ContourReport> reports;
    const Dual p = Dual::variable(prob.p0, 0);
    const Dual s = Dual::variable(prob.s0, 1);
    for (std::size_t t = 0; t < prob.terms.size(); ++t) {
        const Term& term = prob.terms[t];
        const double d = prob.anchor ? x0 - *prob.anchor : 0.0;
        const double wi = resolve_omega_i(term, n, prob.s0, {d, d});
        const auto& integrand = prob.integrands[t];
        NodeWeight f = [&](cplx omega, std::span<Dual> out) {
            std::vector<Dual> w(prob.weight_slots);
            const Dual u = integrand(omega, p, s, w);
            const Dual common = exp(I * (Dual(omega) - u) * x0) * law.expect_exp(u);
            for (std::size_t v = 0; v < w.size(); ++v) out[v] = w[v] * common;
        };
        LineResult r = integrate_line(f, prob.weight_slots, wi, term.spec, 2.0 * n / kPi, prob.phase_bound,
                                      term_singularities(term, n, prob.s0), term.name);
        for (std::size_t v = 0; v < prob.weight_slots; ++v)
            totals[v] += term.sign * minus_i_pow(prob.dj + prob.dk) * r.values[v].partial(prob.dj, prob.dk);
        reports.push_back(r.report);
    }
    return {totals, reports};
}

std::vector<cplx> run_curve(const Problem& prob, const std::vector<double>& xs, double x0, int n) {
    std::vector<cplx> out(xs.size(), 0.0);
    const Dual p = Dual::variable(prob.p0, 0);
    const Dual s = Dual::variable(prob.s0, 1);
    double spread = 0.0;
    std::pair<double, double> reach{0.0, 0.0};
    if (prob.anchor && !xs.empty()) {
        const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
        reach = {std::min(*lo, x0) - *prob.anchor, std::max(*hi, x0) - *prob.anchor};
    }
    for (double x : xs) spread = std::max(spread, std::abs(x - x0));
    for (std::size_t t = 0; t < prob.terms.size(); ++t) {
        const Term& term = prob.terms[t];
        const double wi = resolve_omega_i(term, n, prob.s0, reach);
        const auto& integrand = prob.integrands[t];
        NodeWeight f = [&](cplx omega, std::span<Dual> slots) {
            std::vector<Dual> w(prob.weight_slots);
            const Dual u = integrand(omega, p, s, w);
            const Dual base = w[0] * exp(I * (Dual(omega) - u) * x0);
            for (std::size_t i = 0; i < xs.size(); ++i) slots[i] = base * exp(I * u * xs[i]);
        };
        LineResult r =
            integrate_line(f, xs.size(), wi, term.spec, 2.0 * n / kPi, prob.phase_bound + spread,
                           term_singularities(term, n, prob.s0), term.name);
        for (std::size_t i = 0; i < xs.size(); ++i)
            out[i] += term.sign * minus_i_pow(prob.dj + prob.dk) * r.values[i].partial(prob.dj, prob.dk);
    }
    return out;
}

Problem sbko_problem(double x0, const SbkoClaim& c, const PricingOptions& o) {
    check_orders(c.j, c.k);
    Problem prob;
    prob.p0 = c.p;
    prob.s0 = c.s;
    prob.dj = c.j;
    prob.dk = c.k;
    prob.phase_bound = std::abs(x0 - c.barrier) + 1.0;
    prob.anchor = c.barrier;
    const double H = c.barrier;
    const int n = o.n;
    const Branch br = o.branch;
    const bool lower = c.side == Side::Lower;
    // lower: kernels H(omega - p), H(-i - p - omega); upper: H(p - omega), H(omega + i + p)
    const KernelArg g_arg = lower ? KernelArg{1.0, -c.p} : KernelArg{-1.0, c.p};
    const KernelArg h_arg = lower ? KernelArg{-1.0, -I - c.p} : KernelArg{1.0, I + c.p};
    prob.terms = {{"g", g_arg, o.contour_g, 1.0}, {"h", h_arg, o.contour_h, -1.0}};
    auto make = [=](bool is_g) -> TermIntegrand {
        return [=](cplx omega, const Dual& p, const Dual& s, std::span<Dual> w) {
            const Dual om(omega);
            Dual karg;
            if (lower) karg = is_g ? om - p : Dual(-I) - p - om;
            else karg = is_g ? p - om : om + I + p;
            w[0] = heaviside_kernel(karg, n) * exp(-I * (om - p) * H);
            return root_u(om, s, br);
        };
    };
    prob.integrands = {make(true), make(false)};
    return prob;
}

Problem dbko_problem(double x0, const DbkoClaim& c, const PricingOptions& o) {
    check_orders(c.j, c.k);
    if (!(c.lower < c.upper)) throw Error(ErrorCode::InvalidArgument, "double barrier needs lower < upper");
    if (c.q < 0) throw Error(ErrorCode::InvalidArgument, "image truncation q must be >= 0");
    Problem prob;
    prob.p0 = c.p;
    prob.s0 = c.s;
    prob.dj = c.j;
    prob.dk = c.k;
    prob.weight_slots = 2;
    const double L = c.lower, U = c.upper, width = U - L;
    const int q = c.q, m = o.n;
    const Branch br = o.branch;
    prob.phase_bound = (2.0 * q + 1.0) * width + std::abs(x0 - L) + 1.0;
    prob.terms = {{"g", {1.0, -c.p}, o.contour_g, 1.0}, {"h", {-1.0, -I - c.p}, o.contour_h, -1.0}};
    TermIntegrand g = [=](cplx omega, const Dual& p, const Dual& s, std::span<Dual> w) {
        const Dual om(omega);
        const Dual kern = heaviside_kernel(om - p, m);
        const Dual gates = exp(-I * (om - p) * L) - exp(-I * (om - p) * U);
        for (int k = -q; k <= q; ++k) {
            const Dual term = std::exp(-k * width) * std::exp(I * omega * (2.0 * k * width)) * gates * kern;
            w[0] += term;
            if (std::abs(k) == q) w[1] += term;
        }
        return root_u(om, s, br);
    };
    TermIntegrand h = [=](cplx omega, const Dual& p, const Dual& s, std::span<Dual> w) {
        const Dual om(omega);
        const Dual kern = heaviside_kernel(Dual(-I) - p - om, m);
        const cplx a = 1.0 - I * omega;
        for (int k = -q; k <= q; ++k) {
            const double shift = 2.0 * k * width;
            const Dual first = exp(a * (shift + L) - L + I * p * L);
            const Dual second = exp(a * (shift + 2.0 * L - U) - L + I * p * U);
            const Dual term = std::exp(-k * width) * (first - second) * kern;
            w[0] += term;
            if (std::abs(k) == q) w[1] += term;
        }
        return root_u(om, s, br);
    };
    prob.integrands = {g, h};
    return prob;
}

Problem rebate_problem(double x0, const RebateClaim& c, const PricingOptions& o) {
    check_orders(0, c.k);
    Problem prob;
    prob.s0 = c.s;
    prob.dk = c.k;
    prob.phase_bound = std::abs(x0 - c.barrier) + 1.0;
    prob.anchor = c.barrier;
    const double H = c.barrier;
    const int n = o.n;
    const Branch br = o.branch;
    const bool lower = c.side == Side::Lower;
    const cplx v0 = root_v(c.s, br).value;
    // lower: kernels H(v - omega), H(-i - v - omega); upper: H(omega - v), H(omega + i + v)
    const KernelArg g_arg = lower ? KernelArg{-1.0, v0} : KernelArg{1.0, -v0};
    const KernelArg h_arg = lower ? KernelArg{-1.0, -I - v0} : KernelArg{1.0, I + v0};
    prob.terms = {{"g", g_arg, o.contour_g, 1.0}, {"h", h_arg, o.contour_h, 1.0}};
    auto make = [=](bool is_g) -> TermIntegrand {
        return [=](cplx omega, const Dual&, const Dual& s, std::span<Dual> w) {
            const Dual om(omega);
            const Dual v = root_v(s, br);
            Dual karg;
            if (lower) karg = is_g ? v - om : Dual(-I) - v - om;
            else karg = is_g ? om - v : om + I + v;
            w[0] = heaviside_kernel(karg, n) * std::exp(-I * omega * H);
            return root_u(om, s, br);
        };
    };
    prob.integrands = {make(true), make(false)};
    return prob;
}

PriceResult finish(std::pair<std::vector<cplx>, std::vector<ContourReport>> r, int n) {
    PriceResult out;
    out.price = r.first[0];
    if (r.first.size() > 1) out.truncation = std::abs(r.first[1]);
    out.smoothing_n = n;
    out.contours = std::move(r.second);
    return out;
}

void check_n(int n) {
    if (n < 1) throw Error(ErrorCode::InvalidArgument, "smoothing n must be >= 1");
}

}  // namespace

PriceResult price_sbko_powerexp(const TerminalLaw& law, double x0, const SbkoClaim& claim,
                                const PricingOptions& opts) {
    check_n(opts.n);
    BarrierSpec{claim.side == Side::Lower ? std::optional(claim.barrier) : std::nullopt,
                claim.side == Side::Upper ? std::optional(claim.barrier) : std::nullopt, x0}
        .validate();
    return finish(run_price(sbko_problem(x0, claim, opts), law, x0, opts.n), opts.n);
}

PriceResult price_dbko_powerexp(const TerminalLaw& law, double x0, const DbkoClaim& claim,
                                const PricingOptions& opts) {
    check_n(opts.n);
    BarrierSpec{claim.lower, claim.upper, x0}.validate();
    return finish(run_price(dbko_problem(x0, claim, opts), law, x0, opts.n), opts.n);
}

PriceResult price_rebate_powerexp(const TerminalLaw& law, double x0, const RebateClaim& claim,
                                  const PricingOptions& opts) {
    check_n(opts.n);
    return finish(run_price(rebate_problem(x0, claim, opts), law, x0, opts.n), opts.n);
}

std::vector<cplx> curve_sbko(double x0, const SbkoClaim& claim, const std::vector<double>& xs,
                             const PricingOptions& opts) {
    check_n(opts.n);
    return run_curve(sbko_problem(x0, claim, opts), xs, x0, opts.n);
}

std::vector<cplx> curve_dbko(double x0, const DbkoClaim& claim, const std::vector<double>& xs,
                             const PricingOptions& opts) {
    check_n(opts.n);
    return run_curve(dbko_problem(x0, claim, opts), xs, x0, opts.n);
}

std::vector<cplx> curve_rebate(double x0, const RebateClaim& claim, const std::vector<double>& xs,
                               const PricingOptions& opts) {
    check_n(opts.n);
    return run_curve(rebate_problem(x0, claim, opts), xs, x0, opts.n);
}

cplx price_european_style(const TerminalLaw& law, double x0, const std::function<cplx(cplx)>& f_hat,
                          const ContourSpec& contour, int m, cplx s, Branch branch, double phase_bound) {
    check_orders(0, m);
    if (!contour.omega_i) throw Error(ErrorCode::InvalidArgument, "European pricing needs an explicit contour");
    const Dual sd = Dual::variable(s, 1);
    NodeWeight f = [&](cplx omega, std::span<Dual> out) {
        const Dual u = root_u(Dual(omega), sd, branch);
        out[0] = f_hat(omega) * exp(I * (Dual(omega) - u) * x0) * law.expect_exp(u);
    };
    const auto zeros = discriminant_zeros(s);
    LineResult r = integrate_line(f, 1, *contour.omega_i, contour, 1.0, phase_bound, {zeros[0], zeros[1]},
                                  "european");
    return minus_i_pow(m) * r.values[0].partial(0, m);
}

cplx price_payoff_under_law(const PayoffFn& payoff, const TerminalLaw& law, const QuadratureSpec& quad) {
    if (!law.is_mixture()) {
        const auto& xs = law.samples();
        const auto& qs = law.sample_qv();
        if (payoff.depends_on_qv && qs.empty())
            throw Error(ErrorCode::InvalidArgument, "payoff depends on QV but the sample carries none");
        std::vector<cplx> vals(xs.size());
        parallel_for(xs.size(), [&](std::size_t i) { vals[i] = payoff(xs[i], qs.empty() ? 0.0 : qs[i]); });
        return pairwise_sum(std::span<const cplx>(vals)) / static_cast<double>(xs.size());
    }
    const double x0 = law.x0();
    const auto& comps = law.components();
    constexpr double kSpan = 12.0;
    auto clip = [&](double& lo, double& hi) {
        if (payoff.support) {
            lo = std::max(lo, payoff.support->first);
            hi = std::min(hi, payoff.support->second);
        }
    };
    cplx atoms = 0.0;
    for (const auto& c : comps)
        if (c.qv <= 0.0) atoms += c.weight * payoff(x0, 0.0);

    if (!payoff.depends_on_qv) {
        double lo = x0, hi = x0;
        bool any = false;
        for (const auto& c : comps) {
            if (c.qv <= 0.0) continue;
            any = true;
            const double m = x0 - 0.5 * c.qv, sd = std::sqrt(c.qv);
            lo = std::min(lo, m - kSpan * sd);
            hi = std::max(hi, m + kSpan * sd);
        }
        if (!any) return atoms;
        clip(lo, hi);
        if (!(lo < hi)) return atoms;
        return atoms + integrate_adaptive([&](double x) { return payoff(x, 0.0) * law.density(x); }, lo, hi, quad,
                                          payoff.breakpoints);
    }
    std::vector<cplx> parts(comps.size(), 0.0);
    parallel_for(comps.size(), [&](std::size_t i) {
        const auto& c = comps[i];
        if (c.qv <= 0.0) return;
        const double m = x0 - 0.5 * c.qv, sd = std::sqrt(c.qv);
        double lo = m - kSpan * sd, hi = m + kSpan * sd;
        clip(lo, hi);
        if (!(lo < hi)) return;
        auto dens = [&](double x) {
            const double z = (x - m) / sd;
            return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * kPi));
        };
        parts[i] = c.weight * integrate_adaptive([&](double x) { return payoff(x, c.qv) * dens(x); }, lo, hi, quad,
                                                 payoff.breakpoints);
    });
    return atoms + pairwise_sum(std::span<const cplx>(parts));
}

}  // namespace barrier_repl

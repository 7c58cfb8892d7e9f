#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "barrier_repl/charfun.hpp"
#include "barrier_repl/payoffs.hpp"
#include "barrier_repl/quadrature.hpp"

namespace barrier_repl {

struct MixtureComponent {
    double weight;
    double qv;
};

/// Law of X_T: a mixture of conditional Gaussians indexed by total QV, or an
/// empirical sample of (X_T, QV_T).
class TerminalLaw {
public:
    static TerminalLaw mixture(double x0, std::vector<MixtureComponent> components);
    static TerminalLaw deterministic(double x0, double qv);
    static TerminalLaw empirical(std::vector<double> x, std::vector<double> qv = {});

    bool is_mixture() const { return !components_.empty(); }
    double x0() const { return x0_; }
    const std::vector<MixtureComponent>& components() const { return components_; }
    const std::vector<double>& samples() const { return x_; }
    const std::vector<double>& sample_qv() const { return qv_; }

    /// E exp(i u X_T) with u carrying partials.
    Dual expect_exp(const Dual& u) const;
    /// Density of X_T (mixture only).
    double density(double x) const;

private:
    double x0_ = 0.0;
    std::vector<MixtureComponent> components_;
    std::vector<double> x_;
    std::vector<double> qv_;
};

/// Collapses QV samples into equal-count quantile bins carrying the bin mean.
TerminalLaw mixture_from_qv_samples(double x0, std::vector<double> qv_samples, int bins = 512);

enum class ContourRule { GaussLegendrePanels, Trapezoid };

/// Horizontal contour Im(omega) = omega_i, truncated to |Re omega| <= half_width.
/// Unset fields are chosen automatically.
struct ContourSpec {
    std::optional<double> omega_i;
    std::optional<double> half_width;
    int nodes = 32;
    ContourRule rule = ContourRule::GaussLegendrePanels;
};

struct ContourReport {
    std::string term;
    double omega_i;
    double half_width;
    int doublings;
    std::size_t nodes;
};

struct PriceResult {
    cplx price;
    int smoothing_n = 0;
    std::vector<ContourReport> contours;
    /// Magnitude of the outermost image terms (double barrier only).
    double truncation = 0.0;
};

/// Fourier transform of the smoothed Heaviside 1/2 (1 + tanh(n x)).
cplx heaviside_kernel(cplx omega, int n);
Dual heaviside_kernel(const Dual& omega, int n);

struct SbkoClaim {
    Side side = Side::Lower;
    double barrier;  // log level
    int j = 0;
    int k = 0;
    cplx p = 0.0;
    cplx s = 0.0;
};

struct DbkoClaim {
    double lower;
    double upper;
    int j = 0;
    int k = 0;
    cplx p = 0.0;
    cplx s = 0.0;
    int q = 5;
};

struct RebateClaim {
    Side side = Side::Lower;
    double barrier;
    int k = 0;
    cplx s = 0.0;
};

struct PricingOptions {
    int n = 25;
    ContourSpec contour_g;
    ContourSpec contour_h;
    Branch branch = Branch::Plus;
};

PriceResult price_sbko_powerexp(const TerminalLaw& law, double x0, const SbkoClaim& claim,
                                const PricingOptions& opts = {});
PriceResult price_dbko_powerexp(const TerminalLaw& law, double x0, const DbkoClaim& claim,
                                const PricingOptions& opts = {});
PriceResult price_rebate_powerexp(const TerminalLaw& law, double x0, const RebateClaim& claim,
                                  const PricingOptions& opts = {});

/// Payoff curves x -> g_n(x) -h_n(x) (knock-out) or g_n(x) + h_n(x) (rebate), same
/// derivative orders as the price.
std::vector<cplx> curve_sbko(double x0, const SbkoClaim& claim, const std::vector<double>& xs,
                             const PricingOptions& opts = {});
std::vector<cplx> curve_dbko(double x0, const DbkoClaim& claim, const std::vector<double>& xs,
                             const PricingOptions& opts = {});
std::vector<cplx> curve_rebate(double x0, const RebateClaim& claim, const std::vector<double>& xs,
                               const PricingOptions& opts = {});

/// E f(X_T) QV_T^m exp(i s QV_T) with f(x) = int f_hat(omega) exp(i omega x) d omega_r along
/// the contour Im omega = contour.omega_i (required).
cplx price_european_style(const TerminalLaw& law, double x0,
                          const std::function<cplx(cplx)>& f_hat, const ContourSpec& contour,
                          int m, cplx s, Branch branch = Branch::Plus, double phase_bound = 1.0);

/// E payoff(X_T, QV_T) under the law by direct quadrature or sample mean.
cplx price_payoff_under_law(const PayoffFn& payoff, const TerminalLaw& law,
                            const QuadratureSpec& quad = {1e-10, 1e-13, 20000});

}  // namespace barrier_repl

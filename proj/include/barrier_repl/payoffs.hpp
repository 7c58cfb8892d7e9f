#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "barrier_repl/charfun.hpp"
#include "barrier_repl/quadrature.hpp"

namespace barrier_repl {

enum class Side { Lower, Upper };

/// Terminal payoff of (log price, quadratic variation).
struct PayoffFn {
    std::function<cplx(double x, double qv)> eval;
    /// x locations of jumps or kinks; quadrature splits there.
    std::vector<double> breakpoints;
    /// Payoff vanishes outside this x interval when set.
    std::optional<std::pair<double, double>> support;
    bool depends_on_qv = true;
    std::string description;

    cplx operator()(double x, double qv) const { return eval(x, qv); }
};

struct BarrierSpec {
    std::optional<double> lower;
    std::optional<double> upper;
    double x0 = 0.0;

    /// Throws InvalidArgument unless lower < x0 < upper for the barriers present.
    void validate() const;
};

/// x^j qv^k exp(i p x + i s qv)
PayoffFn power_exp_payoff(int j, int k, cplx p, cplx s);

PayoffFn constant_payoff(cplx value);

/// Reflected payoff replicating a lower knock-out at L.
PayoffFn sbko_image(const PayoffFn& phi, double L);

/// Reflected payoff replicating an upper knock-out at U.
PayoffFn sbko_image_upper(const PayoffFn& phi, double U);

/// Truncated image series (|n| <= q) replicating a double knock-out on (L, U).
PayoffFn dbko_image(const PayoffFn& phi, double L, double U, int q);

/// Magnitude of the image-series term with index n at (x, qv).
double dbko_term_magnitude(const PayoffFn& phi, double L, double U, int n, double x, double qv);

/// Knock-in payoff psi at barrier H.
cplx ski_psi(double x, double H, cplx omega, cplx s, Side side, Branch branch = Branch::Plus);

/// (-i d/domega)^n (-i d/ds)^m psi, n + m <= 2.
cplx ski_psi_derivs(int n, int m, double x, double H, cplx omega, cplx s, Side side,
                    Branch branch = Branch::Plus);

/// European payoff replicating 1{tau_H <= T} (X_T - X_tau)^n (QV_T - QV_tau)^m e^{...}.
PayoffFn ski_payoff(int n, int m, double H, cplx omega, cplx s, Side side,
                    Branch branch = Branch::Plus);

/// exp(i v(s) (x - H) + i s qv)
cplx rebate_psi(double x, double qv, double H, cplx s, Branch branch = Branch::Plus);

/// European payoff replicating the rebate 1{tau_H <= T} exp(i s QV_tau).
PayoffFn rebate_image(double H, cplx s, Side side, Branch branch = Branch::Plus);

/// Payoff replicating the knock-in claim 1{tau_L <= T} (QV_T - QV_tau)^r, 0 < r < 1.
double frac_ki_payoff(double x, double L, double r, const QuadratureSpec& quad = {});

/// Payoff replicating 1{tau_L <= T} (X_T - X_tau) e^{ip(X_T - X_tau)} / (QV_T - QV_tau + eps)^r.
cplx ratio_ki_payoff(double x, double L, double r, double eps, cplx p,
                     const QuadratureSpec& quad = {});

/// Integrand of the fractional payoff in its original variable z.
double frac_ki_integrand(double z, double x, double L, double r);

/// Integrand of the ratio payoff in its original variable z.
cplx ratio_ki_integrand(double z, double x, double L, double r, double eps, cplx p);

PayoffFn frac_ki_payoff_fn(double L, double r, const QuadratureSpec& quad = {});
PayoffFn ratio_ki_payoff_fn(double L, double r, double eps, cplx p, const QuadratureSpec& quad = {});

}  // namespace barrier_repl

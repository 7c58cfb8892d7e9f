#pragma once

#include "barrier_repl/dual.hpp"

namespace barrier_repl {

enum class Branch { Plus, Minus };

/// Root u(omega, s) of the characteristic exponent with its partials up to order 2.
struct CharRoot {
    cplx omega;
    cplx s;
    Branch branch;
    cplx value;
    cplx d_omega;
    cplx d_s;
    cplx d_omega2;
    cplx d_omega_s;
    cplx d_s2;
};

/// Rebate root v(s) with its first two s-derivatives.
struct RebateRoot {
    cplx s;
    Branch branch;
    cplx value;
    cplx d_s;
    cplx d_s2;
};

/// 1/4 - omega^2 - i omega + 2 i s
cplx discriminant(cplx omega, cplx s);

/// The two omega values at which the discriminant vanishes for a given s.
std::array<cplx, 2> discriminant_zeros(cplx s);

CharRoot root_u(cplx omega, cplx s, Branch branch = Branch::Plus);

/// Dual-valued root: omega and s may carry partials in any two variables.
Dual root_u(const Dual& omega, const Dual& s, Branch branch = Branch::Plus);

RebateRoot root_v(cplx s, Branch branch = Branch::Plus);
Dual root_v(const Dual& s, Branch branch = Branch::Plus);

/// exp(i s v - (omega^2 + i omega) v / 2)
cplx conditional_charfun(cplx omega, cplx s, double v);
Dual conditional_charfun(const Dual& omega, const Dual& s, double v);

struct IdentityRhs {
    cplx prefactor;
    cplx inner_freq;
};

/// Splits E exp(i omega X_T + i s QV_T) into prefactor * E exp(i u X_T).
IdentityRhs charfun_identity_rhs(cplx omega, cplx s, double x0, double qv0,
                                 Branch branch = Branch::Plus);

}  // namespace barrier_repl

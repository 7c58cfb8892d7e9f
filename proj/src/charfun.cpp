#include "barrier_repl/charfun.hpp"

#include <cmath>
#include <sstream>

#include "barrier_repl/errors.hpp"

namespace barrier_repl {

namespace {

constexpr cplx I{0.0, 1.0};
constexpr double kDegenerateTol = 1e-14;

double sign_of(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }

void check_discriminant(cplx omega, cplx s, cplx disc) {
    const double scale = 0.25 + std::norm(omega) + std::abs(omega) + 2.0 * std::abs(s);
    if (std::abs(disc) <= kDegenerateTol * std::max(1.0, scale)) {
        std::ostringstream msg;
        msg << "discriminant vanishes at omega=" << omega << " s=" << s;
        throw Error(ErrorCode::DegenerateDiscriminant, msg.str());
    }
}

void check_rebate_branch_point(cplx s) {
    if (std::abs(s + I / 8.0) <= kDegenerateTol * std::max(1.0, std::abs(s))) {
        throw Error(ErrorCode::BranchPoint, "s = -i/8 is the branch point of v(s)");
    }
}

}  // namespace

cplx discriminant(cplx omega, cplx s) { return 0.25 - omega * omega - I * omega + 2.0 * I * s; }

std::array<cplx, 2> discriminant_zeros(cplx s) {
    // omega^2 + i omega - 1/4 - 2is = 0  =>  omega = -i/2 +- sqrt(2is)
    const cplx r = std::sqrt(2.0 * I * s);
    return {-0.5 * I + r, -0.5 * I - r};
}

CharRoot root_u(cplx omega, cplx s, Branch branch) {
    const Dual u = root_u(Dual::variable(omega, 0), Dual::variable(s, 1), branch);
    return CharRoot{omega,          s,
                    branch,         u.value(),
                    u.partial(1, 0), u.partial(0, 1),
                    u.partial(2, 0), u.partial(1, 1),
                    u.partial(0, 2)};
}

Dual root_u(const Dual& omega, const Dual& s, Branch branch) {
    const Dual disc = Dual(0.25) - omega * omega - I * omega + 2.0 * I * s;
    check_discriminant(omega.value(), s.value(), disc.value());
    return I * (Dual(-0.5) + sign_of(branch) * sqrt(disc));
}

RebateRoot root_v(cplx s, Branch branch) {
    const Dual v = root_v(Dual::variable(s, 0), branch);
    return RebateRoot{s, branch, v.value(), v.partial(1, 0), v.partial(2, 0)};
}

Dual root_v(const Dual& s, Branch branch) {
    check_rebate_branch_point(s.value());
    return I * (Dual(-0.5) + sign_of(branch) * sqrt(Dual(0.25) - 2.0 * I * s));
}

cplx conditional_charfun(cplx omega, cplx s, double v) {
    return std::exp((I * s - 0.5 * (omega * omega + I * omega)) * v);
}

Dual conditional_charfun(const Dual& omega, const Dual& s, double v) {
    return exp((I * s - 0.5 * (omega * omega + I * omega)) * v);
}

IdentityRhs charfun_identity_rhs(cplx omega, cplx s, double x0, double qv0, Branch branch) {
    const cplx u = root_u(omega, s, branch).value;
    return IdentityRhs{std::exp(I * (omega - u) * x0 + I * s * qv0), u};
}

}  // namespace barrier_repl

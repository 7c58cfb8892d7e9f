#pragma once

#include <string>

#include "barrier_repl/payoffs.hpp"

namespace barrier_repl {

enum class ClaimKind {
    EuropeanStylePowerExp,
    SBKO,
    DBKO,
    SBKI_PowerExp,
    SBKI_FracQV,
    SBKI_Ratio,
    Rebate,
};

std::string to_string(ClaimKind kind);
ClaimKind claim_kind_from_string(const std::string& name);

/// Claim description shared by the pricer routes, the simulator and the CLI.
/// Single-barrier kinds use whichever barrier is set. Orders (j, k) multiply by
/// X^j QV^k; for knock-in kinds they apply to the post-passage increments and
/// `p` plays the role of omega.
struct ClaimSpec {
    ClaimKind kind = ClaimKind::EuropeanStylePowerExp;
    BarrierSpec barriers;
    int j = 0;
    int k = 0;
    cplx p = 0.0;
    cplx s = 0.0;
    double r = 0.5;
    double eps = 1e-3;
    int q = 5;

    Side side() const;
    double barrier() const;

    /// Throws InvalidArgument when the kind-specific constraints fail.
    void validate() const;
};

}  // namespace barrier_repl

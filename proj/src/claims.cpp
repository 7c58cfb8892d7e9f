#include "barrier_repl/claims.hpp"

#include <array>
#include <utility>

#include "barrier_repl/errors.hpp"

namespace barrier_repl {

namespace {

constexpr std::array<std::pair<ClaimKind, const char*>, 7> kNames{{
    {ClaimKind::EuropeanStylePowerExp, "european"},
    {ClaimKind::SBKO, "sbko"},
    {ClaimKind::DBKO, "dbko"},
    {ClaimKind::SBKI_PowerExp, "sbki"},
    {ClaimKind::SBKI_FracQV, "sbki_frac"},
    {ClaimKind::SBKI_Ratio, "sbki_ratio"},
    {ClaimKind::Rebate, "rebate"},
}};

bool is_single_barrier(ClaimKind k) {
    return k == ClaimKind::SBKO || k == ClaimKind::SBKI_PowerExp || k == ClaimKind::SBKI_FracQV ||
           k == ClaimKind::SBKI_Ratio || k == ClaimKind::Rebate;
}

}  // namespace

std::string to_string(ClaimKind kind) {
    for (const auto& [k, name] : kNames)
        if (k == kind) return name;
    return "unknown";
}

ClaimKind claim_kind_from_string(const std::string& name) {
    for (const auto& [k, n] : kNames)
        if (name == n) return k;
    throw Error(ErrorCode::ConfigError, "unknown claim kind '" + name + "'");
}

Side ClaimSpec::side() const { return barriers.lower ? Side::Lower : Side::Upper; }

double ClaimSpec::barrier() const {
    if (barriers.lower) return *barriers.lower;
    if (barriers.upper) return *barriers.upper;
    throw Error(ErrorCode::InvalidArgument, "claim has no barrier");
}

void ClaimSpec::validate() const {
    auto fail = [](const std::string& m) { throw Error(ErrorCode::InvalidArgument, m); };
    barriers.validate();
    if (j < 0 || k < 0 || j + k > 2) fail("orders must be non-negative with total at most 2");
    if (is_single_barrier(kind) && (barriers.lower.has_value() == barriers.upper.has_value()))
        fail(to_string(kind) + " needs exactly one barrier");
    if (kind == ClaimKind::DBKO && !(barriers.lower && barriers.upper)) fail("dbko needs both barriers");
    if (kind == ClaimKind::DBKO && q < 0) fail("image truncation q must be >= 0");
    if (kind == ClaimKind::SBKI_FracQV && !(r > 0.0 && r < 1.0)) fail("sbki_frac needs 0 < r < 1");
    if (kind == ClaimKind::SBKI_Ratio && !(r > 0.0 && eps > 0.0)) fail("sbki_ratio needs r > 0 and eps > 0");
    if ((kind == ClaimKind::SBKI_FracQV || kind == ClaimKind::SBKI_Ratio) && !barriers.lower)
        fail(to_string(kind) + " is defined for a lower barrier");
    if (kind == ClaimKind::Rebate && std::abs(s + cplx(0.0, 0.125)) < 1e-14)
        throw Error(ErrorCode::BranchPoint, "rebate needs s != -i/8");
    if (kind == ClaimKind::Rebate && j != 0) fail("rebate claims take only the QV order k");
}

}  // namespace barrier_repl

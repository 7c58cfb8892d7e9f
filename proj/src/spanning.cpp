#include "barrier_repl/spanning.hpp"

#include <algorithm>
#include <cmath>

#include "barrier_repl/errors.hpp"

namespace barrier_repl {

double SpanningPortfolio::payoff(double spot) const {
    double v = bond_weight + forward_weight * (spot - kappa);
    for (const auto& p : puts) v += p.weight * std::max(p.strike - spot, 0.0);
    for (const auto& c : calls) v += c.weight * std::max(spot - c.strike, 0.0);
    return v;
}

void SpanningPortfolio::write_csv(std::ostream& out) const {
    auto clean = [](double w) { return w == 0.0 ? 0.0 : w; };
    out.precision(17);
    out << "instrument_type,strike,weight\n";
    out << "bond,0," << clean(bond_weight) << '\n';
    out << "forward," << kappa << ',' << clean(forward_weight) << '\n';
    for (const auto& p : puts) out << "put," << p.strike << ',' << p.weight << '\n';
    for (const auto& c : calls) out << "call," << c.strike << ',' << c.weight << '\n';
}

namespace {

std::size_t prepare_grid(std::vector<double>& k, double kappa) {
    if (!(kappa > 0.0)) throw Error(ErrorCode::InvalidGrid, "expansion point must be positive");
    if (k.size() < 2) throw Error(ErrorCode::InvalidGrid, "strike grid needs at least two strikes");
    for (std::size_t i = 0; i < k.size(); ++i) {
        if (!(k[i] > 0.0)) throw Error(ErrorCode::InvalidGrid, "strikes must be positive");
        if (i > 0 && !(k[i] > k[i - 1])) throw Error(ErrorCode::InvalidGrid, "strikes must be strictly increasing");
    }
    if (!(kappa > k.front() && kappa < k.back()))
        throw Error(ErrorCode::InvalidGrid, "expansion point must lie inside the strike grid");
    const auto pos = static_cast<std::size_t>(std::lower_bound(k.begin(), k.end(), kappa) - k.begin());
    if (k[pos] != kappa) k.insert(k.begin() + static_cast<std::ptrdiff_t>(pos), kappa);
    return pos;
}

void place(SpanningPortfolio& p, double strike, double weight, std::size_t i, std::size_t centre) {
    if (weight == 0.0) return;
    if (i < centre) p.puts.push_back({strike, weight});
    else p.calls.push_back({strike, weight});
}

}  // namespace

SpanningPortfolio span_payoff(const std::function<double(double)>& f, double kappa, std::vector<double> k) {
    const std::size_t c = prepare_grid(k, kappa);
    std::vector<double> slope(k.size() - 1);
    for (std::size_t i = 0; i + 1 < k.size(); ++i) slope[i] = (f(k[i + 1]) - f(k[i])) / (k[i + 1] - k[i]);
    SpanningPortfolio p;
    p.kappa = kappa;
    p.bond_weight = f(kappa);
    // central slope at kappa; the kink there is split evenly between put and call
    p.forward_weight = 0.5 * (slope[c - 1] + slope[c]);
    for (std::size_t i = 1; i + 1 < k.size(); ++i) {
        const double jump = slope[i] - slope[i - 1];
        if (i == c) {
            place(p, k[i], 0.5 * jump, i - 1, c);
            place(p, k[i], 0.5 * jump, i, c);
        } else {
            place(p, k[i], jump, i, c);
        }
    }
    return p;
}

SpanningPortfolio span_payoff_ad(const std::function<Dual(const Dual&)>& f, double kappa, std::vector<double> k) {
    const std::size_t c = prepare_grid(k, kappa);
    auto derivs = [&](double x) { return f(Dual::variable(x, 0)); };
    const Dual at_kappa = derivs(kappa);
    SpanningPortfolio p;
    p.kappa = kappa;
    p.bond_weight = at_kappa.value().real();
    p.forward_weight = at_kappa.partial(1, 0).real();
    const std::size_t last = k.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        const double lo = i == 0 ? k[0] : 0.5 * (k[i - 1] + k[i]);
        const double hi = i == last ? k[last] : 0.5 * (k[i] + k[i + 1]);
        const double h = 1e-9 * k[i];
        const double left = derivs(k[i] - h).partial(1, 0).real();
        const double right = derivs(k[i] + h).partial(1, 0).real();
        const double jump = right - left;
        const bool kink = std::abs(jump) > 1e-6 * std::max(1.0, std::max(std::abs(left), std::abs(right)));
        double w = kink ? jump : derivs(k[i]).partial(2, 0).real() * (hi - lo);
        if (i == c) {
            if (kink) {
                // the forward already carries the right derivative at kappa
                p.forward_weight = left;
                place(p, k[i], jump, i, c);
            } else {
                place(p, k[i], 0.5 * w, i - 1, c);
                place(p, k[i], 0.5 * w, i, c);
            }
        } else {
            place(p, k[i], w, i, c);
        }
    }
    return p;
}

}  // namespace barrier_repl

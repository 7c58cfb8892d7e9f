#include "barrier_repl/payoffs.hpp"

#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <cmath>
#include <limits>
#include <sstream>

#include "barrier_repl/errors.hpp"

namespace barrier_repl {

namespace {

constexpr cplx I{0.0, 1.0};

cplx minus_i_pow(int k) {
    static constexpr cplx table[4] = {{1, 0}, {0, -1}, {-1, 0}, {0, 1}};
    return table[k % 4];
}

std::vector<double> reflect_points(const std::vector<double>& pts, double H) {
    std::vector<double> out{H};
    for (double b : pts) {
        out.push_back(b);
        out.push_back(2.0 * H - b);
    }
    return out;
}

}  // namespace

void BarrierSpec::validate() const {
    if (lower && !(*lower < x0))
        throw Error(ErrorCode::InvalidArgument, "lower barrier must lie below the initial log price");
    if (upper && !(*upper > x0))
        throw Error(ErrorCode::InvalidArgument, "upper barrier must lie above the initial log price");
}

PayoffFn power_exp_payoff(int j, int k, cplx p, cplx s) {
    PayoffFn f;
    f.eval = [=](double x, double qv) {
        return std::pow(x, j) * std::pow(qv, k) * std::exp(I * p * x + I * s * qv);
    };
    f.depends_on_qv = k != 0 || s != 0.0;
    std::ostringstream d;
    d << "x^" << j << " qv^" << k << " exp(i" << p << " x + i" << s << " qv)";
    f.description = d.str();
    return f;
}

PayoffFn constant_payoff(cplx value) {
    PayoffFn f;
    f.eval = [=](double, double) { return value; };
    f.depends_on_qv = false;
    f.description = "constant";
    return f;
}

PayoffFn sbko_image(const PayoffFn& phi, double L) {
    PayoffFn f;
    f.eval = [phi, L](double x, double qv) -> cplx {
        if (x > L) return phi(x, qv);
        if (x < L) return -std::exp(x - L) * phi(2.0 * L - x, qv);
        return 0.0;
    };
    f.breakpoints = reflect_points(phi.breakpoints, L);
    f.depends_on_qv = phi.depends_on_qv;
    f.description = "lower knock-out image of " + phi.description;
    return f;
}

PayoffFn sbko_image_upper(const PayoffFn& phi, double U) {
    PayoffFn f;
    f.eval = [phi, U](double x, double qv) -> cplx {
        if (x < U) return phi(x, qv);
        if (x > U) return -std::exp(x - U) * phi(2.0 * U - x, qv);
        return 0.0;
    };
    f.breakpoints = reflect_points(phi.breakpoints, U);
    f.depends_on_qv = phi.depends_on_qv;
    f.description = "upper knock-out image of " + phi.description;
    return f;
}

namespace {

cplx dbko_term(const PayoffFn& phi, double L, double U, int n, double x, double qv) {
    const double width = U - L;
    auto star = [&](double y) -> cplx { return (y > L && y < U) ? phi(y, qv) : cplx(0.0); };
    const double shift = 2.0 * n * width;
    return std::exp(-n * width) * (star(shift + x) - std::exp(x - L) * star(shift + 2.0 * L - x));
}

}  // namespace

PayoffFn dbko_image(const PayoffFn& phi, double L, double U, int q) {
    if (!(L < U)) throw Error(ErrorCode::InvalidArgument, "double barrier needs L < U");
    if (q < 0) throw Error(ErrorCode::InvalidArgument, "image truncation q must be >= 0");
    PayoffFn f;
    f.eval = [phi, L, U, q](double x, double qv) {
        cplx total = 0.0;
        for (int n = -q; n <= q; ++n) {
            const cplx t = dbko_term(phi, L, U, n, x, qv);
            if (!std::isfinite(t.real()) || !std::isfinite(t.imag())) {
                std::ostringstream msg;
                msg << "image term n=" << n << " at x=" << x << " is not finite";
                throw Error(ErrorCode::NonfiniteTerm, msg.str());
            }
            total += t;
        }
        return total;
    };
    const double width = U - L;
    for (int k = -q - 1; k <= q + 1; ++k) {
        f.breakpoints.push_back(L + 2.0 * k * width);
        f.breakpoints.push_back(U + 2.0 * k * width);
    }
    f.depends_on_qv = phi.depends_on_qv;
    f.description = "double knock-out image of " + phi.description;
    return f;
}

double dbko_term_magnitude(const PayoffFn& phi, double L, double U, int n, double x, double qv) {
    return std::abs(dbko_term(phi, L, U, n, x, qv));
}

namespace {

Dual ski_psi_dual(double x, double H, const Dual& omega, const Dual& s, Side side, Branch branch) {
    const Dual u = root_u(omega, s, branch);
    const double y = x - H;
    Dual out;
    const bool strict = side == Side::Lower ? x < H : x > H;
    const bool weak = side == Side::Lower ? x <= H : x >= H;
    if (strict) out += exp((Dual(1.0) - I * u) * y);
    if (weak) out += exp(I * u * y);
    return out;
}

}  // namespace

cplx ski_psi(double x, double H, cplx omega, cplx s, Side side, Branch branch) {
    return ski_psi_dual(x, H, Dual(omega), Dual(s), side, branch).value();
}

cplx ski_psi_derivs(int n, int m, double x, double H, cplx omega, cplx s, Side side, Branch branch) {
    if (n < 0 || m < 0 || n + m > Dual::kMaxOrder)
        throw Error(ErrorCode::InvalidArgument, "derivative orders must satisfy n + m <= 2");
    const Dual psi = ski_psi_dual(x, H, Dual::variable(omega, 0), Dual::variable(s, 1), side, branch);
    return minus_i_pow(n + m) * psi.partial(n, m);
}

PayoffFn ski_payoff(int n, int m, double H, cplx omega, cplx s, Side side, Branch branch) {
    PayoffFn f;
    f.eval = [=](double x, double) { return ski_psi_derivs(n, m, x, H, omega, s, side, branch); };
    f.breakpoints = {H};
    constexpr double inf = std::numeric_limits<double>::infinity();
    f.support = side == Side::Lower ? std::pair{-inf, H} : std::pair{H, inf};
    f.depends_on_qv = false;
    f.description = "knock-in psi";
    return f;
}

cplx rebate_psi(double x, double qv, double H, cplx s, Branch branch) {
    const cplx v = root_v(s, branch).value;
    return std::exp(I * v * (x - H) + I * s * qv);
}

PayoffFn rebate_image(double H, cplx s, Side side, Branch branch) {
    const cplx v = root_v(s, branch).value;
    PayoffFn f;
    f.eval = [=](double x, double qv) -> cplx {
        const bool active = side == Side::Lower ? x < H : x > H;
        if (!active) return 0.0;
        const double y = x - H;
        return (std::exp(I * v * y) + std::exp((1.0 - I * v) * y)) * std::exp(I * s * qv);
    };
    f.breakpoints = {H};
    f.depends_on_qv = s != 0.0;
    f.description = "rebate image";
    return f;
}

// Fractional payoff. Below the barrier psi(x;0,iz) = 2 e^{y/2} cosh(c y), c = sqrt(1/4 - 2z),
// and psi(x;0,0) = e^y + 1.

double frac_ki_integrand(double z, double x, double L, double r) {
    const double y = x - L;
    if (y >= 0.0) return 0.0;
    const cplx c = std::sqrt(cplx(0.25 - 2.0 * z));
    // cosh(y/2) - cosh(cy) as a product to avoid cancellation at small z
    const cplx diff = 2.0 * std::sinh((0.5 * y + c * y) / 2.0) * std::sinh(y * z / (0.5 + c));
    return (2.0 * std::exp(0.5 * y) * diff).real() * std::pow(z, -r - 1.0);
}

double frac_ki_payoff(double x, double L, double r, const QuadratureSpec& quad) {
    if (!(r > 0.0 && r < 1.0)) throw Error(ErrorCode::InvalidArgument, "fractional order must lie in (0, 1)");
    const double y = x - L;
    if (y >= 0.0) return 0.0;
    constexpr double z_split = 0.125;

    // finite part, z = t^{1/(1-r)}
    const double t_max = std::pow(z_split, 1.0 - r);
    const double head = integrate_adaptive_real(
        [&](double t) {
            const double z = std::pow(t, 1.0 / (1.0 - r));
            return frac_ki_integrand(z, x, L, r) * std::pow(t, r / (1.0 - r)) / (1.0 - r);
        },
        0.0, t_max, quad);

    // tail: constant part in closed form, cosine part in theta = |y| sqrt(2z - 1/4)
    const double A = std::exp(y) + 1.0;
    const double constant = A * std::pow(z_split, -r) / r;
    const double y2 = y * y;
    thread_local boost::math::quadrature::ooura_fourier_cos<double> cos_integrator(1e-10);
    auto amplitude = [&](double theta) {
        const double z = 0.5 * (theta * theta / y2 + 0.25);
        return std::pow(z, -r - 1.0) * theta / y2;
    };
    const double oscillatory = cos_integrator.integrate(amplitude, 1.0).first;
    const double tail = constant - 2.0 * std::exp(0.5 * y) * oscillatory;
    return r / std::tgamma(1.0 - r) * (head + tail);
}

cplx ratio_ki_integrand(double z, double x, double L, double r, double eps, cplx p) {
    const double y = x - L;
    if (y >= 0.0) return 0.0;
    const double w = std::pow(z, 1.0 / r);
    const cplx c = std::sqrt(0.25 - p * p - I * p - 2.0 * w);
    const cplx cy = c * y;
    // sinh(cy)/c, regular at c = 0
    const cplx sinhc = std::abs(cy) < 1e-5 ? y * (1.0 + cy * cy / 6.0) : std::sinh(cy) / c;
    return -(1.0 - 2.0 * I * p) * y * std::exp(0.5 * y) * sinhc * std::exp(-w * eps);
}

cplx ratio_ki_payoff(double x, double L, double r, double eps, cplx p, const QuadratureSpec& quad) {
    if (!(r > 0.0)) throw Error(ErrorCode::InvalidArgument, "ratio power r must be positive");
    if (!(eps > 0.0)) throw Error(ErrorCode::InvalidArgument, "ratio regulariser eps must be positive");
    if (x >= L) return 0.0;
    const double z_max = std::pow(40.0 / eps, r);
    std::vector<double> splits;
    const cplx w_star = (0.25 - p * p - I * p) / 2.0;
    if (std::abs(w_star.imag()) < 1e-14 && w_star.real() > 0.0) splits.push_back(std::pow(w_star.real(), r));
    const cplx integral = integrate_adaptive(
        [&](double z) { return ratio_ki_integrand(z, x, L, r, eps, p); }, 0.0, z_max, quad, splits);
    return integral / (r * std::tgamma(r));
}

PayoffFn frac_ki_payoff_fn(double L, double r, const QuadratureSpec& quad) {
    PayoffFn f;
    f.eval = [=](double x, double) { return cplx(frac_ki_payoff(x, L, r, quad)); };
    f.breakpoints = {L};
    f.support = std::pair{-std::numeric_limits<double>::infinity(), L};
    f.depends_on_qv = false;
    f.description = "knock-in fractional QV payoff";
    return f;
}

PayoffFn ratio_ki_payoff_fn(double L, double r, double eps, cplx p, const QuadratureSpec& quad) {
    PayoffFn f;
    f.eval = [=](double x, double) { return ratio_ki_payoff(x, L, r, eps, p, quad); };
    f.breakpoints = {L};
    f.support = std::pair{-std::numeric_limits<double>::infinity(), L};
    f.depends_on_qv = false;
    f.description = "knock-in ratio payoff";
    return f;
}

}  // namespace barrier_repl

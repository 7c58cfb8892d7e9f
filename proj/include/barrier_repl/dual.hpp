#pragma once

#include <array>
#include <complex>
#include <cstddef>

namespace barrier_repl {

using cplx = std::complex<double>;

/**
 * Forward-mode dual number in two complex variables, truncated at total
 * derivative order 2.
 *
 * Stores the value and the partials d^{j+k}/da^j db^k for j + k <= 2. The
 * two variables are abstract: the pricer uses (p, s), the hedger (omega, s).
 * Arithmetic propagates partials exactly (Leibniz and Faa di Bruno rules), so
 * results are exact to rounding.
 */
class Dual {
public:
    static constexpr int kMaxOrder = 2;

    Dual() = default;
    explicit Dual(cplx value) { d_[0] = value; }
    explicit Dual(double value) { d_[0] = value; }

    static Dual constant(cplx value) { return Dual(value); }

    /// Independent variable number `index` (0 or 1) at `value`.
    static Dual variable(cplx value, int index) {
        Dual d(value);
        d.d_[index == 0 ? kA : kB] = 1.0;
        return d;
    }

    /// Partial derivative of order (j, k); zero beyond total order 2.
    cplx partial(int j, int k) const {
        if (j < 0 || k < 0 || j + k > kMaxOrder) return 0.0;
        return d_[slot(j, k)];
    }
    void set_partial(int j, int k, cplx v) { d_[slot(j, k)] = v; }

    cplx value() const { return d_[0]; }

    /// Applies a scalar function given f(a0), f'(a0), f''(a0).
    Dual apply(cplx f0, cplx f1, cplx f2) const {
        Dual r;
        r.d_[0] = f0;
        r.d_[kA] = f1 * d_[kA];
        r.d_[kB] = f1 * d_[kB];
        r.d_[kAA] = f2 * d_[kA] * d_[kA] + f1 * d_[kAA];
        r.d_[kAB] = f2 * d_[kA] * d_[kB] + f1 * d_[kAB];
        r.d_[kBB] = f2 * d_[kB] * d_[kB] + f1 * d_[kBB];
        return r;
    }

    Dual& operator+=(const Dual& o) {
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
        return *this;
    }
    Dual& operator-=(const Dual& o) {
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
        return *this;
    }
    Dual& operator*=(const Dual& o) {
        *this = *this * o;
        return *this;
    }
    Dual& operator*=(cplx c) {
        for (auto& x : d_) x *= c;
        return *this;
    }

    friend Dual operator+(Dual a, const Dual& b) { return a += b; }
    friend Dual operator-(Dual a, const Dual& b) { return a -= b; }
    friend Dual operator-(const Dual& a) {
        Dual r;
        for (std::size_t i = 0; i < r.d_.size(); ++i) r.d_[i] = -a.d_[i];
        return r;
    }
    friend Dual operator*(const Dual& a, const Dual& b) {
        Dual r;
        const auto& x = a.d_;
        const auto& y = b.d_;
        r.d_[0] = x[0] * y[0];
        r.d_[kA] = x[kA] * y[0] + x[0] * y[kA];
        r.d_[kB] = x[kB] * y[0] + x[0] * y[kB];
        r.d_[kAA] = x[kAA] * y[0] + 2.0 * x[kA] * y[kA] + x[0] * y[kAA];
        r.d_[kAB] = x[kAB] * y[0] + x[kA] * y[kB] + x[kB] * y[kA] + x[0] * y[kAB];
        r.d_[kBB] = x[kBB] * y[0] + 2.0 * x[kB] * y[kB] + x[0] * y[kBB];
        return r;
    }
    friend Dual operator+(Dual a, cplx c) {
        a.d_[0] += c;
        return a;
    }
    friend Dual operator+(cplx c, Dual a) { return a + c; }
    friend Dual operator-(Dual a, cplx c) { return a + (-c); }
    friend Dual operator-(cplx c, const Dual& a) { return -a + c; }
    friend Dual operator*(Dual a, cplx c) { return a *= c; }
    friend Dual operator*(cplx c, Dual a) { return a *= c; }
    friend Dual operator*(Dual a, double c) { return a *= cplx(c); }
    friend Dual operator*(double c, Dual a) { return a *= cplx(c); }
    friend Dual operator/(const Dual& a, const Dual& b) { return a * reciprocal(b); }
    friend Dual operator/(Dual a, cplx c) { return a *= (1.0 / c); }
    friend Dual operator/(Dual a, double c) { return a *= cplx(1.0 / c); }

    friend Dual reciprocal(const Dual& a) {
        const cplx inv = 1.0 / a.d_[0];
        return a.apply(inv, -inv * inv, 2.0 * inv * inv * inv);
    }

private:
    // slot layout: value, a, b, aa, ab, bb
    static constexpr std::size_t kA = 1, kB = 2, kAA = 3, kAB = 4, kBB = 5;
    static constexpr std::size_t slot(int j, int k) {
        if (j == 0 && k == 0) return 0;
        if (j == 1 && k == 0) return kA;
        if (j == 0 && k == 1) return kB;
        if (j == 2) return kAA;
        if (j == 1) return kAB;
        return kBB;
    }

    std::array<cplx, 6> d_{};
};

inline Dual exp(const Dual& a) {
    const cplx e = std::exp(a.value());
    return a.apply(e, e, e);
}

/// Principal square root (cut on the negative real axis).
inline Dual sqrt(const Dual& a) {
    const cplx r = std::sqrt(a.value());
    return a.apply(r, 0.5 / r, -0.25 / (r * a.value()));
}

inline Dual sinh(const Dual& a) {
    const cplx sh = std::sinh(a.value());
    const cplx ch = std::cosh(a.value());
    return a.apply(sh, ch, sh);
}

inline Dual cosh(const Dual& a) {
    const cplx sh = std::sinh(a.value());
    const cplx ch = std::cosh(a.value());
    return a.apply(ch, sh, ch);
}

inline Dual log(const Dual& a) {
    const cplx inv = 1.0 / a.value();
    return a.apply(std::log(a.value()), inv, -inv * inv);
}

/// Integer power, n >= 0.
inline Dual pow(const Dual& a, int n) {
    if (n == 0) return Dual(1.0);
    const cplx x = a.value();
    const cplx f0 = std::pow(x, n);
    const cplx f1 = double(n) * std::pow(x, n - 1);
    const cplx f2 = n >= 2 ? double(n) * double(n - 1) * std::pow(x, n - 2) : cplx(0.0);
    return a.apply(f0, f1, f2);
}

}  // namespace barrier_repl

#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace barrier_repl {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter generate(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kW0;
                key[1] += kW1;
            }
            const std::uint64_t p0 = std::uint64_t{kM0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kM1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kM0 = 0xD2511F53u;
    static constexpr std::uint32_t kM1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kW0 = 0x9E3779B9u;
    static constexpr std::uint32_t kW1 = 0xBB67AE85u;
};

/// Stream roles keep volatility, price and bridge randomness disjoint.
enum class StreamRole : std::uint32_t { Vol = 1, Price = 2, Bridge = 3, Aux = 4 };

/// Random stream keyed by (seed, role, path). Draw k uses counter (k, role, path_lo, path_hi),
/// so any path can be regenerated in isolation.
class RandomStream {
public:
    RandomStream(std::uint64_t seed, StreamRole role, std::uint64_t path)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          role_(static_cast<std::uint32_t>(role)),
          path_lo_(static_cast<std::uint32_t>(path)),
          path_hi_(static_cast<std::uint32_t>(path >> 32)) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        if (used_ == 2) {
            buffer_ = Philox4x32::generate({draw_++, role_, path_lo_, path_hi_}, key_);
            used_ = 0;
        }
        const std::uint64_t hi = buffer_[2 * used_];
        const std::uint64_t lo = buffer_[2 * used_ + 1];
        ++used_;
        const std::uint64_t bits = ((hi << 32) | lo) >> 11;  // 53 bits
        return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double radius = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    /// Exponential with unit rate.
    double exponential() { return -std::log(uniform()); }

private:
    Philox4x32::Key key_;
    std::uint32_t role_;
    std::uint32_t path_lo_;
    std::uint32_t path_hi_;
    std::uint32_t draw_ = 0;
    Philox4x32::Counter buffer_{};
    int used_ = 2;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace barrier_repl

#pragma once

#include <array>
#include <cmath>
#include <cstdint>

namespace atomslit {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Stateless
// apart from a 128-bit counter, so independent streams are cheap: we key each
// Monte Carlo trajectory by (seed, stream index) and let the low counter word
// run over draws. Identical (seed, stream) always yields the identical
// sequence, no matter how trajectories are scheduled across workers.
class Philox4x32 {
  public:
    using Block = std::array<std::uint32_t, 4>;

    static Block block(const std::array<std::uint32_t, 4>& counter,
                       const std::array<std::uint32_t, 2>& key) {
        Block ctr = counter;
        std::array<std::uint32_t, 2> k = key;
        round(ctr, k);
        for (int r = 1; r < 10; ++r) {
            k[0] += 0x9E3779B9u;
            k[1] += 0xBB67AE85u;
            round(ctr, k);
        }
        return ctr;
    }

  private:
    static void round(Block& ctr, const std::array<std::uint32_t, 2>& key) {
        const std::uint64_t p0 = 0xD2511F53ull * ctr[0];
        const std::uint64_t p1 = 0xCD9E8D57ull * ctr[2];
        const auto hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const auto lo0 = static_cast<std::uint32_t>(p0);
        const auto hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const auto lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
};

// One independent random stream, keyed by (seed, stream). Each Philox block
// yields 128 bits; we hand them out as two uint64 draws per block.
class RandomStream {
  public:
    RandomStream(std::uint64_t seed, std::uint64_t stream)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(stream) {}

    std::uint64_t next_u64() {
        if (phase_ == 0) {
            const std::array<std::uint32_t, 4> ctr = {
                static_cast<std::uint32_t>(draw_),
                static_cast<std::uint32_t>(draw_ >> 32),
                static_cast<std::uint32_t>(stream_),
                static_cast<std::uint32_t>(stream_ >> 32)};
            block_ = Philox4x32::block(ctr, key_);
            ++draw_;
            phase_ = 1;
            return (static_cast<std::uint64_t>(block_[0]) << 32) | block_[1];
        }
        phase_ = 0;
        return (static_cast<std::uint64_t>(block_[2]) << 32) | block_[3];
    }

    // Uniform on (0,1); never returns 0 or 1, so log() is safe.
    double uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Standard normal via Box-Muller; the second value of each pair is cached.
    double normal() {
        if (have_cached_) {
            have_cached_ = false;
            return cached_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * pi_ * u2;
        cached_ = r * std::sin(a);
        have_cached_ = true;
        return r * std::cos(a);
    }

    double exponential(double mean) { return -mean * std::log(uniform()); }

    // Exact Poisson via Knuth's product method, chunked so it stays exact for
    // large means (Poisson(a+b) = Poisson(a) + Poisson(b)).
    std::uint64_t poisson(double mean) {
        std::uint64_t total = 0;
        while (mean > 20.0) {
            total += poisson_knuth(20.0);
            mean -= 20.0;
        }
        return total + poisson_knuth(mean);
    }

    // Derive a fresh 64-bit seed for a sub-computation, e.g. one evolution
    // step of a time-binned run.
    static std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag) {
        RandomStream s(seed, 0xA70C9B28ull ^ tag);
        return s.next_u64();
    }

  private:
    std::uint64_t poisson_knuth(double mean) {
        if (mean <= 0.0) return 0;
        const double limit = std::exp(-mean);
        std::uint64_t k = 0;
        double prod = uniform();
        while (prod > limit) {
            ++k;
            prod *= uniform();
        }
        return k;
    }

    static constexpr double pi_ = 3.14159265358979323846;

    std::array<std::uint32_t, 2> key_;
    std::uint64_t stream_;
    std::uint64_t draw_ = 0;
    Philox4x32::Block block_{};
    int phase_ = 0;
    bool have_cached_ = false;
    double cached_ = 0.0;
};

}  // namespace atomslit

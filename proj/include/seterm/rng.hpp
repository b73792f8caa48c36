#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace seterm {

// Counter-based generator: output k of a stream is a strong 64-bit mix of
// (seed + k * golden gamma). Streams derived from distinct (replicate,
// purpose) pairs are independent for all practical purposes and bitwise
// reproducible on every platform, so replicates can run on any thread.
namespace detail {

constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

constexpr std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace detail

class RngStream {
  public:
    explicit RngStream(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ += detail::kGamma;
        return detail::mix64(state_);
    }

    // Uniform on [0,1) with 53 random mantissa bits.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Box-Muller; one fresh pair per call keeps the stream stateless enough
    // to reason about (no cached spare).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925286766559 * u2);
    }

    int rademacher() { return (next_u64() >> 63) ? 1 : -1; }

    bool bernoulli(double p) { return uniform() < p; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // 64-bit multiply-shift; modulo bias is ~n/2^64, irrelevant here.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    std::uint64_t state_;
};

struct SeedPolicy {
    std::uint64_t master_seed = 0;

    // Deterministic child seed for (replicate, purpose). Distinct pairs give
    // distinct streams.
    std::uint64_t derive(std::uint64_t replicate, std::string_view purpose) const {
        std::uint64_t h = detail::mix64(master_seed ^ detail::kGamma);
        h = detail::mix64(h ^ detail::mix64(replicate + 0x165667b19e3779f9ULL));
        h = detail::mix64(h ^ detail::fnv1a(purpose));
        return h;
    }

    RngStream stream(std::uint64_t replicate, std::string_view purpose) const {
        return RngStream(derive(replicate, purpose));
    }
};

} // namespace seterm

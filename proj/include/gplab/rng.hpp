#pragma once

#include <cstdint>
#include <cmath>

namespace gplab {

/// Counter-based random stream. Two streams constructed from the same
/// (root_seed, stream_id) pair produce identical sequences on every platform
/// and under any degree of parallelism; distinct ids give independent streams.
class RngStream {
public:
    RngStream(std::uint64_t root_seed, std::uint64_t stream_id)
        : root_seed_(root_seed), stream_id_(stream_id) {
        state_ = mix(mix(root_seed + 0x9e3779b97f4a7c15ULL) ^ mix(stream_id + 0xbf58476d1ce4e5b9ULL));
        have_cached_normal_ = false;
    }

    RngStream derive(std::uint64_t sub_id) const {
        return RngStream(state_seed(), sub_id);
    }

    std::uint64_t root_seed() const { return root_seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    /// Uniform in [0, 1).
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform integer in [0, n).
    std::uint64_t uniform_int(std::uint64_t n) {
        // modulo bias is negligible for desk-scale n
        return next_u64() % n;
    }

    /// Standard normal via Box-Muller; cached second draw keeps streams
    /// reproducible without depending on libstdc++ distribution internals.
    double normal() {
        if (have_cached_normal_) {
            have_cached_normal_ = false;
            return cached_normal_;
        }
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        cached_normal_ = r * std::sin(theta);
        have_cached_normal_ = true;
        return r * std::cos(theta);
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z ^= z >> 30;
        z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27;
        z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }

    std::uint64_t state_seed() const {
        return mix(state_ ^ 0xd6e8feb86659fd93ULL);
    }

    std::uint64_t root_seed_;
    std::uint64_t stream_id_;
    std::uint64_t state_;
    double cached_normal_ = 0.0;
    bool have_cached_normal_ = false;
};

} // namespace gplab

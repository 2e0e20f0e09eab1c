#pragma once

#include <cstdint>
#include <random>

namespace fracsde {

namespace detail {
// splitmix64 finalizer; decorrelates nearby (seed, stream) pairs.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// Reproducible random stream addressed by (seed, stream_id).
/// Identical (seed, stream_id) reproduce identical draws bit-exactly
/// on one platform; distinct stream ids give statistically independent
/// streams, so Monte Carlo ensembles can assign one stream per path.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id = 0)
        : seed_(seed), stream_id_(stream_id) {
        const std::uint64_t a = detail::mix64(seed);
        const std::uint64_t b = detail::mix64(a ^ detail::mix64(stream_id));
        std::seed_seq seq{
            static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
            static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
        engine_.seed(seq);
    }

    /// Derived stream for sub-tasks (driver index, path index, ...).
    RngStream substream(std::uint64_t k) const {
        return RngStream(seed_, detail::mix64(stream_id_ * 0x9e3779b97f4a7c15ULL + k + 1));
    }

    double gaussian() { return normal_(engine_); }
    double uniform() { return uniform_(engine_); }
    std::uint64_t raw() { return engine_(); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream_id() const { return stream_id_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

} // namespace fracsde

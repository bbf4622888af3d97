#ifndef MFCG_RNG_HPP
#define MFCG_RNG_HPP

#include <cstdint>

#include "mfcg/types.hpp"

namespace mfcg {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// Counter-based stream: the draw at (seed, stream, index) is a pure
/// function of those three values, so replays are independent of update
/// ordering and parallel scheduling.
class RandomSource {
public:
    RandomSource() = default;
    RandomSource(std::uint64_t seed, std::uint64_t stream, std::uint64_t start_index = 0)
        : seed_(seed), stream_(stream), counter_(start_index) {}

    std::uint64_t next_u64() {
        const std::uint64_t mixed =
            detail::splitmix64(detail::splitmix64(detail::splitmix64(seed_) ^ stream_) ^ counter_);
        ++counter_;
        return mixed;
    }

    /// Uniform in [0, 1).
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Index drawn from a probability vector by inverse-CDF.
    int sample(const std::vector<double>& probs) {
        const double u = next_double();
        double acc = 0.0;
        for (size_t i = 0; i < probs.size(); ++i) {
            acc += probs[i];
            if (u < acc) return static_cast<int>(i);
        }
        return static_cast<int>(probs.size()) - 1;
    }

    int sample(const SimplexDist& d) { return sample(d.probs()); }

    std::uint64_t seed() const { return seed_; }
    std::uint64_t stream() const { return stream_; }
    std::uint64_t draws() const { return counter_; }

private:
    std::uint64_t seed_ = 0;
    std::uint64_t stream_ = 0;
    std::uint64_t counter_ = 0;
};

} // namespace mfcg

#endif

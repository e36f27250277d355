#pragma once

#include <cstdint>

namespace matwalk {

// counter-based generator: every draw is a pure hash of (seed, stream, step, counter),
// so substreams are addressable and replayable in any order and from any thread
namespace rng_detail {
inline constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}
}  // namespace rng_detail

class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t stream, std::uint64_t step)
        : key_(rng_detail::mix64(rng_detail::mix64(rng_detail::mix64(seed) ^ 0xd1b54a32d192ed03ULL * stream) ^
                                 0x8cb92ba72f3d8dd7ULL * step)) {}

    std::uint64_t next_u64() { return rng_detail::mix64(key_ ^ 0xeb44accab455d165ULL * ++counter_); }

    // uniform in [0, 1) with 53-bit resolution
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in {0, ..., bound-1}, bound >= 1
    int next_below(int bound) {
        int v = static_cast<int>(next_double() * static_cast<double>(bound));
        return v >= bound ? bound - 1 : v;
    }

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace matwalk

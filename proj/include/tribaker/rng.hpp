#pragma once

#include <cstdint>

namespace tribaker {

// SplitMix64. Hand-rolled so that streams are bit-reproducible across
// platforms and standard-library versions.
struct SplitMix64 {
    std::uint64_t state = 0;

    explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    // uniform double in [0,1)
    double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

// Independent, deterministically derived stream: one per (seed, stream id).
inline SplitMix64 derived_stream(std::uint64_t seed, std::uint64_t stream_id) {
    SplitMix64 mixer(seed ^ (0x632be59bd9b4e019ULL + stream_id * 0x9e3779b97f4a7c15ULL));
    std::uint64_t s = mixer.next();
    s ^= mixer.next() + stream_id;
    return SplitMix64(s);
}

}  // namespace tribaker

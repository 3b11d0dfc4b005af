#ifndef SEMIGARCH_RNG_HPP
#define SEMIGARCH_RNG_HPP

#include <cstdint>

namespace semigarch {

/// Stafford's "mix13" finalizer (the SplitMix64 avalanche function).
/// Fixed for all builds; stream derivation and output both go through it.
inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

/// Counter-based uniform stream (SplitMix64, Steele/Lea/Flood 2014).
/// The state is a plain counter advanced by the golden-ratio increment;
/// every output is mix64(counter), so the sequence is random-access in
/// principle and trivially reproducible.
class RngStream {
  public:
    RngStream() : state_(0) {}
    explicit RngStream(std::uint64_t state) : state_(state) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix64(state_);
    }

    /// Uniform on the open interval (0,1): 2^53 equidistant points offset by
    /// half a step, so neither endpoint is ever produced.
    double next_uniform() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    /// Independent child stream; tagging the same parent with distinct tags
    /// gives statistically unrelated sequences.
    RngStream split(std::uint64_t tag) const {
        return RngStream(mix64(state_ ^ mix64(tag + 0x9e3779b97f4a7c15ULL)));
    }

    std::uint64_t state() const { return state_; }

  private:
    std::uint64_t state_;
};

/// Per-replicate stream derivation: a double avalanche over (base_seed, index).
/// The mapping is part of the output contract -- identical (seed, index)
/// always yields the identical stream, on every platform and worker layout.
inline RngStream derive_stream(std::uint64_t base_seed, std::uint64_t replicate_index) {
    return RngStream(mix64(base_seed + mix64(replicate_index + 0x9e3779b97f4a7c15ULL)));
}

} // namespace semigarch

#endif

// Counter-based normal variate streams.
//
// Every stream is a pure function of (seed, stream_id): the Philox4x32-10
// block cipher is keyed by the seed and fed a counter made of the stream id
// and a block index. Streams can therefore be created in any order and on
// any thread without changing what they produce.
#pragma once

#include <array>
#include <cstdint>

namespace lsmc {

using PhiloxBlock = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxBlock philox4x32_10(PhiloxBlock counter, PhiloxKey key);

// SplitMix64 finalizer; used to derive independent seeds for distinct panels.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t purpose);

class NormalStream {
public:
    NormalStream(std::uint64_t seed, std::uint64_t stream_id);

    // Uniform in the open interval (0, 1), 53 bits.
    double uniform();
    // Standard normal via Box-Muller.
    double normal();

private:
    void refill();

    PhiloxKey key_;
    std::uint64_t stream_id_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 2> words_{};
    int word_pos_ = 2;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

inline NormalStream rng_stream(std::uint64_t seed, std::uint64_t stream_id) {
    return NormalStream(seed, stream_id);
}

}  // namespace lsmc

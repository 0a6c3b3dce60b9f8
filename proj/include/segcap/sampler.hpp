#pragma once

// Deterministic Monte Carlo sampler for the segmented channel. Randomness
// comes from a counter-based SplitMix64 generator with one substream per
// (seed, block index, purpose), so block i's outcome does not depend on how
// many blocks precede it or on evaluation order; parallel generation and
// sequential generation agree bit for bit.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "segcap/channel.hpp"
#include "segcap/word.hpp"

namespace segcap {

namespace rng {

inline std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
}

class CounterRng {
  public:
    CounterRng(std::uint64_t seed, std::uint64_t stream)
        : state_(mix64(seed + 0x9E3779B97F4A7C15ULL * mix64(stream + 1))) {}

    std::uint64_t next_u64() {
        state_ += 0x9E3779B97F4A7C15ULL;
        return mix64(state_);
    }

    // uniform in [0,1) with 53 random bits
    double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform index in [0,n) via the 128-bit multiply reduction
    std::uint64_t next_index(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

  private:
    std::uint64_t state_;
};

// Stream ids: block i draws channel events on stream 2i and (when the caller
// wants random inputs) input bits on stream 2i+1.
inline std::uint64_t event_stream(std::uint64_t block) { return 2 * block; }
inline std::uint64_t input_stream(std::uint64_t block) { return 2 * block + 1; }

}  // namespace rng

struct SampleResult {
    BinaryWord output;                  // concatenation of the per-block outputs
    std::vector<std::int8_t> pattern;   // -1 deletion, 0 unchanged, +1 duplication
};

// Pass each block through one independent deletion/duplication event.
inline SampleResult sample_segmented(const ChannelParams& params,
                                     const std::vector<BinaryWord>& blocks, std::uint64_t seed) {
    const int l = params.ell;
    SampleResult res;
    res.pattern.reserve(blocks.size());
    res.output.bits.reserve(blocks.size() * static_cast<std::size_t>(l + 1));
    for (std::size_t i = 0; i < blocks.size(); ++i) {
        const BinaryWord& x = blocks[i];
        if (static_cast<int>(x.size()) != l)
            throw std::domain_error("sample_segmented: block length != ell");
        rng::CounterRng gen(seed, rng::event_stream(i));
        const double u = gen.next_double();
        std::int8_t ev = 0;
        if (u < params.p)
            ev = -1;
        else if (u < params.p + params.q)
            ev = +1;
        auto& out = res.output.bits;
        if (ev == 0) {
            out.insert(out.end(), x.bits.begin(), x.bits.end());
        } else {
            const std::size_t pos = gen.next_index(static_cast<std::uint64_t>(l));
            for (std::size_t j = 0; j < x.bits.size(); ++j) {
                if (ev == -1 && j == pos) continue;
                out.push_back(x.bits[j]);
                if (ev == +1 && j == pos) out.push_back(x.bits[j]);
            }
        }
        res.pattern.push_back(ev);
    }
    return res;
}

// Blocks with i.i.d. uniform bits, drawn from the input substreams so they
// are independent of the channel-event draws above.
inline std::vector<BinaryWord> uniform_random_blocks(int l, std::size_t count,
                                                     std::uint64_t seed) {
    if (l < 1) throw std::domain_error("uniform_random_blocks: block length must be >= 1");
    std::vector<BinaryWord> blocks(count);
    for (std::size_t i = 0; i < count; ++i) {
        rng::CounterRng gen(seed, rng::input_stream(i));
        auto& bits = blocks[i].bits;
        bits.resize(static_cast<std::size_t>(l));
        std::uint64_t buf = 0;
        int avail = 0;
        for (int j = 0; j < l; ++j) {
            if (avail == 0) {
                buf = gen.next_u64();
                avail = 64;
            }
            bits[static_cast<std::size_t>(j)] = buf & 1u;
            buf >>= 1;
            --avail;
        }
    }
    return blocks;
}

}  // namespace segcap

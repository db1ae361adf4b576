#pragma once

#include <cstdint>
#include <vector>

#include "crypto.hpp"

namespace sealnet {

    // Counter-mode stream: block k is SHA-256(seed || be64(k)), read as four
    // big-endian 64-bit words in order. Fully specified so that any
    // implementation reproduces the same draws.
    class hash_stream {
    public:
        explicit hash_stream(const hash32 &seed): _seed { seed } {}

        uint64_t next_u64();
        // unbiased value in [0, bound); bound must be non-zero
        uint64_t uniform_below(uint64_t bound);
        // inclusive range
        uint64_t uniform_range(uint64_t lo, uint64_t hi);
        // 53-bit uniform double in [0, 1)
        double uniform01();

        const hash32 &seed() const { return _seed; }
        uint64_t words_drawn() const { return _drawn; }
    private:
        hash32 _seed;
        uint64_t _block = 0;
        uint64_t _buf[4] {};
        unsigned _pos = 4;
        uint64_t _drawn = 0;
    };

    // seed for a named sub-stream, e.g. derive_seed(master, "delay", 7)
    hash32 derive_seed(const hash32 &parent, std::string_view label, uint64_t n = 0);
    hash32 seed_from_u64(uint64_t v);

    // first n entries of a seeded Fisher-Yates shuffle of 0..len-1; n is clamped to len
    std::vector<uint32_t> fisher_yates_prefix(uint32_t len, hash_stream &rng, uint32_t n);
}

#include <cstring>
#include <mutex>

#include <sodium.h>

#include <sealnet/rng.hpp>

namespace sealnet {

    static void ensure_sodium()
    {
        static std::once_flag once;
        std::call_once(once, [] {
            if (sodium_init() < 0)
                throw error("libsodium initialisation failed");
        });
    }

    static_assert(sizeof(crypto_hash_sha256_state) <= 128);
    static_assert(crypto_sign_PUBLICKEYBYTES == 32 && crypto_sign_SECRETKEYBYTES == 64 && crypto_sign_BYTES == 64);

    hash32 sha256(byte_span msg)
    {
        hash32 h;
        crypto_hash_sha256(h.data.data(), msg.data(), msg.size());
        return h;
    }

    hasher::hasher()
    {
        crypto_hash_sha256_init(reinterpret_cast<crypto_hash_sha256_state *>(_state.data()));
    }

    hasher &hasher::update(byte_span b)
    {
        crypto_hash_sha256_update(reinterpret_cast<crypto_hash_sha256_state *>(_state.data()), b.data(), b.size());
        return *this;
    }

    hasher &hasher::update_u64(uint64_t v)
    {
        uint8_t be[8];
        for (int i = 7; i >= 0; --i) {
            be[i] = static_cast<uint8_t>(v);
            v >>= 8;
        }
        return update(byte_span { be, 8 });
    }

    hash32 hasher::finalize()
    {
        hash32 h;
        crypto_hash_sha256_final(reinterpret_cast<crypto_hash_sha256_state *>(_state.data()), h.data.data());
        return h;
    }

    key_pair keypair_from_seed(const hash32 &seed)
    {
        ensure_sodium();
        key_pair kp;
        crypto_sign_seed_keypair(kp.pk.data.data(), kp.sk.data.data.data(), seed.data.data());
        return kp;
    }

    signature sign(const secret_key &sk, byte_span msg)
    {
        ensure_sodium();
        signature s;
        crypto_sign_detached(s.data.data(), nullptr, msg.data(), msg.size(), sk.data.data.data());
        return s;
    }

    bool verify(const public_key &pk, byte_span msg, const signature &sig) noexcept
    {
        try {
            ensure_sodium();
        } catch (...) {
            return false;
        }
        return crypto_sign_verify_detached(sig.data.data(), msg.data(), msg.size(), pk.data.data()) == 0;
    }

    bool verify(byte_span pk, byte_span msg, byte_span sig) noexcept
    {
        if (pk.size() != public_key::size() || sig.size() != signature::size())
            return false;
        public_key k;
        signature s;
        std::memcpy(k.data.data(), pk.data(), pk.size());
        std::memcpy(s.data.data(), sig.data(), sig.size());
        return verify(k, msg, s);
    }

    key_pair node_keypair(const hash32 &master_seed, uint8_t role, uint32_t index)
    {
        return keypair_from_seed(derive_seed(master_seed, "node-key", (uint64_t { role } << 32) | index));
    }

    // --- hash_stream -------------------------------------------------------

    uint64_t hash_stream::next_u64()
    {
        if (_pos == 4) {
            hasher h;
            h.update(_seed);
            h.update_u64(_block++);
            const auto blk = h.finalize();
            for (unsigned w = 0; w < 4; ++w) {
                uint64_t v = 0;
                for (unsigned i = 0; i < 8; ++i)
                    v = (v << 8) | blk[w * 8 + i];
                _buf[w] = v;
            }
            _pos = 0;
        }
        ++_drawn;
        return _buf[_pos++];
    }

    uint64_t hash_stream::uniform_below(uint64_t bound)
    {
        if (bound == 0)
            throw precondition_violation("uniform_below(0)");
        // reject the low (2^64 mod bound) values so every residue is equally likely
        const uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const uint64_t x = next_u64();
            if (x >= threshold)
                return x % bound;
        }
    }

    uint64_t hash_stream::uniform_range(uint64_t lo, uint64_t hi)
    {
        if (hi < lo)
            throw precondition_violation("uniform_range: empty range [{}, {}]", lo, hi);
        if (lo == 0 && hi == UINT64_MAX)
            return next_u64();
        return lo + uniform_below(hi - lo + 1);
    }

    double hash_stream::uniform01()
    {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    hash32 derive_seed(const hash32 &parent, std::string_view label, uint64_t n)
    {
        hasher h;
        h.update(parent);
        h.update_u64(label.size());
        h.update(byte_span { reinterpret_cast<const uint8_t *>(label.data()), label.size() });
        h.update_u64(n);
        return h.finalize();
    }

    hash32 seed_from_u64(uint64_t v)
    {
        hasher h;
        h.update_u64(v);
        return h.finalize();
    }

    std::vector<uint32_t> fisher_yates_prefix(uint32_t len, hash_stream &rng, uint32_t n)
    {
        if (n > len)
            n = len;
        std::vector<uint32_t> perm(len);
        for (uint32_t i = 0; i < len; ++i)
            perm[i] = i;
        for (uint32_t i = 0; i < n; ++i) {
            const auto j = i + static_cast<uint32_t>(rng.uniform_below(len - i));
            std::swap(perm[i], perm[j]);
        }
        perm.resize(n);
        return perm;
    }
}

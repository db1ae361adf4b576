#pragma once

#include <array>

#include "bytes.hpp"

namespace sealnet {

    using public_key = fixed_bytes<32>;
    using signature = fixed_bytes<64>;

    // seed || public key, the layout libsodium expects
    struct secret_key {
        fixed_bytes<64> data {};
        bool operator==(const secret_key &) const = default;
    };

    struct key_pair {
        public_key pk;
        secret_key sk;
        bool operator==(const key_pair &) const = default;
    };

    hash32 sha256(byte_span msg);
    inline hash32 sha256(std::string_view s)
    {
        return sha256(byte_span { reinterpret_cast<const uint8_t *>(s.data()), s.size() });
    }

    // incremental SHA-256
    class hasher {
    public:
        hasher();
        hasher &update(byte_span b);
        template <size_t N>
        hasher &update(const fixed_bytes<N> &b) { return update(b.span()); }
        hasher &update_u64(uint64_t v);
        hash32 finalize();
    private:
        alignas(64) std::array<uint8_t, 128> _state;
    };

    // Ed25519 with the 32-byte seed used verbatim as the RFC 8032 private seed.
    key_pair keypair_from_seed(const hash32 &seed);
    signature sign(const secret_key &sk, byte_span msg);
    bool verify(const public_key &pk, byte_span msg, const signature &sig) noexcept;
    // variant for keys of unchecked provenance: anything not 32 bytes is rejected
    bool verify(byte_span pk, byte_span msg, byte_span sig) noexcept;

    // deterministic key material for simulated nodes
    key_pair node_keypair(const hash32 &master_seed, uint8_t role, uint32_t index);
}

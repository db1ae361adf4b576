#pragma once

#include <map>

#include "types.hpp"

namespace sealnet {

    // Canonical binary form: fixed-width big-endian integers, u32 length prefixes
    // for strings and sequences, u8 presence flag for optionals, u8 tag for variants.
    class encoder {
    public:
        void u8(uint8_t v) { _out.push_back(v); }
        void u32(uint32_t v);
        void u64(uint64_t v);
        void i64(int64_t v) { u64(static_cast<uint64_t>(v)); }
        void raw(byte_span b) { _out.insert(_out.end(), b.begin(), b.end()); }
        void str(std::string_view s);
        void blob(byte_span b);

        const bytes &out() const &{ return _out; }
        bytes out() && { return std::move(_out); }
    private:
        bytes _out;
    };

    class decoder {
    public:
        explicit decoder(byte_span in): _in { in } {}

        uint8_t u8();
        uint32_t u32();
        uint64_t u64();
        int64_t i64() { return static_cast<int64_t>(u64()); }
        byte_span raw(size_t n);
        std::string str();
        bytes blob();
        // guards sequence lengths against absurd prefixes before allocating
        uint32_t count(size_t min_elem_size = 1);

        bool empty() const { return _pos == _in.size(); }
        void expect_end() const;
    private:
        byte_span _in;
        size_t _pos = 0;
    };

    template <size_t N>
    void encode(encoder &e, const fixed_bytes<N> &v) { e.raw(v.span()); }
    template <size_t N>
    void decode(decoder &d, fixed_bytes<N> &v)
    {
        auto b = d.raw(N);
        std::copy(b.begin(), b.end(), v.data.begin());
    }

    inline void encode(encoder &e, uint32_t v) { e.u32(v); }
    inline void decode(decoder &d, uint32_t &v) { v = d.u32(); }
    inline void encode(encoder &e, uint64_t v) { e.u64(v); }
    inline void decode(decoder &d, uint64_t &v) { v = d.u64(); }
    inline void encode(encoder &e, const std::string &v) { e.str(v); }
    inline void decode(decoder &d, std::string &v) { v = d.str(); }

#define SEALNET_CODEC(T) \
    void encode(encoder &e, const T &v); \
    void decode(decoder &d, T &v);

    SEALNET_CODEC(role)
    SEALNET_CODEC(node_id)
    SEALNET_CODEC(signed_by)
    SEALNET_CODEC(machine_op)
    SEALNET_CODEC(transaction)
    SEALNET_CODEC(collection)
    SEALNET_CODEC(guaranteed_collection)
    SEALNET_CODEC(chunk)
    SEALNET_CODEC(execution_result)
    SEALNET_CODEC(spock)
    SEALNET_CODEC(waiting_proof)
    SEALNET_CODEC(missing_collection_attestation)
    SEALNET_CODEC(execution_receipt)
    SEALNET_CODEC(correctness_attestation)
    SEALNET_CODEC(verification_proof)
    SEALNET_CODEC(result_approval)
    SEALNET_CODEC(block_seal)
    SEALNET_CODEC(chunk_verdict)
    SEALNET_CODEC(proof_of_assignment)
    SEALNET_CODEC(faulty_computation_challenge)
    SEALNET_CODEC(faulty_computation_response)
    SEALNET_CODEC(missing_collection_challenge)
    SEALNET_CODEC(slashing_challenge)
    SEALNET_CODEC(verdict)
    SEALNET_CODEC(network_state_update)
    SEALNET_CODEC(block)
#undef SEALNET_CODEC

    template <typename T>
    void encode(encoder &e, const std::vector<T> &v)
    {
        e.u32(static_cast<uint32_t>(v.size()));
        for (const auto &x: v)
            encode(e, x);
    }

    template <typename T>
    void decode(decoder &d, std::vector<T> &v)
    {
        const auto n = d.count();
        v.clear();
        v.resize(n);
        for (auto &x: v)
            decode(d, x);
    }

    template <typename T>
    void encode(encoder &e, const std::optional<T> &v)
    {
        e.u8(v ? 1 : 0);
        if (v)
            encode(e, *v);
    }

    template <typename T>
    void decode(decoder &d, std::optional<T> &v)
    {
        switch (d.u8()) {
            case 0: v.reset(); break;
            case 1: v.emplace(); decode(d, *v); break;
            default: throw decode_error("bad optional flag");
        }
    }

    template <typename T>
    bytes serialize(const T &v)
    {
        encoder e;
        encode(e, v);
        return std::move(e).out();
    }

    template <typename T>
    T deserialize(byte_span b)
    {
        decoder d { b };
        T v {};
        decode(d, v);
        d.expect_end();
        return v;
    }

    // content hashes
    hash32 collection_hash(const collection &c);
    // covers every field except consensus_sigs
    hash32 block_hash(const block &b);
    hash32 result_hash(const execution_result &r);
    hash32 receipt_hash(const execution_receipt &r);
    hash32 challenge_hash(const faulty_computation_challenge &c);
    hash32 challenge_hash(const missing_collection_challenge &c);
    hash32 challenge_hash(const slashing_challenge &c);

    // Messages covered by each signature. Every payload starts with a distinct
    // domain byte so a signature can never be replayed as another message type.
    bytes guarantee_payload(const hash32 &collection_hash);
    bytes receipt_payload(const execution_receipt &r);
    bytes attestation_payload(const hash32 &result_hash);
    bytes approval_payload(const result_approval &a);
    bytes fcc_payload(const faulty_computation_challenge &c);
    bytes fcr_payload(const faulty_computation_response &r);
    bytes mcc_payload(const missing_collection_challenge &c);
    bytes mca_payload(const missing_collection_attestation &a);
    bytes block_payload(const hash32 &block_hash);
}

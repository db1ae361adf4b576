#include <sealnet/codec.hpp>

namespace sealnet {

    const char *role_name(role r)
    {
        switch (r) {
            case role::collector: return "collector";
            case role::consensus: return "consensus";
            case role::execution: return "execution";
            case role::verification: return "verification";
        }
        return "?";
    }

    std::string to_string(const node_id &id)
    {
        return fmt::format("{}#{}", role_name(id.r), id.index);
    }

    const char *verdict_name(chunk_verdict v)
    {
        switch (v) {
            case chunk_verdict::ok: return "Ok";
            case chunk_verdict::bad_tau0: return "BadTau0";
            case chunk_verdict::bad_consumption: return "BadConsumption";
            case chunk_verdict::over_limit: return "OverLimit";
            case chunk_verdict::under_full: return "UnderFull";
            case chunk_verdict::bad_final_state: return "BadFinalState";
        }
        return "?";
    }

    const char *verdict_name(verdict v)
    {
        switch (v) {
            case verdict::executor_slashed: return "ExecutorSlashed";
            case verdict::challenger_slashed: return "ChallengerSlashed";
            case verdict::collection_resolved: return "CollectionResolved";
            case verdict::cluster_slashed: return "ClusterSlashed";
            case verdict::fines_applied: return "FinesApplied";
        }
        return "?";
    }

    // --- primitives --------------------------------------------------------

    void encoder::u32(uint32_t v)
    {
        for (int s = 24; s >= 0; s -= 8)
            _out.push_back(static_cast<uint8_t>(v >> s));
    }

    void encoder::u64(uint64_t v)
    {
        for (int s = 56; s >= 0; s -= 8)
            _out.push_back(static_cast<uint8_t>(v >> s));
    }

    void encoder::str(std::string_view s)
    {
        u32(static_cast<uint32_t>(s.size()));
        _out.insert(_out.end(), s.begin(), s.end());
    }

    void encoder::blob(byte_span b)
    {
        u32(static_cast<uint32_t>(b.size()));
        raw(b);
    }

    byte_span decoder::raw(size_t n)
    {
        if (_in.size() - _pos < n)
            throw decode_error("truncated input: need {} bytes at offset {}, have {}", n, _pos, _in.size() - _pos);
        auto r = _in.subspan(_pos, n);
        _pos += n;
        return r;
    }

    uint8_t decoder::u8() { return raw(1)[0]; }

    uint32_t decoder::u32()
    {
        uint32_t v = 0;
        for (auto b: raw(4))
            v = (v << 8) | b;
        return v;
    }

    uint64_t decoder::u64()
    {
        uint64_t v = 0;
        for (auto b: raw(8))
            v = (v << 8) | b;
        return v;
    }

    std::string decoder::str()
    {
        const auto n = u32();
        auto b = raw(n);
        return { b.begin(), b.end() };
    }

    bytes decoder::blob()
    {
        const auto n = u32();
        auto b = raw(n);
        return { b.begin(), b.end() };
    }

    uint32_t decoder::count(size_t min_elem_size)
    {
        const auto n = u32();
        if (min_elem_size && static_cast<uint64_t>(n) * min_elem_size > _in.size() - _pos)
            throw decode_error("sequence length {} exceeds remaining input", n);
        return n;
    }

    void decoder::expect_end() const
    {
        if (!empty())
            throw decode_error("{} trailing bytes", _in.size() - _pos);
    }

    // --- records -----------------------------------------------------------

    void encode(encoder &e, const role &v) { e.u8(static_cast<uint8_t>(v)); }
    void decode(decoder &d, role &v)
    {
        const auto t = d.u8();
        if (t > 3)
            throw decode_error("bad role tag {}", t);
        v = static_cast<role>(t);
    }

    void encode(encoder &e, const chunk_verdict &v) { e.u8(static_cast<uint8_t>(v)); }
    void decode(decoder &d, chunk_verdict &v)
    {
        const auto t = d.u8();
        if (t > 5)
            throw decode_error("bad chunk verdict tag {}", t);
        v = static_cast<chunk_verdict>(t);
    }

    void encode(encoder &e, const verdict &v) { e.u8(static_cast<uint8_t>(v)); }
    void decode(decoder &d, verdict &v)
    {
        const auto t = d.u8();
        if (t > 4)
            throw decode_error("bad verdict tag {}", t);
        v = static_cast<verdict>(t);
    }

    void encode(encoder &e, const node_id &v)
    {
        encode(e, v.r);
        e.u32(v.index);
        encode(e, v.key);
    }
    void decode(decoder &d, node_id &v)
    {
        decode(d, v.r);
        v.index = d.u32();
        decode(d, v.key);
    }

    void encode(encoder &e, const signed_by &v)
    {
        encode(e, v.signer);
        encode(e, v.sig);
    }
    void decode(decoder &d, signed_by &v)
    {
        decode(d, v.signer);
        decode(d, v.sig);
    }

    void encode(encoder &e, const machine_op &v)
    {
        e.u8(static_cast<uint8_t>(v.kind));
        e.str(v.dst);
        switch (v.kind) {
            case op_kind::set: e.i64(v.value); break;
            case op_kind::add:
            case op_kind::mul: e.str(v.src); break;
            case op_kind::hashmix: break;
        }
    }
    void decode(decoder &d, machine_op &v)
    {
        const auto t = d.u8();
        if (t > 3)
            throw decode_error("bad op tag {}", t);
        v = {};
        v.kind = static_cast<op_kind>(t);
        v.dst = d.str();
        switch (v.kind) {
            case op_kind::set: v.value = d.i64(); break;
            case op_kind::add:
            case op_kind::mul: v.src = d.str(); break;
            case op_kind::hashmix: break;
        }
    }

    void encode(encoder &e, const transaction &v)
    {
        encode(e, v.id);
        encode(e, v.ops);
        e.u64(v.declared_gas);
    }
    void decode(decoder &d, transaction &v)
    {
        decode(d, v.id);
        decode(d, v.ops);
        v.declared_gas = d.u64();
    }

    void encode(encoder &e, const collection &v) { encode(e, v.transactions); }
    void decode(decoder &d, collection &v) { decode(d, v.transactions); }

    void encode(encoder &e, const guaranteed_collection &v)
    {
        encode(e, v.collection_hash);
        e.u32(v.cluster_index);
        encode(e, v.guarantor_sigs);
    }
    void decode(decoder &d, guaranteed_collection &v)
    {
        decode(d, v.collection_hash);
        v.cluster_index = d.u32();
        decode(d, v.guarantor_sigs);
    }

    void encode(encoder &e, const chunk &v)
    {
        encode(e, v.start_state);
        e.u64(v.first_tx_gas);
        e.u32(v.start_index);
        e.u64(v.consumption);
    }
    void decode(decoder &d, chunk &v)
    {
        decode(d, v.start_state);
        v.first_tx_gas = d.u64();
        v.start_index = d.u32();
        v.consumption = d.u64();
    }

    void encode(encoder &e, const execution_result &v)
    {
        encode(e, v.block_hash);
        encode(e, v.previous_result_hash);
        encode(e, v.chunks);
        encode(e, v.final_state);
    }
    void decode(decoder &d, execution_result &v)
    {
        decode(d, v.block_hash);
        decode(d, v.previous_result_hash);
        decode(d, v.chunks);
        decode(d, v.final_state);
    }

    void encode(encoder &e, const spock &v)
    {
        encode(e, v.pk);
        encode(e, v.sig);
    }
    void decode(decoder &d, spock &v)
    {
        decode(d, v.pk);
        decode(d, v.sig);
    }

    void encode(encoder &e, const waiting_proof &v)
    {
        encode(e, v.start_mark);
        e.u64(v.iterations);
        encode(e, v.output);
    }
    void decode(decoder &d, waiting_proof &v)
    {
        decode(d, v.start_mark);
        v.iterations = d.u64();
        decode(d, v.output);
    }

    static void encode_unsigned(encoder &e, const missing_collection_attestation &v)
    {
        encode(e, v.collection_hash);
        encode(e, v.attestor);
        encode(e, v.proof);
    }
    void encode(encoder &e, const missing_collection_attestation &v)
    {
        encode_unsigned(e, v);
        encode(e, v.sig);
    }
    void decode(decoder &d, missing_collection_attestation &v)
    {
        decode(d, v.collection_hash);
        decode(d, v.attestor);
        decode(d, v.proof);
        decode(d, v.sig);
    }

    void encode(encoder &e, const execution_receipt &v)
    {
        encode(e, v.result);
        encode(e, v.spocks);
        encode(e, v.mcas);
        encode(e, v.executor);
    }
    void decode(decoder &d, execution_receipt &v)
    {
        decode(d, v.result);
        decode(d, v.spocks);
        decode(d, v.mcas);
        decode(d, v.executor);
    }

    void encode(encoder &e, const correctness_attestation &v)
    {
        encode(e, v.result_hash);
        encode(e, v.sig);
    }
    void decode(decoder &d, correctness_attestation &v)
    {
        decode(d, v.result_hash);
        decode(d, v.sig);
    }

    void encode(encoder &e, const verification_proof &v)
    {
        encode(e, v.chunk_indices);
        encode(e, v.selection_proof);
        encode(e, v.spocks);
    }
    void decode(decoder &d, verification_proof &v)
    {
        decode(d, v.chunk_indices);
        decode(d, v.selection_proof);
        decode(d, v.spocks);
    }

    void encode(encoder &e, const result_approval &v)
    {
        encode(e, v.attestation);
        encode(e, v.proof);
        encode(e, v.verifier);
    }
    void decode(decoder &d, result_approval &v)
    {
        decode(d, v.attestation);
        decode(d, v.proof);
        decode(d, v.verifier);
    }

    void encode(encoder &e, const block_seal &v)
    {
        encode(e, v.block_hash);
        encode(e, v.result_hash);
        encode(e, v.executor_sigs);
        encode(e, v.attestation_sigs);
        encode(e, v.proof_of_waiting);
    }
    void decode(decoder &d, block_seal &v)
    {
        decode(d, v.block_hash);
        decode(d, v.result_hash);
        decode(d, v.executor_sigs);
        decode(d, v.attestation_sigs);
        decode(d, v.proof_of_waiting);
    }

    void encode(encoder &e, const proof_of_assignment &v)
    {
        encode(e, v.chunk_indices);
        encode(e, v.selection_proof);
    }
    void decode(decoder &d, proof_of_assignment &v)
    {
        decode(d, v.chunk_indices);
        decode(d, v.selection_proof);
    }

    static void encode_unsigned(encoder &e, const faulty_computation_challenge &v)
    {
        encode(e, v.receipt_hash);
        e.u32(v.chunk_index);
        encode(e, v.claimed_fault);
        encode(e, v.assignment);
        encode(e, v.state_commitments);
        encode(e, v.verifier.signer);
    }
    void encode(encoder &e, const faulty_computation_challenge &v)
    {
        encode_unsigned(e, v);
        encode(e, v.verifier.sig);
    }
    void decode(decoder &d, faulty_computation_challenge &v)
    {
        decode(d, v.receipt_hash);
        v.chunk_index = d.u32();
        decode(d, v.claimed_fault);
        decode(d, v.assignment);
        decode(d, v.state_commitments);
        decode(d, v.verifier.signer);
        decode(d, v.verifier.sig);
    }

    static void encode_unsigned(encoder &e, const faulty_computation_response &v)
    {
        encode(e, v.challenge_hash);
        encode(e, v.state_commitments);
        encode(e, v.executor.signer);
    }
    void encode(encoder &e, const faulty_computation_response &v)
    {
        encode_unsigned(e, v);
        encode(e, v.executor.sig);
    }
    void decode(decoder &d, faulty_computation_response &v)
    {
        decode(d, v.challenge_hash);
        decode(d, v.state_commitments);
        decode(d, v.executor.signer);
        decode(d, v.executor.sig);
    }

    static void encode_unsigned(encoder &e, const missing_collection_challenge &v)
    {
        encode(e, v.block_hash);
        encode(e, v.collection_hash);
        encode(e, v.challenger);
    }
    void encode(encoder &e, const missing_collection_challenge &v)
    {
        encode_unsigned(e, v);
        encode(e, v.sig);
    }
    void decode(decoder &d, missing_collection_challenge &v)
    {
        decode(d, v.block_hash);
        decode(d, v.collection_hash);
        decode(d, v.challenger);
        decode(d, v.sig);
    }

    void encode(encoder &e, const slashing_challenge &v)
    {
        e.u8(static_cast<uint8_t>(v.index()));
        std::visit([&](const auto &c) { encode(e, c); }, v);
    }
    void decode(decoder &d, slashing_challenge &v)
    {
        switch (const auto t = d.u8(); t) {
            case 0: {
                faulty_computation_challenge c;
                decode(d, c);
                v = std::move(c);
                break;
            }
            case 1: {
                missing_collection_challenge c;
                decode(d, c);
                v = std::move(c);
                break;
            }
            default: throw decode_error("bad challenge tag {}", t);
        }
    }

    void encode(encoder &e, const network_state_update &v)
    {
        encode(e, v.challenge_id);
        encode(e, v.outcome);
        encode(e, v.node);
        e.u64(v.amount);
        encode(e, v.proof);
    }
    void decode(decoder &d, network_state_update &v)
    {
        decode(d, v.challenge_id);
        decode(d, v.outcome);
        decode(d, v.node);
        v.amount = d.u64();
        decode(d, v.proof);
    }

    static void encode_unsigned(encoder &e, const block &v)
    {
        e.u64(v.height);
        encode(e, v.previous_block_hash);
        encode(e, v.entropy);
        encode(e, v.collections);
        encode(e, v.seals);
        encode(e, v.challenges);
        encode(e, v.updates);
    }
    void encode(encoder &e, const block &v)
    {
        encode_unsigned(e, v);
        encode(e, v.consensus_sigs);
    }
    void decode(decoder &d, block &v)
    {
        v.height = d.u64();
        decode(d, v.previous_block_hash);
        decode(d, v.entropy);
        decode(d, v.collections);
        decode(d, v.seals);
        decode(d, v.challenges);
        decode(d, v.updates);
        decode(d, v.consensus_sigs);
    }

    // --- hashes and signing payloads ---------------------------------------

    template <typename T>
    static hash32 hash_of(const T &v)
    {
        return sha256(serialize(v));
    }

    hash32 collection_hash(const collection &c) { return hash_of(c); }
    hash32 result_hash(const execution_result &r) { return hash_of(r); }
    hash32 receipt_hash(const execution_receipt &r) { return hash_of(r); }
    hash32 challenge_hash(const faulty_computation_challenge &c) { return hash_of(c); }
    hash32 challenge_hash(const missing_collection_challenge &c) { return hash_of(c); }
    hash32 challenge_hash(const slashing_challenge &c)
    {
        return std::visit([](const auto &x) { return challenge_hash(x); }, c);
    }

    hash32 block_hash(const block &b)
    {
        encoder e;
        encode_unsigned(e, b);
        return sha256(e.out());
    }

    enum class domain : uint8_t {
        guarantee = 0x10,
        receipt,
        attestation,
        approval,
        fcc,
        fcr,
        mcc,
        mca,
        block
    };

    static encoder tagged(domain d)
    {
        encoder e;
        e.u8(static_cast<uint8_t>(d));
        return e;
    }

    bytes guarantee_payload(const hash32 &h)
    {
        auto e = tagged(domain::guarantee);
        encode(e, h);
        return std::move(e).out();
    }

    bytes receipt_payload(const execution_receipt &r)
    {
        auto e = tagged(domain::receipt);
        encode(e, r.result);
        encode(e, r.spocks);
        encode(e, r.mcas);
        encode(e, r.executor.signer);
        return std::move(e).out();
    }

    bytes attestation_payload(const hash32 &h)
    {
        auto e = tagged(domain::attestation);
        encode(e, h);
        return std::move(e).out();
    }

    bytes approval_payload(const result_approval &a)
    {
        auto e = tagged(domain::approval);
        encode(e, a.attestation);
        encode(e, a.proof);
        encode(e, a.verifier.signer);
        return std::move(e).out();
    }

    bytes fcc_payload(const faulty_computation_challenge &c)
    {
        auto e = tagged(domain::fcc);
        encode_unsigned(e, c);
        return std::move(e).out();
    }

    bytes fcr_payload(const faulty_computation_response &r)
    {
        auto e = tagged(domain::fcr);
        encode_unsigned(e, r);
        return std::move(e).out();
    }

    bytes mcc_payload(const missing_collection_challenge &c)
    {
        auto e = tagged(domain::mcc);
        encode_unsigned(e, c);
        return std::move(e).out();
    }

    bytes mca_payload(const missing_collection_attestation &a)
    {
        auto e = tagged(domain::mca);
        encode_unsigned(e, a);
        return std::move(e).out();
    }

    bytes block_payload(const hash32 &h)
    {
        auto e = tagged(domain::block);
        encode(e, h);
        return std::move(e).out();
    }
}

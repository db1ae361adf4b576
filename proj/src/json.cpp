#include <sealnet/json.hpp>

namespace sealnet {

#define PUT(f) j[#f] = v.f
#define GET(f) j.at(#f).get_to(v.f)

    template <typename T>
    static void put_opt(json &j, const char *k, const std::optional<T> &o)
    {
        j[k] = o ? json(*o) : json(nullptr);
    }

    template <typename T>
    static void get_opt(const json &j, const char *k, std::optional<T> &o)
    {
        const auto &x = j.at(k);
        if (x.is_null())
            o.reset();
        else
            o = x.get<T>();
    }

    role role_from_name(std::string_view s)
    {
        for (auto r: { role::collector, role::consensus, role::execution, role::verification })
            if (s == role_name(r))
                return r;
        throw decode_error("unknown role '{}'", s);
    }

    void to_json(json &j, const role &v) { j = role_name(v); }
    void from_json(const json &j, role &v) { v = role_from_name(j.get<std::string>()); }

    void to_json(json &j, const chunk_verdict &v) { j = verdict_name(v); }
    void from_json(const json &j, chunk_verdict &v)
    {
        const auto s = j.get<std::string>();
        for (uint8_t t = 0; t <= 5; ++t)
            if (s == verdict_name(static_cast<chunk_verdict>(t))) {
                v = static_cast<chunk_verdict>(t);
                return;
            }
        throw decode_error("unknown chunk verdict '{}'", s);
    }

    void to_json(json &j, const verdict &v) { j = verdict_name(v); }
    void from_json(const json &j, verdict &v)
    {
        const auto s = j.get<std::string>();
        for (uint8_t t = 0; t <= 4; ++t)
            if (s == verdict_name(static_cast<verdict>(t))) {
                v = static_cast<verdict>(t);
                return;
            }
        throw decode_error("unknown verdict '{}'", s);
    }

    void to_json(json &j, const node_id &v)
    {
        j = json::object();
        j["role"] = v.r;
        PUT(index);
        PUT(key);
    }
    void from_json(const json &j, node_id &v)
    {
        j.at("role").get_to(v.r);
        GET(index);
        GET(key);
    }

    void to_json(json &j, const signed_by &v)
    {
        j = json::object();
        PUT(signer);
        PUT(sig);
    }
    void from_json(const json &j, signed_by &v)
    {
        GET(signer);
        GET(sig);
    }

    static const char *op_names[] = { "SET", "ADD", "MUL", "HASHMIX" };

    void to_json(json &j, const machine_op &v)
    {
        j = json::object();
        j["op"] = op_names[static_cast<int>(v.kind)];
        PUT(dst);
        switch (v.kind) {
            case op_kind::set: PUT(value); break;
            case op_kind::add:
            case op_kind::mul: PUT(src); break;
            case op_kind::hashmix: break;
        }
    }
    void from_json(const json &j, machine_op &v)
    {
        v = {};
        const auto name = j.at("op").get<std::string>();
        int k = -1;
        for (int i = 0; i < 4; ++i)
            if (name == op_names[i])
                k = i;
        if (k < 0)
            throw decode_error("unknown op '{}'", name);
        v.kind = static_cast<op_kind>(k);
        GET(dst);
        switch (v.kind) {
            case op_kind::set: GET(value); break;
            case op_kind::add:
            case op_kind::mul: GET(src); break;
            case op_kind::hashmix: break;
        }
    }

    void to_json(json &j, const transaction &v)
    {
        j = json::object();
        PUT(id);
        PUT(ops);
        PUT(declared_gas);
    }
    void from_json(const json &j, transaction &v)
    {
        GET(id);
        GET(ops);
        GET(declared_gas);
    }

    void to_json(json &j, const collection &v)
    {
        j = json::object();
        PUT(transactions);
    }
    void from_json(const json &j, collection &v) { GET(transactions); }

    void to_json(json &j, const guaranteed_collection &v)
    {
        j = json::object();
        PUT(collection_hash);
        PUT(cluster_index);
        PUT(guarantor_sigs);
    }
    void from_json(const json &j, guaranteed_collection &v)
    {
        GET(collection_hash);
        GET(cluster_index);
        GET(guarantor_sigs);
    }

    void to_json(json &j, const chunk &v)
    {
        j = json::object();
        PUT(start_state);
        PUT(first_tx_gas);
        PUT(start_index);
        PUT(consumption);
    }
    void from_json(const json &j, chunk &v)
    {
        GET(start_state);
        GET(first_tx_gas);
        GET(start_index);
        GET(consumption);
    }

    void to_json(json &j, const execution_result &v)
    {
        j = json::object();
        PUT(block_hash);
        PUT(previous_result_hash);
        PUT(chunks);
        PUT(final_state);
    }
    void from_json(const json &j, execution_result &v)
    {
        GET(block_hash);
        GET(previous_result_hash);
        GET(chunks);
        GET(final_state);
    }

    void to_json(json &j, const spock &v)
    {
        j = json::object();
        PUT(pk);
        PUT(sig);
    }
    void from_json(const json &j, spock &v)
    {
        GET(pk);
        GET(sig);
    }

    void to_json(json &j, const waiting_proof &v)
    {
        j = json::object();
        PUT(start_mark);
        PUT(iterations);
        PUT(output);
    }
    void from_json(const json &j, waiting_proof &v)
    {
        GET(start_mark);
        GET(iterations);
        GET(output);
    }

    void to_json(json &j, const missing_collection_attestation &v)
    {
        j = json::object();
        PUT(collection_hash);
        PUT(attestor);
        PUT(proof);
        PUT(sig);
    }
    void from_json(const json &j, missing_collection_attestation &v)
    {
        GET(collection_hash);
        GET(attestor);
        GET(proof);
        GET(sig);
    }

    void to_json(json &j, const execution_receipt &v)
    {
        j = json::object();
        PUT(result);
        PUT(spocks);
        PUT(mcas);
        PUT(executor);
    }
    void from_json(const json &j, execution_receipt &v)
    {
        GET(result);
        GET(spocks);
        GET(mcas);
        GET(executor);
    }

    void to_json(json &j, const correctness_attestation &v)
    {
        j = json::object();
        PUT(result_hash);
        PUT(sig);
    }
    void from_json(const json &j, correctness_attestation &v)
    {
        GET(result_hash);
        GET(sig);
    }

    void to_json(json &j, const verification_proof &v)
    {
        j = json::object();
        PUT(chunk_indices);
        PUT(selection_proof);
        PUT(spocks);
    }
    void from_json(const json &j, verification_proof &v)
    {
        GET(chunk_indices);
        GET(selection_proof);
        GET(spocks);
    }

    void to_json(json &j, const result_approval &v)
    {
        j = json::object();
        PUT(attestation);
        PUT(proof);
        PUT(verifier);
    }
    void from_json(const json &j, result_approval &v)
    {
        GET(attestation);
        GET(proof);
        GET(verifier);
    }

    void to_json(json &j, const block_seal &v)
    {
        j = json::object();
        PUT(block_hash);
        PUT(result_hash);
        PUT(executor_sigs);
        PUT(attestation_sigs);
        PUT(proof_of_waiting);
    }
    void from_json(const json &j, block_seal &v)
    {
        GET(block_hash);
        GET(result_hash);
        GET(executor_sigs);
        GET(attestation_sigs);
        GET(proof_of_waiting);
    }

    void to_json(json &j, const proof_of_assignment &v)
    {
        j = json::object();
        PUT(chunk_indices);
        PUT(selection_proof);
    }
    void from_json(const json &j, proof_of_assignment &v)
    {
        GET(chunk_indices);
        GET(selection_proof);
    }

    void to_json(json &j, const faulty_computation_challenge &v)
    {
        j = json::object();
        PUT(receipt_hash);
        PUT(chunk_index);
        PUT(claimed_fault);
        PUT(assignment);
        PUT(state_commitments);
        PUT(verifier);
    }
    void from_json(const json &j, faulty_computation_challenge &v)
    {
        GET(receipt_hash);
        GET(chunk_index);
        GET(claimed_fault);
        GET(assignment);
        GET(state_commitments);
        GET(verifier);
    }

    void to_json(json &j, const faulty_computation_response &v)
    {
        j = json::object();
        PUT(challenge_hash);
        PUT(state_commitments);
        PUT(executor);
    }
    void from_json(const json &j, faulty_computation_response &v)
    {
        GET(challenge_hash);
        GET(state_commitments);
        GET(executor);
    }

    void to_json(json &j, const missing_collection_challenge &v)
    {
        j = json::object();
        PUT(block_hash);
        PUT(collection_hash);
        PUT(challenger);
        PUT(sig);
    }
    void from_json(const json &j, missing_collection_challenge &v)
    {
        GET(block_hash);
        GET(collection_hash);
        GET(challenger);
        GET(sig);
    }

    void to_json(json &j, const slashing_challenge &v)
    {
        j = json::object();
        if (const auto *f = std::get_if<faulty_computation_challenge>(&v)) {
            j["type"] = "FCC";
            j["body"] = *f;
        } else {
            j["type"] = "MCC";
            j["body"] = std::get<missing_collection_challenge>(v);
        }
    }
    void from_json(const json &j, slashing_challenge &v)
    {
        const auto t = j.at("type").get<std::string>();
        if (t == "FCC")
            v = j.at("body").get<faulty_computation_challenge>();
        else if (t == "MCC")
            v = j.at("body").get<missing_collection_challenge>();
        else
            throw decode_error("unknown challenge type '{}'", t);
    }

    void to_json(json &j, const network_state_update &v)
    {
        j = json::object();
        PUT(challenge_id);
        PUT(outcome);
        PUT(node);
        PUT(amount);
        put_opt(j, "proof", v.proof);
    }
    void from_json(const json &j, network_state_update &v)
    {
        GET(challenge_id);
        GET(outcome);
        GET(node);
        GET(amount);
        get_opt(j, "proof", v.proof);
    }

    void to_json(json &j, const block &v)
    {
        j = json::object();
        PUT(height);
        PUT(previous_block_hash);
        PUT(entropy);
        PUT(collections);
        PUT(seals);
        PUT(challenges);
        PUT(updates);
        PUT(consensus_sigs);
    }
    void from_json(const json &j, block &v)
    {
        GET(height);
        GET(previous_block_hash);
        GET(entropy);
        GET(collections);
        GET(seals);
        GET(challenges);
        GET(updates);
        GET(consensus_sigs);
    }

    void to_json(json &j, const slashing_entry &v)
    {
        j = json::object();
        PUT(node);
        PUT(amount);
        PUT(reason);
        PUT(height);
    }
    void from_json(const json &j, slashing_entry &v)
    {
        GET(node);
        GET(amount);
        GET(reason);
        GET(height);
    }
}

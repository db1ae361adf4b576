#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "crypto.hpp"

namespace sealnet {

    enum class role : uint8_t { collector = 0, consensus = 1, execution = 2, verification = 3 };
    const char *role_name(role r);

    struct node_id {
        role r = role::collector;
        uint32_t index = 0;
        public_key key {};

        // (role, index) is unique, so ordering on it is total
        auto operator<=>(const node_id &o) const
        {
            if (auto c = r <=> o.r; c != 0)
                return c;
            if (auto c = index <=> o.index; c != 0)
                return c;
            return key <=> o.key;
        }
        bool operator==(const node_id &) const = default;
    };
    std::string to_string(const node_id &id);

    // one element of a "signature set"
    struct signed_by {
        node_id signer;
        signature sig;
        bool operator==(const signed_by &) const = default;
    };

    enum class op_kind : uint8_t { set = 0, add = 1, mul = 2, hashmix = 3 };

    // SET(dst, value) | ADD(dst, src) | MUL(dst, src) | HASHMIX(dst); unused fields stay empty/zero
    struct machine_op {
        op_kind kind = op_kind::set;
        std::string dst;
        std::string src;
        int64_t value = 0;
        bool operator==(const machine_op &) const = default;

        static machine_op set(std::string r, int64_t v) { return { op_kind::set, std::move(r), {}, v }; }
        static machine_op add(std::string r, std::string s) { return { op_kind::add, std::move(r), std::move(s), 0 }; }
        static machine_op mul(std::string r, std::string s) { return { op_kind::mul, std::move(r), std::move(s), 0 }; }
        static machine_op hashmix(std::string r) { return { op_kind::hashmix, std::move(r), {}, 0 }; }
    };

    struct transaction {
        hash32 id;
        std::vector<machine_op> ops;
        uint64_t declared_gas = 0;
        bool operator==(const transaction &) const = default;
    };

    struct collection {
        std::vector<transaction> transactions;
        bool operator==(const collection &) const = default;
    };

    struct guaranteed_collection {
        hash32 collection_hash;
        uint32_t cluster_index = 0;
        std::vector<signed_by> guarantor_sigs;
        bool operator==(const guaranteed_collection &) const = default;
    };

    struct chunk {
        hash32 start_state;
        uint64_t first_tx_gas = 0;
        uint32_t start_index = 0;
        uint64_t consumption = 0;
        bool operator==(const chunk &) const = default;
    };

    struct execution_result {
        hash32 block_hash;
        hash32 previous_result_hash;
        std::vector<chunk> chunks;
        hash32 final_state;
        bool operator==(const execution_result &) const = default;
    };

    struct spock {
        public_key pk;
        signature sig;
        bool operator==(const spock &) const = default;
    };

    struct waiting_proof {
        hash32 start_mark;
        uint64_t iterations = 0;
        hash32 output;
        bool operator==(const waiting_proof &) const = default;
    };

    struct missing_collection_attestation {
        hash32 collection_hash;
        node_id attestor;
        waiting_proof proof;
        signature sig;
        bool operator==(const missing_collection_attestation &) const = default;
    };

    // mcas: attestations justifying any guaranteed collection the executor skipped
    struct execution_receipt {
        execution_result result;
        std::vector<spock> spocks;
        std::vector<missing_collection_attestation> mcas;
        signed_by executor;
        bool operator==(const execution_receipt &) const = default;
    };

    struct correctness_attestation {
        hash32 result_hash;
        signature sig;
        bool operator==(const correctness_attestation &) const = default;
    };

    struct verification_proof {
        std::vector<uint32_t> chunk_indices;
        signature selection_proof;
        std::vector<spock> spocks;
        bool operator==(const verification_proof &) const = default;
    };

    struct result_approval {
        correctness_attestation attestation;
        verification_proof proof;
        signed_by verifier;
        bool operator==(const result_approval &) const = default;
    };

    struct block_seal {
        hash32 block_hash;
        hash32 result_hash;
        std::vector<signed_by> executor_sigs;
        std::vector<signed_by> attestation_sigs;
        waiting_proof proof_of_waiting;
        bool operator==(const block_seal &) const = default;
    };

    // which chunk-verification check failed
    enum class chunk_verdict : uint8_t { ok = 0, bad_tau0, bad_consumption, over_limit, under_full, bad_final_state };
    const char *verdict_name(chunk_verdict v);

    struct proof_of_assignment {
        std::vector<uint32_t> chunk_indices;
        signature selection_proof;
        bool operator==(const proof_of_assignment &) const = default;
    };

    struct faulty_computation_challenge {
        hash32 receipt_hash;
        uint32_t chunk_index = 0;
        chunk_verdict claimed_fault = chunk_verdict::bad_final_state;
        proof_of_assignment assignment;
        std::vector<hash32> state_commitments;
        signed_by verifier;
        bool operator==(const faulty_computation_challenge &) const = default;
    };

    struct faulty_computation_response {
        hash32 challenge_hash;
        std::vector<hash32> state_commitments;
        signed_by executor;
        bool operator==(const faulty_computation_response &) const = default;
    };

    struct missing_collection_challenge {
        hash32 block_hash;
        hash32 collection_hash;
        node_id challenger;
        signature sig;
        bool operator==(const missing_collection_challenge &) const = default;
    };

    using slashing_challenge = std::variant<faulty_computation_challenge, missing_collection_challenge>;

    enum class verdict : uint8_t {
        executor_slashed = 0,
        challenger_slashed,
        collection_resolved,
        cluster_slashed,
        fines_applied
    };
    const char *verdict_name(verdict v);

    // one stake change journaled in a block
    struct network_state_update {
        hash32 challenge_id;
        verdict outcome = verdict::executor_slashed;
        node_id node;
        uint64_t amount = 0;
        std::optional<waiting_proof> proof;
        bool operator==(const network_state_update &) const = default;
    };

    struct block {
        uint64_t height = 0;
        hash32 previous_block_hash;
        hash32 entropy;
        std::vector<guaranteed_collection> collections;
        std::vector<block_seal> seals;
        std::vector<slashing_challenge> challenges;
        std::vector<network_state_update> updates;
        std::vector<signed_by> consensus_sigs;
        bool operator==(const block &) const = default;
    };
}

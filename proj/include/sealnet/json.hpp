#pragma once

// Lossless JSON rendering of every canonical record: hashes, keys and
// signatures as lowercase hex, enums by name, fields in canonical order.

#include <json.hpp>

#include "stake.hpp"

namespace sealnet {

    using json = nlohmann::ordered_json;

    template <size_t N>
    void to_json(json &j, const fixed_bytes<N> &v) { j = v.hex(); }
    template <size_t N>
    void from_json(const json &j, fixed_bytes<N> &v) { v = fixed_bytes<N>::from_hex(j.get<std::string>()); }

#define SEALNET_JSON(T) \
    void to_json(json &j, const T &v); \
    void from_json(const json &j, T &v);

    SEALNET_JSON(role)
    SEALNET_JSON(node_id)
    SEALNET_JSON(signed_by)
    SEALNET_JSON(machine_op)
    SEALNET_JSON(transaction)
    SEALNET_JSON(collection)
    SEALNET_JSON(guaranteed_collection)
    SEALNET_JSON(chunk)
    SEALNET_JSON(execution_result)
    SEALNET_JSON(spock)
    SEALNET_JSON(waiting_proof)
    SEALNET_JSON(missing_collection_attestation)
    SEALNET_JSON(execution_receipt)
    SEALNET_JSON(correctness_attestation)
    SEALNET_JSON(verification_proof)
    SEALNET_JSON(result_approval)
    SEALNET_JSON(block_seal)
    SEALNET_JSON(chunk_verdict)
    SEALNET_JSON(proof_of_assignment)
    SEALNET_JSON(faulty_computation_challenge)
    SEALNET_JSON(faulty_computation_response)
    SEALNET_JSON(missing_collection_challenge)
    SEALNET_JSON(slashing_challenge)
    SEALNET_JSON(verdict)
    SEALNET_JSON(network_state_update)
    SEALNET_JSON(block)
    SEALNET_JSON(slashing_entry)
#undef SEALNET_JSON

    role role_from_name(std::string_view s);
}

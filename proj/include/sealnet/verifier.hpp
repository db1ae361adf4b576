#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "exec.hpp"

namespace sealnet {

    struct node_identity {
        node_id id;
        secret_key sk;
    };

    struct missing_chunk_data : error {
        uint32_t chunk_index;
        missing_chunk_data(uint32_t idx, const std::string &why)
            : error("chunk {} data unavailable: {}", idx, why), chunk_index { idx } {}
    };

    // ⌈η·Ξ⌉. Products within 1e-9 (relative) of an integer are treated as that
    // integer, so 0.042·1000 gives 42 and not 43 on any rounding path.
    uint32_t chunks_to_check(double eta, uint32_t num_chunks);

    // first n entries of a Fisher-Yates permutation of 0..len-1 drawn from hash_stream(seed)
    std::vector<uint32_t> fisher_yates_sample(uint32_t len, const hash32 &seed, uint32_t n);

    struct chunk_assignment {
        std::vector<uint32_t> indices;  // L
        signature proof;                // p
        bool operator==(const chunk_assignment &) const = default;
    };

    // p = sign(sk, canonical(result)), seed = sha256(p), L = sample(Ξ, seed, ⌈η·Ξ⌉).
    //
    // Grinding: a verifier able to produce many valid p for one result could pick
    // a convenient L. Ed25519 signing here is deterministic, so honest code yields
    // one p, but verification cannot rule out a second valid signature made with
    // another nonce. A unique signature scheme (BLS, or a VRF) would be needed to
    // close that gap.
    chunk_assignment chunk_self_selection(double eta, const execution_result &result, const secret_key &sk);
    bool verify_selection_proof(const execution_result &result, const public_key &pk, const signature &p,
                                std::span<const uint32_t> L, double eta);

    // data for one chunk, already matched against the receipt and block by the fetcher
    struct chunk_data {
        register_state start_state;
        std::vector<transaction> transactions;
    };
    using chunk_fetcher = std::function<std::optional<chunk_data>(const execution_receipt &, uint32_t chunk_index)>;

    using check_outcome = std::variant<result_approval, faulty_computation_challenge>;

    // Verifies every chunk in L in order. The first failure yields an FCC and no
    // approval. Throws missing_chunk_data if the fetcher cannot supply a chunk or
    // supplies data that does not match the receipt.
    check_outcome check_assigned_chunks(const execution_receipt &receipt, const chunk_assignment &assignment,
                                        const chunk_fetcher &fetch, const node_identity &self,
                                        const gas_schedule &g);

    result_approval make_approval(const execution_result &result, const chunk_assignment &assignment,
                                  std::vector<spock> spocks, const node_identity &self);

    // signatures, selection proof and identity binding of every SPoCK
    bool approval_well_formed(const result_approval &a, const execution_result &result, double eta);
    // additionally: each SPoCK shares its pk with the executor's SPoCK for that chunk
    bool approval_valid(const result_approval &a, const execution_receipt &receipt, double eta);
}

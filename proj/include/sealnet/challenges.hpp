#pragma once

#include <functional>
#include <optional>
#include <variant>

#include "stake.hpp"
#include "verifier.hpp"

namespace sealnet {

    // response whose commitment list cannot be compared with the challenge
    struct malformed_response : error { using error::error; };

    struct fcc_evidence {
        std::optional<uint32_t> mismatch_index;  // ℓ
        std::optional<hash32> recomputed;        // commitment of execute(Λ_{i,ℓ-1}, tx)
        std::string note;
        bool operator==(const fcc_evidence &) const = default;
    };

    struct adjudication_outcome {
        hash32 challenge_id;
        verdict outcome = verdict::executor_slashed;
        std::vector<node_id> penalized;
        fcc_evidence evidence;
        std::optional<waiting_proof> proof;
        bool operator==(const adjudication_outcome &) const = default;
    };

    // --- faulty computation ------------------------------------------------

    // Refuses (precondition_violation) when chunk_index is not in the assignment.
    faulty_computation_challenge make_fcc(const node_identity &verifier, const execution_receipt &receipt,
                                          const chunk_assignment &assignment, uint32_t chunk_index,
                                          chunk_verdict claimed, std::vector<hash32> commitments);

    // signature, role, selection proof and chunk ∈ L
    bool fcc_authentic(const faulty_computation_challenge &c, const execution_receipt &receipt, double eta);

    faulty_computation_response make_fcr(const node_identity &executor, const faulty_computation_challenge &c,
                                         std::vector<hash32> commitments);

    // smallest ℓ with a[ℓ] != b[ℓ]; throws malformed_response on length mismatch
    std::optional<size_t> first_mismatch(std::span<const hash32> a, std::span<const hash32> b);

    // the responder's answer, or the waiting proof showing the window closed without one
    using fcc_reply = std::variant<faulty_computation_response, waiting_proof>;
    // full state for a commitment, from whichever party can supply it
    using state_lookup = std::function<std::optional<register_state>(const hash32 &commitment)>;

    // Gas-type claims (BadTau0, BadConsumption, OverLimit, UnderFull) are settled
    // from the chunk's transactions alone, no response needed.
    adjudication_outcome adjudicate_fcc_static(const faulty_computation_challenge &c, const execution_receipt &receipt,
                                               std::span<const transaction> chunk_txs, const gas_schedule &g);

    // Malformed state claims, decidable without the executor: wrong list length,
    // position 0 differing from the published start, or a final entry equal to
    // the published end. Yields ChallengerSlashed; nullopt when the claim stands.
    std::optional<adjudication_outcome> fcc_precheck(const faulty_computation_challenge &c, const execution_receipt &receipt,
                                                     size_t chunk_tx_count);

    // BadFinalState claims. The challenge's list is [Λ̃_{i,0} .. Λ̃_{i,χ}], position 0
    // being the published chunk start. A mismatch at ℓ disputes the ℓ-th transaction
    // of the chunk (offset ℓ-1), replayed here from Λ_{i,ℓ-1}.
    adjudication_outcome adjudicate_fcc(const faulty_computation_challenge &c, const execution_receipt &receipt,
                                        const fcc_reply &reply, std::span<const transaction> chunk_txs,
                                        const state_lookup &states, const gas_schedule &g);

    // --- missing collection ------------------------------------------------

    missing_collection_challenge make_mcc(const node_identity &executor, const hash32 &block_hash,
                                          const hash32 &collection_hash);
    bool mcc_authentic(const missing_collection_challenge &c);

    // uniform sample of min(κ, |guarantors|) guarantors, seeded per (collector, challenge seed)
    std::vector<node_id> mcc_probe_plan(const node_id &collector, std::span<const node_id> guarantors,
                                        uint32_t kappa_probe, const hash32 &challenge_seed);

    missing_collection_attestation make_mca(const node_identity &collector, const hash32 &collection_hash,
                                            const waiting_proof &proof);

    enum class mcc_status { pending, resolved, accepted };

    struct mcc_tally_params {
        std::span<const node_id> challenged_cluster; // attestors from here are not counted
        std::span<const node_id> guarantors;
        std::span<const node_id> executors;          // everyone fined, initiator or not
        uint64_t delta_t = 0;
        uint64_t vdf_rate = 1;
    };

    struct mcc_tally_result {
        mcc_status status = mcc_status::pending;
        std::vector<missing_collection_attestation> counted;
        size_t rejected = 0;
        // FinesApplied always; CollectionResolved first when the text surfaced
        std::vector<adjudication_outcome> outcomes;
    };

    // Counts authentic MCAs from distinct collectors outside the challenged cluster
    // against all N collectors, strictly above 2/3 of collector stake.
    mcc_tally_result mcc_tally(const missing_collection_challenge &c, std::span<const missing_collection_attestation> mcas,
                               const stake_ledger &ledger, bool collection_surfaced, const mcc_tally_params &p);

    // large penalty once a receipt skipping the collection is sealed
    adjudication_outcome mcc_cluster_slash(const missing_collection_challenge &c, std::span<const node_id> guarantors);
}

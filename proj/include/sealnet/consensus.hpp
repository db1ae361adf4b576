#pragma once

#include <array>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>

#include "challenges.hpp"
#include "vdf.hpp"

namespace sealnet {

    hash32 next_entropy(const hash32 &parent_entropy, uint64_t height);

    struct slashing_policy {
        uint64_t small_fine = 1;
        // large penalty = the role's minimum stake
        std::map<role, uint64_t> min_stake { { role::collector, 100 }, { role::consensus, 100 },
                                             { role::execution, 100 }, { role::verification, 100 } };
        uint64_t large(role r) const;
    };

    class slashing_journal {
    public:
        bool contains(const hash32 &challenge_id, verdict v) const { return _done.count({ challenge_id, v }) > 0; }
        bool insert(const hash32 &challenge_id, verdict v) { return _done.insert({ challenge_id, v }).second; }
        size_t size() const { return _done.size(); }
    private:
        std::set<std::pair<hash32, verdict>> _done;
    };

    struct apply_result {
        bool applied = false;  // false: this (challenge, verdict) was already applied
        std::vector<network_state_update> updates;
    };

    // The only path that mutates stake. One update per penalized node;
    // CollectionResolved carries a single zero-amount marker.
    apply_result apply_slashing(const adjudication_outcome &o, stake_ledger &ledger, slashing_journal &journal,
                                const slashing_policy &policy, uint64_t height);

    struct consensus_params {
        double eta = 0.5;
        uint64_t delta_t = 100;
        uint64_t vdf_rate = 4;
        uint64_t seal_wait = 200;        // from first receipt seen to earliest seal
        uint64_t response_window = 400;  // FCC response deadline after journaling
        gas_schedule gas;
        slashing_policy policy;
    };

    struct result_record {
        execution_result result;
        hash32 hash;
        uint64_t block_height = 0;
        std::map<node_id, execution_receipt> receipts;
        std::map<node_id, result_approval> approvals;
        uint64_t first_receipt_time = 0;
        uint64_t seq = 0; // arrival order, for tie-breaks
    };

    enum class fcc_state { pending, upheld, rejected };

    struct fcc_record {
        faulty_computation_challenge challenge;
        hash32 id;
        hash32 result_hash;
        execution_receipt receipt;
        uint64_t journal_height = 0;
        uint64_t deadline = 0;
        std::optional<faulty_computation_response> response;
        fcc_state state = fcc_state::pending;
        std::optional<adjudication_outcome> outcome;
    };

    struct mcc_record {
        missing_collection_challenge challenge;
        hash32 id;
        guaranteed_collection collection;
        std::vector<node_id> cluster;
        std::vector<missing_collection_attestation> mcas;
        bool surfaced = false;
        mcc_status status = mcc_status::pending;
        uint64_t journal_height = 0;
        bool cluster_slashed = false;
    };

    struct chain_state {
        std::vector<block> blocks; // index = height
        std::map<hash32, uint64_t> height_of;
        // β: seal of the highest sealed block, with its result
        block_seal last_seal;
        execution_result last_sealed_result;
        uint64_t sealed_height = 0;
        std::vector<hash32> sealed_results; // by height
        std::map<hash32, result_record> results;
        std::map<hash32, fcc_record> fccs;

        // genesis is sealed by axiom
        static chain_state from_genesis(const block &genesis, const execution_result &genesis_result);
        const block *find_block(const hash32 &h) const;
    };

    inline constexpr size_t seal_conditions = 8;

    // conditions[0] is well-formedness (known block and result, at least one valid
    // executor signature). 1 previous result is the last sealed one, 2 parent block is the
    // last sealed block, 3 start state matches, 4 verifier stake > 2/3, 5 approvals valid,
    // 6 no pending FCC, 7 no upheld FCC, 8 waiting proof long enough.
    struct seal_verdict {
        std::array<bool, seal_conditions + 1> conditions {};
        bool valid() const;
        std::vector<int> failed() const;
    };

    seal_verdict seal_validity(const block_seal &candidate, const chain_state &chain, const stake_ledger &ledger,
                               const consensus_params &p);

    // empty results start where they end
    const hash32 &result_start_state(const execution_result &r);

    // >2/3 of the cluster's stake among signers with valid guarantee signatures
    bool collection_guaranteed(const guaranteed_collection &gc, std::span<const node_id> cluster, const stake_ledger &ledger);

    // What the committee needs from the data-availability layer to adjudicate.
    struct data_access {
        std::function<std::optional<std::vector<transaction>>(const hash32 &result_hash, uint32_t chunk)> chunk_transactions;
        state_lookup states;
    };

    struct committee_event {
        uint64_t height = 0;
        adjudication_outcome outcome;
        std::vector<network_state_update> updates;
    };

    struct seal_record {
        uint64_t sealed_height = 0;   // height of the block whose result was sealed
        uint64_t included_in = 0;     // height of the block carrying the seal
        hash32 result_hash;
    };

    // Ideal consensus committee: orders messages into blocks, hosts challenges,
    // decides seals and owns the stake ledger.
    class consensus_committee {
    public:
        consensus_committee(consensus_params p, stake_ledger ledger, std::vector<node_identity> members,
                            std::vector<std::vector<node_id>> clusters, data_access data,
                            const register_state &genesis_state, const hash32 &genesis_entropy);

        void on_collection(const guaranteed_collection &gc, uint64_t now);
        void on_receipt(const execution_receipt &r, uint64_t now);
        void on_approval(const result_approval &a, uint64_t now);
        void on_fcc(const faulty_computation_challenge &c, uint64_t now);
        void on_fcr(const faulty_computation_response &r, uint64_t now);
        void on_mcc(const missing_collection_challenge &c, uint64_t now);
        void on_mca(const missing_collection_attestation &a, uint64_t now);
        void on_collection_text(const hash32 &collection_hash, uint64_t now);

        const block &propose(uint64_t now);

        const chain_state &chain() const { return _chain; }
        const stake_ledger &ledger() const { return _ledger; }
        const consensus_params &params() const { return _p; }
        const std::vector<committee_event> &events() const { return _events; }
        const std::vector<seal_record> &seals() const { return _seals; }
        const std::map<hash32, mcc_record> &mccs() const { return _mccs; }
        size_t rejected_approvals() const { return _rejected_approvals.size(); }
        const std::set<std::pair<node_id, hash32>> &rejected_approval_set() const { return _rejected_approvals; }
        size_t dropped_messages() const { return _dropped; }
        // the most recently proposed block
        const block &head() const { return _chain.blocks.back(); }
    private:
        consensus_params _p;
        stake_ledger _ledger;
        slashing_journal _journal;
        std::vector<node_identity> _members;
        std::vector<std::vector<node_id>> _clusters;
        data_access _data;
        chain_state _chain;

        std::deque<guaranteed_collection> _pending_collections;
        std::set<hash32> _seen_collections;
        std::map<hash32, std::pair<uint64_t, uint32_t>> _collection_home; // hash -> (block height, position)
        std::map<hash32, execution_receipt> _receipts_by_hash;
        std::vector<faulty_computation_challenge> _incoming_fccs;
        std::vector<missing_collection_challenge> _incoming_mccs;
        std::map<hash32, mcc_record> _mccs;
        std::map<hash32, hash32> _mcc_by_collection;
        std::set<hash32> _surfaced;
        std::vector<missing_collection_attestation> _early_mcas;
        std::map<hash32, std::vector<result_approval>> _orphan_approvals;
        std::map<hash32, waiting_proof> _seal_proofs;
        std::set<std::pair<node_id, hash32>> _rejected_approvals;
        std::vector<committee_event> _events;
        std::vector<seal_record> _seals;
        std::vector<network_state_update> _updates;
        uint64_t _seq = 0;
        size_t _dropped = 0;

        bool staked(const node_id &n) const;
        void record(const adjudication_outcome &o, uint64_t height);
        void journal_challenges(block &b, uint64_t now);
        void adjudicate_due(uint64_t height, uint64_t now);
        void settle_fcc(fcc_record &f, const adjudication_outcome &o, uint64_t height);
        void add_seals(block &b, uint64_t now);
        std::optional<block_seal> build_seal(const result_record &r, uint64_t now);
        std::vector<transaction> chunk_txs(const fcc_record &f) const;
    };
}

#pragma once

#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <string>

#include "consensus.hpp"
#include "json.hpp"
#include "rng.hpp"

namespace sealnet {

    enum class strategy {
        honest,
        faulty_executor,
        withholding_cluster,
        lazy_verifier,
        spurious_challenger,
        colluding_verifier
    };
    const char *strategy_name(strategy s);

    enum class fault_placement { random, grind_colluders };

    struct adversary_assignment {
        strategy kind = strategy::honest;
        std::vector<uint32_t> indices;        // node indices within the strategy's role
        std::optional<uint32_t> cluster;      // withholding: every member of this cluster
        bool respond = true;                  // faulty executor answers FCCs
        fault_placement placement = fault_placement::random;
        uint32_t partner = 0;                 // colluding verifiers: executor index
    };

    struct workload_params {
        uint32_t collection_size = 8;
        uint32_t collections_per_cluster = 1;
        uint32_t registers = 4;
    };

    struct role_stakes {
        uint64_t collector = 100;
        uint64_t consensus = 100;
        uint64_t execution = 100;
        uint64_t verification = 100;
        uint64_t of(role r) const;
    };

    struct scenario_config {
        std::string name = "scenario";
        uint32_t collectors = 12;
        uint32_t consensus_nodes = 4;
        uint32_t executors = 3;
        uint32_t verifiers = 10;
        role_stakes stakes;
        std::map<role, std::vector<uint64_t>> stake_overrides; // per-index stake, role-wide list
        role_stakes min_stake;
        uint64_t small_fine = 1;
        uint32_t n_cluster = 4;
        double eta = 0.5;
        gas_schedule gas { 10, 80 };
        uint64_t delta_t = 100;
        uint32_t kappa_probe = 3;
        uint64_t vdf_rate = 4;
        std::vector<adversary_assignment> adversaries;
        uint64_t seed = 1;
        uint32_t blocks = 20;
        uint32_t drain_rounds = 12;
        workload_params workload;
        std::optional<uint32_t> liveness_ceiling; // rounds from finalization to seal
        json expect = json::object();
        // designated honest verifiers for coverage statistics; empty = all honest
        std::vector<uint32_t> coverage_subset;

        void validate() const;
        uint64_t round_length() const { return 2 * delta_t; }
    };

    scenario_config parse_config(const json &j);
    scenario_config load_config(const std::filesystem::path &p);
    json config_to_json(const scenario_config &c);

    // --- event queue ---------------------------------------------------------

    // Strict (time, seq) order; seq is assigned at scheduling time.
    class event_queue {
    public:
        using action = std::function<void()>;
        void schedule(uint64_t at, action a);
        bool empty() const { return _q.empty(); }
        uint64_t next_time() const { return _q.top().at; }
        // pops and runs the earliest event, returns its time
        uint64_t run_one();
        size_t processed() const { return _processed; }
    private:
        struct item {
            uint64_t at;
            uint64_t seq;
            action fn;
        };
        struct later {
            bool operator()(const item &a, const item &b) const
            {
                return a.at != b.at ? a.at > b.at : a.seq > b.seq;
            }
        };
        std::priority_queue<item, std::vector<item>, later> _q;
        uint64_t _seq = 0;
        size_t _processed = 0;
    };

    // Uniform integer delay in [Δ_t/4, Δ_t].
    class delay_model {
    public:
        delay_model(const hash32 &seed, uint64_t delta_t): _rng { seed }, _delta { delta_t } {}
        uint64_t sample();
        uint64_t delta_t() const { return _delta; }
    private:
        hash_stream _rng;
        uint64_t _delta;
    };

    // Fisher-Yates partition of collector indices into clusters of n_cluster;
    // leftover collectors form a final, smaller cluster.
    std::vector<std::vector<uint32_t>> form_clusters(uint32_t collectors, uint32_t n_cluster, const hash32 &beacon);

    // --- reporting -----------------------------------------------------------

    struct detection_record {
        uint64_t height = 0;
        hash32 result_hash;
        uint32_t chunks = 0;          // Ξ of the faulty result
        uint32_t faulty_chunk = 0;
        uint32_t checks_per_verifier = 0;
        uint32_t honest_verifiers = 0;
        uint32_t honest_coverage = 0; // designated honest verifiers whose L holds the faulty chunk
        bool detected = false;        // an honest verifier raised an FCC
        bool sealed = false;
        bool executor_slashed = false;
    };

    struct adjudication_summary {
        uint64_t height = 0;
        hash32 challenge_id;
        verdict outcome {};
        std::vector<node_id> penalized;
        std::optional<uint32_t> mismatch_index;
        bool has_waiting_proof = false;
        std::string note;
    };

    struct run_report {
        std::string scenario;
        uint64_t seed = 0;
        uint32_t target_blocks = 0;
        uint32_t sealed_target_blocks = 0;
        uint64_t final_height = 0;
        uint64_t sealed_height = 0;
        std::vector<seal_record> seals;
        std::vector<slashing_entry> slashings;
        std::vector<adjudication_summary> adjudications;
        std::vector<detection_record> detections;
        uint64_t max_seal_lag = 0;     // rounds, over target blocks
        uint64_t rejected_approvals = 0;
        uint64_t rejected_lazy_approvals = 0;
        uint64_t mccs_raised = 0;
        uint64_t mcas_signed = 0;
        bool honest_slashed = false;   // ignoring MCC fines
        bool faulty_sealed = false;
        hash32 sealed_state;           // final-state commitment of the last sealed target block
        uint64_t events = 0;
    };

    json report_to_json(const run_report &r);
    // throws config_error on an unknown or mistyped expectation
    void validate_expectations(const json &expect);
    // violated expectations from the config's "expect" block, plus the liveness ceiling when set
    std::vector<std::string> check_expectations(const run_report &r, const scenario_config &cfg);

    // everything an independent oracle needs to replay the chain
    struct run_artifacts {
        std::vector<block> chain;
        std::map<hash32, collection> collection_texts;
        register_state genesis_state;
        std::vector<hash32> sealed_results; // by height
        std::map<hash32, execution_result> results;
        stake_ledger final_ledger;
        std::map<node_id, strategy> strategies;
    };

    struct run_output {
        run_report report;
        run_artifacts artifacts;
    };

    run_output run_scenario(const scenario_config &cfg);
}

#pragma once

#include <map>
#include <optional>
#include <span>

#include "codec.hpp"

namespace sealnet {

    struct invalid_transaction : error {
        size_t index;
        invalid_transaction(size_t idx, const std::string &msg): error(msg), index { idx } {}
    };

    // Toy world state. Registers holding zero are not stored, so "absent reads as 0"
    // and the canonical form are the same thing.
    class register_state {
    public:
        register_state() = default;
        register_state(std::initializer_list<std::pair<const std::string, int64_t>> init);

        int64_t get(const std::string &name) const;
        void set(const std::string &name, int64_t v);
        const std::map<std::string, int64_t> &registers() const { return _regs; }
        size_t size() const { return _regs.size(); }
        bool operator==(const register_state &) const = default;
    private:
        std::map<std::string, int64_t> _regs;
    };

    void encode(encoder &e, const register_state &s);
    void decode(decoder &d, register_state &s);

    // sha256 of the sorted-key canonical encoding
    hash32 state_commitment(const register_state &s);

    struct gas_schedule {
        uint64_t tx_limit = 10;     // Γ_Tx
        uint64_t chunk_limit = 100; // Γ_chunk
        uint64_t ratio() const { return chunk_limit / tx_limit; }
        void validate() const;
    };

    uint64_t op_cost(op_kind k);
    uint64_t gas_of(std::span<const machine_op> ops);
    // id = sha256(salt || canonical ops); declared gas taken from the cost table
    transaction make_transaction(std::vector<machine_op> ops, uint64_t salt);

    // applies one op in place
    void apply_op(register_state &s, const machine_op &op);

    struct tx_outcome {
        register_state state;
        uint64_t gas = 0;
    };

    // Throws invalid_transaction (index 0) when declared gas exceeds Γ_Tx or
    // disagrees with the cost table.
    tx_outcome execute_transaction(const register_state &s, const transaction &tx, const gas_schedule &g);

    struct chunk_span {
        uint32_t start = 0;        // k
        uint64_t consumption = 0;  // c
        bool operator==(const chunk_span &) const = default;
    };

    // Greedy fill: a new chunk starts exactly when c + T[i] > Γ_chunk.
    // Empty input yields no chunks. Throws precondition_violation if T[i] > Γ_Tx.
    std::vector<chunk_span> chunking(std::span<const uint64_t> tx_gas, const gas_schedule &g);

    // Deliberate state corruption used by the faulty-executor adversary: after
    // transaction tx_index the register reg is shifted by delta.
    struct state_fault {
        uint32_t tx_index = 0;
        std::string reg = "a";
        int64_t delta = 1;
    };

    struct block_execution_output {
        register_state final_state;
        std::vector<chunk> chunks;
        std::vector<hash32> chunk_secrets;                      // ζ per chunk
        std::vector<std::vector<hash32>> interim_commitments;   // [Λ_{i,0} .. Λ_{i,χ_i}] per chunk
        std::vector<uint64_t> tx_gas;                           // τ per transaction
        std::vector<register_state> boundary_states;            // state before tx k, plus the final state
    };

    // Serial execution, then chunking over actual τ values. `fault`, when set,
    // corrupts the post-state of one transaction while the chunk metadata still
    // looks legitimate.
    block_execution_output execute_block(const register_state &start, std::span<const transaction> txs,
                                         const gas_schedule &g, const std::optional<state_fault> &fault = {});

    // τ₀' for the last chunk
    inline constexpr uint64_t no_next_chunk = UINT64_MAX;

    struct chunk_check {
        chunk_verdict verdict = chunk_verdict::ok;
        hash32 zeta;
        std::vector<hash32> interim_commitments; // recomputed [Λ_{i,0} .. Λ_{i,χ_i}]
        register_state end_state;
        bool ok() const { return verdict == chunk_verdict::ok; }
    };

    // Replays the chunk from Λ and checks, in this order: first-tx gas = τ₀,
    // Σγ = c, c ≤ Γ_chunk, c + τ₀' > Γ_chunk, end state = Λ'. Reports the first
    // failing check; ζ and the commitments come from the replay either way.
    chunk_check verify_chunk(const register_state &start, std::span<const transaction> txs, uint64_t tau0,
                             const hash32 &claimed_end, uint64_t next_tau0, uint64_t consumption,
                             const gas_schedule &g);
}

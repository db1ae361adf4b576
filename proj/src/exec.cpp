#include <sealnet/exec.hpp>

namespace sealnet {

    register_state::register_state(std::initializer_list<std::pair<const std::string, int64_t>> init)
    {
        for (const auto &[k, v]: init)
            set(k, v);
    }

    int64_t register_state::get(const std::string &name) const
    {
        const auto it = _regs.find(name);
        return it == _regs.end() ? 0 : it->second;
    }

    void register_state::set(const std::string &name, int64_t v)
    {
        if (v == 0)
            _regs.erase(name);
        else
            _regs[name] = v;
    }

    void encode(encoder &e, const register_state &s)
    {
        e.u32(static_cast<uint32_t>(s.registers().size()));
        for (const auto &[k, v]: s.registers()) {
            e.str(k);
            e.i64(v);
        }
    }

    void decode(decoder &d, register_state &s)
    {
        s = {};
        const auto n = d.count(12);
        std::string prev;
        for (uint32_t i = 0; i < n; ++i) {
            auto k = d.str();
            const auto v = d.i64();
            if (i && k <= prev)
                throw decode_error("register names not strictly ascending");
            if (v == 0)
                throw decode_error("zero-valued register '{}' in canonical state", k);
            s.set(k, v);
            prev = std::move(k);
        }
    }

    hash32 state_commitment(const register_state &s)
    {
        return sha256(serialize(s));
    }

    void gas_schedule::validate() const
    {
        if (tx_limit == 0)
            throw config_error("gas.tx_limit must be positive");
        if (chunk_limit < tx_limit)
            throw config_error("gas.chunk_limit ({}) must be at least gas.tx_limit ({})", chunk_limit, tx_limit);
    }

    uint64_t op_cost(op_kind k)
    {
        switch (k) {
            case op_kind::set: return 1;
            case op_kind::add: return 1;
            case op_kind::mul: return 2;
            case op_kind::hashmix: return 5;
        }
        throw precondition_violation("unknown op kind");
    }

    uint64_t gas_of(std::span<const machine_op> ops)
    {
        uint64_t g = 0;
        for (const auto &op: ops)
            g += op_cost(op.kind);
        return g;
    }

    transaction make_transaction(std::vector<machine_op> ops, uint64_t salt)
    {
        transaction tx;
        tx.declared_gas = gas_of(ops);
        encoder e;
        e.u64(salt);
        encode(e, ops);
        tx.id = sha256(e.out());
        tx.ops = std::move(ops);
        return tx;
    }

    void apply_op(register_state &s, const machine_op &op)
    {
        const auto u = [](int64_t x) { return static_cast<uint64_t>(x); };
        switch (op.kind) {
            case op_kind::set:
                s.set(op.dst, op.value);
                break;
            case op_kind::add:
                s.set(op.dst, static_cast<int64_t>(u(s.get(op.dst)) + u(s.get(op.src))));
                break;
            case op_kind::mul:
                s.set(op.dst, static_cast<int64_t>(u(s.get(op.dst)) * u(s.get(op.src))));
                break;
            case op_kind::hashmix: {
                encoder e;
                e.i64(s.get(op.dst));
                const auto h = sha256(e.out());
                uint64_t v = 0;
                for (int i = 0; i < 8; ++i)
                    v = (v << 8) | h[i];
                s.set(op.dst, static_cast<int64_t>(v & 0x7FFF'FFFF'FFFF'FFFFULL));
                break;
            }
        }
    }

    static void check_tx(const transaction &tx, const gas_schedule &g, size_t index)
    {
        const auto actual = gas_of(tx.ops);
        if (tx.declared_gas != actual)
            throw invalid_transaction(index, fmt::format("transaction {}: declared gas {} but ops cost {}", index, tx.declared_gas, actual));
        if (actual > g.tx_limit)
            throw invalid_transaction(index, fmt::format("transaction {}: gas {} exceeds limit {}", index, actual, g.tx_limit));
    }

    tx_outcome execute_transaction(const register_state &s, const transaction &tx, const gas_schedule &g)
    {
        check_tx(tx, g, 0);
        tx_outcome out { s, 0 };
        for (const auto &op: tx.ops) {
            apply_op(out.state, op);
            out.gas += op_cost(op.kind);
        }
        return out;
    }

    std::vector<chunk_span> chunking(std::span<const uint64_t> tx_gas, const gas_schedule &g)
    {
        std::vector<chunk_span> out;
        uint64_t c = 0;
        uint32_t k = 0;
        for (uint32_t i = 0; i < tx_gas.size(); ++i) {
            const auto t = tx_gas[i];
            if (t > g.tx_limit)
                throw precondition_violation("chunking: T[{}] = {} exceeds tx limit {}", i, t, g.tx_limit);
            if (c + t > g.chunk_limit && i > k) {
                out.push_back({ k, c });
                c = 0;
                k = i;
            }
            c += t;
        }
        if (!tx_gas.empty())
            out.push_back({ k, c });
        return out;
    }

    // one trace entry: canonical op, then the post-op state hash
    static void trace_step(hasher &h, register_state &s, const machine_op &op)
    {
        apply_op(s, op);
        h.update(serialize(op));
        h.update(state_commitment(s));
    }

    block_execution_output execute_block(const register_state &start, std::span<const transaction> txs,
                                         const gas_schedule &g, const std::optional<state_fault> &fault)
    {
        if (fault && fault->tx_index >= txs.size())
            throw precondition_violation("fault at tx {} but block has {} transactions", fault->tx_index, txs.size());
        block_execution_output out;
        out.boundary_states.reserve(txs.size() + 1);
        out.tx_gas.reserve(txs.size());
        for (size_t i = 0; i < txs.size(); ++i)
            check_tx(txs[i], g, i);
        for (const auto &tx: txs)
            out.tx_gas.push_back(tx.declared_gas);
        const auto spans = chunking(out.tx_gas, g);

        register_state s = start;
        out.boundary_states.push_back(s);
        for (size_t ci = 0; ci < spans.size(); ++ci) {
            const uint32_t first = spans[ci].start;
            const uint32_t last = ci + 1 < spans.size() ? spans[ci + 1].start : static_cast<uint32_t>(txs.size());
            hasher h;
            std::vector<hash32> commits;
            commits.push_back(state_commitment(s));
            for (uint32_t t = first; t < last; ++t) {
                for (const auto &op: txs[t].ops)
                    trace_step(h, s, op);
                if (fault && fault->tx_index == t)
                    s.set(fault->reg, static_cast<int64_t>(static_cast<uint64_t>(s.get(fault->reg)) + static_cast<uint64_t>(fault->delta)));
                commits.push_back(state_commitment(s));
                out.boundary_states.push_back(s);
            }
            out.chunks.push_back(chunk { commits.front(), out.tx_gas[first], first, spans[ci].consumption });
            out.chunk_secrets.push_back(h.finalize());
            out.interim_commitments.push_back(std::move(commits));
        }
        out.final_state = std::move(s);
        return out;
    }

    chunk_check verify_chunk(const register_state &start, std::span<const transaction> txs, uint64_t tau0,
                             const hash32 &claimed_end, uint64_t next_tau0, uint64_t consumption,
                             const gas_schedule &g)
    {
        if (txs.empty())
            throw precondition_violation("verify_chunk on an empty transaction list");
        chunk_check r;
        register_state s = start;
        hasher h;
        uint64_t gamma = 0;
        uint64_t first_gas = 0;
        r.interim_commitments.push_back(state_commitment(s));
        for (size_t t = 0; t < txs.size(); ++t) {
            check_tx(txs[t], g, t);
            uint64_t tau = 0;
            for (const auto &op: txs[t].ops) {
                trace_step(h, s, op);
                tau += op_cost(op.kind);
            }
            if (t == 0)
                first_gas = tau;
            gamma += tau;
            r.interim_commitments.push_back(state_commitment(s));
        }
        r.zeta = h.finalize();

        const bool full = next_tau0 == no_next_chunk || consumption + next_tau0 > g.chunk_limit;
        if (first_gas != tau0)
            r.verdict = chunk_verdict::bad_tau0;
        else if (gamma != consumption)
            r.verdict = chunk_verdict::bad_consumption;
        else if (consumption > g.chunk_limit)
            r.verdict = chunk_verdict::over_limit;
        else if (!full)
            r.verdict = chunk_verdict::under_full;
        else if (r.interim_commitments.back() != claimed_end)
            r.verdict = chunk_verdict::bad_final_state;
        r.end_state = std::move(s);
        return r;
    }
}

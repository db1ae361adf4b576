#pragma once

// Small fixtures shared by the unit suites and the acceptance binary: node
// identities, a seeded transaction generator, and a one-block pipeline
// (execute, chunk, receipt, chunk fetcher).

#include <sealnet/codec.hpp>
#include <sealnet/exec.hpp>
#include <sealnet/rng.hpp>
#include <sealnet/spock.hpp>
#include <sealnet/verifier.hpp>

namespace sealnet::test {

    inline node_identity make_identity(role r, uint32_t index, uint64_t seed = 1)
    {
        const auto kp = node_keypair(seed_from_u64(seed), static_cast<uint8_t>(r), index);
        return { { r, index, kp.pk }, kp.sk };
    }

    inline std::string reg(uint64_t i) { return std::string(1, static_cast<char>('a' + i)); }

    // one transaction with total gas drawn in [1, tx_limit]
    inline transaction random_tx(hash_stream &rng, uint64_t tx_limit, uint32_t registers = 4)
    {
        uint64_t budget = rng.uniform_range(1, tx_limit);
        std::vector<machine_op> ops;
        while (budget > 0) {
            std::vector<op_kind> allowed;
            for (auto k: { op_kind::set, op_kind::add, op_kind::mul, op_kind::hashmix })
                if (op_cost(k) <= budget)
                    allowed.push_back(k);
            const auto k = allowed[rng.uniform_below(allowed.size())];
            const auto dst = reg(rng.uniform_below(registers));
            switch (k) {
                case op_kind::set: ops.push_back(machine_op::set(dst, static_cast<int64_t>(rng.uniform_below(1000)) - 500)); break;
                case op_kind::add: ops.push_back(machine_op::add(dst, reg(rng.uniform_below(registers)))); break;
                case op_kind::mul: ops.push_back(machine_op::mul(dst, reg(rng.uniform_below(registers)))); break;
                case op_kind::hashmix: ops.push_back(machine_op::hashmix(dst)); break;
            }
            budget -= op_cost(k);
        }
        return make_transaction(std::move(ops), rng.next_u64());
    }

    inline std::vector<transaction> random_txs(hash_stream &rng, size_t count, uint64_t tx_limit)
    {
        std::vector<transaction> out;
        for (size_t i = 0; i < count; ++i)
            out.push_back(random_tx(rng, tx_limit));
        return out;
    }

    struct executed_block {
        register_state start;
        std::vector<transaction> txs;
        block_execution_output out;
        execution_receipt receipt;
        node_identity executor;

        const execution_result &result() const { return receipt.result; }

        std::vector<transaction> chunk_txs(uint32_t i) const
        {
            const auto &ch = out.chunks;
            const size_t lo = ch[i].start_index;
            const size_t hi = i + 1 < ch.size() ? ch[i + 1].start_index : txs.size();
            return { txs.begin() + lo, txs.begin() + hi };
        }

        chunk_fetcher fetcher() const
        {
            return [this](const execution_receipt &, uint32_t i) -> std::optional<chunk_data> {
                if (i >= out.chunks.size())
                    return std::nullopt;
                return chunk_data { out.boundary_states[out.chunks[i].start_index], chunk_txs(i) };
            };
        }
    };

    inline execution_receipt make_receipt(const node_identity &ex, const execution_result &res,
                                          const std::vector<hash32> &zetas)
    {
        execution_receipt r;
        r.result = res;
        for (const auto &z: zetas)
            r.spocks.push_back(spock_create(z, ex.id));
        r.executor.signer = ex.id;
        r.executor.sig = sign(ex.sk, receipt_payload(r));
        return r;
    }

    inline executed_block execute_and_sign(const node_identity &ex, const register_state &start,
                                           std::vector<transaction> txs, const gas_schedule &g,
                                           const hash32 &block, const hash32 &previous_result,
                                           const std::optional<state_fault> &fault = {})
    {
        executed_block b;
        b.start = start;
        b.txs = std::move(txs);
        b.out = execute_block(start, b.txs, g, fault);
        b.executor = ex;
        execution_result res;
        res.block_hash = block;
        res.previous_result_hash = previous_result;
        res.chunks = b.out.chunks;
        res.final_state = state_commitment(b.out.final_state);
        b.receipt = make_receipt(ex, res, b.out.chunk_secrets);
        return b;
    }

    // standalone interpreter used as the serial-replay oracle
    inline std::map<std::string, int64_t> replay(std::map<std::string, int64_t> s, const std::vector<transaction> &txs)
    {
        const auto get = [&](const std::string &k) { return s.count(k) ? s[k] : 0; };
        for (const auto &tx: txs)
            for (const auto &op: tx.ops) {
                switch (op.kind) {
                    case op_kind::set: s[op.dst] = op.value; break;
                    case op_kind::add: s[op.dst] = static_cast<int64_t>(uint64_t(get(op.dst)) + uint64_t(get(op.src))); break;
                    case op_kind::mul: s[op.dst] = static_cast<int64_t>(uint64_t(get(op.dst)) * uint64_t(get(op.src))); break;
                    case op_kind::hashmix: {
                        uint8_t be[8];
                        const auto v = uint64_t(get(op.dst));
                        for (int i = 0; i < 8; ++i)
                            be[i] = uint8_t(v >> (56 - 8 * i));
                        const auto h = sha256(byte_span { be, 8 });
                        uint64_t x = 0;
                        for (int i = 0; i < 8; ++i)
                            x = (x << 8) | h[i];
                        s[op.dst] = static_cast<int64_t>(x & 0x7FFF'FFFF'FFFF'FFFFULL);
                        break;
                    }
                }
                if (s.count(op.dst) && s[op.dst] == 0)
                    s.erase(op.dst);
            }
        return s;
    }

    // index of the last transaction of chunk c
    inline uint32_t last_tx_of_chunk(const block_execution_output &o, uint32_t c, size_t tx_count)
    {
        return (c + 1 < o.chunks.size() ? o.chunks[c + 1].start_index : static_cast<uint32_t>(tx_count)) - 1;
    }
}

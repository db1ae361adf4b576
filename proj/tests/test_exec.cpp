#include <gtest/gtest.h>

#include "support.hpp"

using namespace sealnet;
using namespace sealnet::test;

namespace {

    // a transaction of `gas` SET ops
    transaction sets(uint64_t gas, uint64_t salt)
    {
        std::vector<machine_op> ops;
        for (uint64_t i = 0; i < gas; ++i)
            ops.push_back(machine_op::set("a", static_cast<int64_t>(salt * 100 + i)));
        return make_transaction(std::move(ops), salt);
    }

    chunk_check check_chunk(const block_execution_output &o, const std::vector<transaction> &txs, uint32_t i,
                            const gas_schedule &g)
    {
        const auto &ch = o.chunks;
        const bool last = i + 1 == ch.size();
        const size_t lo = ch[i].start_index, hi = last ? txs.size() : ch[i + 1].start_index;
        const std::vector<transaction> part(txs.begin() + lo, txs.begin() + hi);
        return verify_chunk(o.boundary_states[lo], part, ch[i].first_tx_gas,
                            last ? state_commitment(o.final_state) : ch[i + 1].start_state,
                            last ? no_next_chunk : ch[i + 1].first_tx_gas, ch[i].consumption, g);
    }
}

TEST(ExecuteTransaction, SpecExamples)
{
    const gas_schedule g { 10, 80 };
    auto r = execute_transaction({}, make_transaction({ machine_op::set("a", 5) }, 0), g);
    EXPECT_EQ(r.state, (register_state { { "a", 5 } }));
    EXPECT_EQ(r.gas, 1u);

    r = execute_transaction({ { "a", 2 } }, make_transaction({ machine_op::add("a", "a"), machine_op::mul("a", "a") }, 0), g);
    EXPECT_EQ(r.state.get("a"), 16);
    EXPECT_EQ(r.gas, 3u);

    const register_state s { { "b", 7 } };
    r = execute_transaction(s, make_transaction({}, 0), g);
    EXPECT_EQ(r.state, s);
    EXPECT_EQ(r.gas, 0u);
}

TEST(ExecuteTransaction, HashmixReference)
{
    const gas_schedule g { 10, 80 };
    EXPECT_EQ(execute_transaction({}, make_transaction({ machine_op::hashmix("a") }, 0), g).state.get("a"),
              3410756493081906042);
    EXPECT_EQ(execute_transaction({ { "a", 12345 } }, make_transaction({ machine_op::hashmix("a") }, 0), g).state.get("a"),
              8586772094747032661);
    EXPECT_EQ(op_cost(op_kind::hashmix), 5u);
}

TEST(ExecuteTransaction, RejectsGasViolations)
{
    const gas_schedule g { 4, 40 };
    EXPECT_THROW(execute_transaction({}, sets(5, 1), g), invalid_transaction);
    auto lying = sets(3, 1);
    lying.declared_gas = 2;
    EXPECT_THROW(execute_transaction({}, lying, g), invalid_transaction);
    std::vector<transaction> txs { sets(2, 1), sets(2, 2), lying };
    try {
        execute_block({}, txs, g);
        FAIL() << "expected invalid_transaction";
    } catch (const invalid_transaction &e) {
        EXPECT_EQ(e.index, 2u);
    }
}

TEST(StateCommitment, FixedValuesAndCanonicalZero)
{
    EXPECT_EQ(state_commitment({}).hex(), "df3f619804a92fdb4057192dc43dd748ea778adc52bc498ce80524c014b81119");
    EXPECT_EQ(state_commitment({ { "a", 1 }, { "b", -2 } }).hex(),
              "3e5c88ed7b70a0ea8186dbaa8b7a885625bd5f6ee388ecdf36791c272e04b47d");
    // a register set to zero is the same state as an absent one
    register_state s { { "a", 1 } };
    s.set("z", 0);
    EXPECT_EQ(state_commitment(s), state_commitment({ { "a", 1 } }));
}

TEST(StateCommitment, DistinctOnRandomCorpus)
{
    hash_stream rng { seed_from_u64(77) };
    std::set<hash32> seen;
    std::set<std::map<std::string, int64_t>> states;
    for (int i = 0; i < 2000; ++i) {
        register_state s;
        for (int k = 0; k < 3; ++k)
            s.set(reg(rng.uniform_below(5)), static_cast<int64_t>(rng.uniform_below(7)) - 3);
        if (states.insert(s.registers()).second)
            EXPECT_TRUE(seen.insert(state_commitment(s)).second);
    }
    EXPECT_EQ(seen.size(), states.size());
}

TEST(Chunking, SpecExamples)
{
    const auto run = [](std::vector<uint64_t> t, uint64_t tx, uint64_t ch) { return chunking(t, gas_schedule { tx, ch }); };
    EXPECT_EQ(run({ 5 }, 5, 10), (std::vector<chunk_span> { { 0, 5 } }));
    EXPECT_EQ(run({ 4, 4, 4 }, 5, 10), (std::vector<chunk_span> { { 0, 8 }, { 2, 4 } }));
    EXPECT_EQ(run({ 10, 10 }, 10, 10), (std::vector<chunk_span> { { 0, 10 }, { 1, 10 } }));
    EXPECT_TRUE(run({}, 5, 10).empty());
    EXPECT_THROW(run({ 3, 6 }, 5, 10), precondition_violation);
}

TEST(Chunking, SizeBoundsAndPartitionOnRandomStreams)
{
    hash_stream rng { seed_from_u64(2024) };
    for (int trial = 0; trial < 500; ++trial) {
        const uint64_t tx = 1 + rng.uniform_below(20);
        const uint64_t n = 1 + rng.uniform_below(12);
        const gas_schedule g { tx, tx * n };
        std::vector<uint64_t> t(1 + rng.uniform_below(200));
        for (auto &x: t)
            x = 1 + rng.uniform_below(tx);
        const auto c = chunking(t, g);
        ASSERT_FALSE(c.empty());
        ASSERT_EQ(c[0].start, 0u);
        for (size_t i = 0; i < c.size(); ++i) {
            const size_t hi = i + 1 < c.size() ? c[i + 1].start : t.size();
            ASSERT_LT(c[i].start, hi);
            uint64_t sum = 0;
            for (size_t k = c[i].start; k < hi; ++k)
                sum += t[k];
            ASSERT_EQ(sum, c[i].consumption);
            ASSERT_LE(c[i].consumption, g.chunk_limit);
            ASSERT_GT(c[i].consumption, 0u);
            // (1 - 1/n)·Γ_chunk < c, in integers
            if (i + 1 < c.size())
                ASSERT_GT(c[i].consumption * n, (n - 1) * g.chunk_limit);
        }
    }
}

TEST(ExecuteBlock, EmptyBlock)
{
    const register_state s { { "a", 3 } };
    const auto o = execute_block(s, {}, gas_schedule { 10, 80 });
    EXPECT_EQ(o.final_state, s);
    EXPECT_TRUE(o.chunks.empty());
    EXPECT_TRUE(o.chunk_secrets.empty());
    EXPECT_EQ(o.boundary_states.size(), 1u);
}

TEST(ExecuteBlock, MatchesSerialReplayOracle)
{
    const gas_schedule g { 3, 6 };
    const std::vector<transaction> txs { make_transaction({ machine_op::set("a", 2) }, 1),
                                         make_transaction({ machine_op::add("a", "a"), machine_op::mul("a", "a") }, 2),
                                         make_transaction({ machine_op::set("b", 3), machine_op::mul("a", "b") }, 3) };
    const auto o = execute_block({}, txs, g);
    EXPECT_EQ(o.final_state, (register_state { { "a", 48 }, { "b", 3 } }));
    EXPECT_EQ(o.tx_gas, (std::vector<uint64_t> { 1, 3, 3 }));
    ASSERT_EQ(o.chunks.size(), 2u);

    hash_stream rng { seed_from_u64(99) };
    for (int trial = 0; trial < 50; ++trial) {
        const gas_schedule gg { 10, 10 * (1 + rng.uniform_below(8)) };
        const auto rt = random_txs(rng, 1 + rng.uniform_below(60), gg.tx_limit);
        const auto out = execute_block({ { "a", 1 } }, rt, gg);
        ASSERT_EQ(out.final_state.registers(), replay({ { "a", 1 } }, rt));
    }
}

TEST(ExecuteBlock, DeterministicAndInterimChainsLinkUp)
{
    hash_stream rng { seed_from_u64(5) };
    const gas_schedule g { 10, 40 };
    const auto txs = random_txs(rng, 40, g.tx_limit);
    const auto a = execute_block({}, txs, g), b = execute_block({}, txs, g);
    EXPECT_EQ(a.chunks, b.chunks);
    EXPECT_EQ(a.chunk_secrets, b.chunk_secrets);
    EXPECT_EQ(a.interim_commitments, b.interim_commitments);
    ASSERT_EQ(a.chunk_secrets.size(), a.chunks.size());
    for (size_t i = 0; i + 1 < a.chunks.size(); ++i) {
        EXPECT_EQ(a.interim_commitments[i].back(), a.interim_commitments[i + 1].front());
        EXPECT_EQ(a.interim_commitments[i].front(), a.chunks[i].start_state);
    }
    EXPECT_EQ(a.interim_commitments.back().back(), state_commitment(a.final_state));

    // per-chunk execution from the recorded boundaries reproduces the final state
    register_state s = a.boundary_states[a.chunks[2].start_index];
    for (size_t t = a.chunks[2].start_index; t < txs.size(); ++t)
        s = execute_transaction(s, txs[t], g).state;
    EXPECT_EQ(s, a.final_state);
}

TEST(ExecuteBlock, FaultShiftsOneRegisterAfterGivenTx)
{
    hash_stream rng { seed_from_u64(6) };
    const gas_schedule g { 10, 40 };
    const auto txs = random_txs(rng, 30, g.tx_limit);
    const auto honest = execute_block({}, txs, g);
    const auto bad = execute_block({}, txs, g, state_fault { 12, "a", 1 });
    EXPECT_EQ(honest.chunks.front(), bad.chunks.front());
    EXPECT_EQ(honest.boundary_states[12], bad.boundary_states[12]);
    EXPECT_NE(honest.boundary_states[13], bad.boundary_states[13]);
    EXPECT_EQ(bad.tx_gas, honest.tx_gas);
    EXPECT_THROW(execute_block({}, txs, g, state_fault { 30, "a", 1 }), precondition_violation);
}

TEST(VerifyChunk, HonestChunksPassWithExecutorZeta)
{
    hash_stream rng { seed_from_u64(8) };
    for (int trial = 0; trial < 20; ++trial) {
        const gas_schedule g { 10, 10 * (1 + rng.uniform_below(6)) };
        const auto txs = random_txs(rng, 5 + rng.uniform_below(50), g.tx_limit);
        const auto o = execute_block({}, txs, g);
        for (uint32_t i = 0; i < o.chunks.size(); ++i) {
            const auto c = check_chunk(o, txs, i, g);
            ASSERT_TRUE(c.ok()) << verdict_name(c.verdict);
            ASSERT_EQ(c.zeta, o.chunk_secrets[i]);
            ASSERT_EQ(c.interim_commitments, o.interim_commitments[i]);
        }
    }
}

TEST(VerifyChunk, EachAssertionHasItsVerdict)
{
    const gas_schedule g { 5, 10 };
    const std::vector<transaction> two { sets(4, 1), sets(4, 2) };
    const auto end = state_commitment(execute_block({}, two, g).final_state);

    EXPECT_EQ(verify_chunk({}, two, 4, end, no_next_chunk, 8, g).verdict, chunk_verdict::ok);
    EXPECT_EQ(verify_chunk({}, two, 3, end, no_next_chunk, 8, g).verdict, chunk_verdict::bad_tau0);
    EXPECT_EQ(verify_chunk({}, two, 4, end, no_next_chunk, 7, g).verdict, chunk_verdict::bad_consumption);
    // c + τ₀' = 10 is not > Γ_chunk: the executor could have packed the next transaction
    EXPECT_EQ(verify_chunk({}, two, 4, end, 2, 8, g).verdict, chunk_verdict::under_full);
    EXPECT_EQ(verify_chunk({}, two, 4, end, 3, 8, g).verdict, chunk_verdict::ok);
    auto flipped = end;
    flipped[0] ^= 1;
    EXPECT_EQ(verify_chunk({}, two, 4, flipped, no_next_chunk, 8, g).verdict, chunk_verdict::bad_final_state);

    const std::vector<transaction> three { sets(4, 1), sets(4, 2), sets(4, 3) };
    const auto end3 = state_commitment(execute_block({}, three, gas_schedule { 5, 20 }).final_state);
    EXPECT_EQ(verify_chunk({}, three, 4, end3, no_next_chunk, 12, g).verdict, chunk_verdict::over_limit);
}

TEST(VerifyChunk, CorruptionFlagsExactlyTheContainingChunk)
{
    hash_stream rng { seed_from_u64(9) };
    const gas_schedule g { 10, 30 };
    const auto txs = random_txs(rng, 40, g.tx_limit);
    const auto o = execute_block({}, txs, g);
    const auto n = static_cast<uint32_t>(o.chunks.size());
    ASSERT_GE(n, 4u);
    for (uint32_t target = 0; target < n; ++target) {
        for (int field = 0; field < 2; ++field) {
            auto bad = o;
            if (field == 0)
                bad.chunks[target].consumption ^= 1;
            else if (target + 1 < n)
                bad.chunks[target + 1].start_state[7] ^= 0x10; // end commitment of `target`
            else
                bad.final_state.set("a", bad.final_state.get("a") ^ 1);
            for (uint32_t i = 0; i < n; ++i) {
                const auto c = check_chunk(bad, txs, i, g);
                EXPECT_EQ(c.ok(), i != target) << "field " << field << " target " << target << " chunk " << i;
            }
        }
    }
}

TEST(VerifyChunk, ZetaIsReplayBound)
{
    hash_stream rng { seed_from_u64(10) };
    const gas_schedule g { 10, 40 };
    auto txs = random_txs(rng, 12, g.tx_limit);
    const auto o = execute_block({}, txs, g);
    const std::vector<transaction> part(txs.begin(), txs.begin() + o.chunks[1].start_index);
    const auto honest = verify_chunk({}, part, o.chunks[0].first_tx_gas, o.chunks[1].start_state,
                                     o.chunks[1].first_tx_gas, o.chunks[0].consumption, g);
    EXPECT_EQ(honest.zeta, o.chunk_secrets[0]);
    // different start state, same ops
    const auto moved = verify_chunk({ { "q", 1 } }, part, o.chunks[0].first_tx_gas, o.chunks[1].start_state,
                                    o.chunks[1].first_tx_gas, o.chunks[0].consumption, g);
    EXPECT_NE(moved.zeta, o.chunk_secrets[0]);
    // one op changed, same gas and same end state
    const gas_schedule g2 { 5, 10 };
    const std::vector<transaction> x { make_transaction({ machine_op::set("a", 1), machine_op::set("a", 2) }, 1) };
    const std::vector<transaction> y { make_transaction({ machine_op::set("a", 3), machine_op::set("a", 2) }, 1) };
    const auto end = state_commitment({ { "a", 2 } });
    const auto cx = verify_chunk({}, x, 2, end, no_next_chunk, 2, g2), cy = verify_chunk({}, y, 2, end, no_next_chunk, 2, g2);
    EXPECT_TRUE(cx.ok());
    EXPECT_TRUE(cy.ok());
    EXPECT_NE(cx.zeta, cy.zeta);
}

#include <gtest/gtest.h>

#include <sealnet/json.hpp>

#include "support.hpp"

using namespace sealnet;
using namespace sealnet::test;

namespace {

    // Randomized instances of the wire records, for the round-trip suites.
    struct record_gen {
        hash_stream rng;
        explicit record_gen(uint64_t seed): rng { seed_from_u64(seed) } {}

        hash32 h()
        {
            hash32 x;
            for (size_t i = 0; i < 32; i += 8) {
                const auto v = rng.next_u64();
                for (size_t j = 0; j < 8; ++j)
                    x[i + j] = static_cast<uint8_t>(v >> (8 * j));
            }
            return x;
        }
        signature sig()
        {
            signature s;
            const auto a = h(), b = h();
            std::copy(a.begin(), a.end(), s.begin());
            std::copy(b.begin(), b.end(), s.begin() + 32);
            return s;
        }
        uint32_t small() { return static_cast<uint32_t>(rng.uniform_below(4)); }
        node_id id() { return { static_cast<role>(rng.uniform_below(4)), static_cast<uint32_t>(rng.uniform_below(50)), h() }; }
        signed_by sb() { return { id(), sig() }; }
        waiting_proof wp() { return { h(), rng.uniform_below(1000), h() }; }
        chunk ch() { return { h(), rng.uniform_below(10), small(), rng.uniform_below(100) }; }
        spock sp() { return { h(), sig() }; }

        execution_result result()
        {
            execution_result r { h(), h(), {}, h() };
            for (uint32_t i = small(); i > 0; --i)
                r.chunks.push_back(ch());
            return r;
        }
        execution_receipt receipt()
        {
            execution_receipt r;
            r.result = result();
            for (size_t i = 0; i < r.result.chunks.size(); ++i)
                r.spocks.push_back(sp());
            for (uint32_t i = small(); i > 0; --i)
                r.mcas.push_back({ h(), id(), wp(), sig() });
            r.executor = sb();
            return r;
        }
        faulty_computation_challenge fcc()
        {
            faulty_computation_challenge c;
            c.receipt_hash = h();
            c.chunk_index = small();
            c.claimed_fault = static_cast<chunk_verdict>(rng.uniform_below(6));
            c.assignment.chunk_indices = { small(), small() };
            c.assignment.selection_proof = sig();
            for (uint32_t i = small() + 1; i > 0; --i)
                c.state_commitments.push_back(h());
            c.verifier = sb();
            return c;
        }
        missing_collection_challenge mcc() { return { h(), h(), id(), sig() }; }
        transaction tx()
        {
            transaction t;
            t.id = h();
            t.ops = { machine_op::set("a", static_cast<int64_t>(rng.next_u64())), machine_op::add("b", "c"),
                      machine_op::mul("d", "a"), machine_op::hashmix("e") };
            t.declared_gas = rng.uniform_below(20);
            return t;
        }
        block blk()
        {
            block b;
            b.height = rng.uniform_below(1000);
            b.previous_block_hash = h();
            b.entropy = h();
            for (uint32_t i = small(); i > 0; --i)
                b.collections.push_back({ h(), small(), { sb(), sb() } });
            for (uint32_t i = small(); i > 0; --i)
                b.seals.push_back({ h(), h(), { sb() }, { sb(), sb() }, wp() });
            b.challenges.push_back(fcc());
            b.challenges.push_back(mcc());
            for (uint32_t i = small(); i > 0; --i)
                b.updates.push_back({ h(), static_cast<verdict>(rng.uniform_below(5)), id(), rng.uniform_below(100),
                                      rng.uniform_below(2) ? std::optional { wp() } : std::nullopt });
            b.consensus_sigs = { sb() };
            return b;
        }
        result_approval approval()
        {
            result_approval a;
            a.attestation = { h(), sig() };
            a.proof.chunk_indices = { small(), small() };
            a.proof.selection_proof = sig();
            a.proof.spocks = { sp(), sp() };
            a.verifier = sb();
            return a;
        }
    };

    template <typename T>
    void roundtrip_binary_and_json(const T &v)
    {
        const auto b = serialize(v);
        EXPECT_EQ(deserialize<T>(b), v);
        EXPECT_EQ(serialize(v), b);
        json j = v;
        T back = j.get<T>();
        EXPECT_EQ(back, v);
        EXPECT_EQ(json(back).dump(), j.dump());
    }

    node_id verifier_id(uint32_t i) { return make_identity(role::verification, i).id; }

    stake_ledger equal_verifiers(uint32_t n, uint64_t each = 10)
    {
        stake_ledger l;
        for (uint32_t i = 0; i < n; ++i)
            l.stake(verifier_id(i), each);
        return l;
    }
}

TEST(Hex, RoundTripAndRejectsOddLength)
{
    const bytes b { 0x00, 0xab, 0xff, 0x10 };
    EXPECT_EQ(to_hex(b), "00abff10");
    EXPECT_EQ(from_hex("00ABff10"), b);
    EXPECT_THROW(from_hex("abc"), decode_error);
    EXPECT_THROW(from_hex("zz"), decode_error);
    EXPECT_THROW(hash32::from_hex("00ab"), decode_error);
}

TEST(Sha256, KnownVector)
{
    EXPECT_EQ(sha256("abc").hex(), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
    hasher h;
    const std::string a = "ab", c = "c";
    h.update(byte_span { reinterpret_cast<const uint8_t *>(a.data()), a.size() });
    h.update(byte_span { reinterpret_cast<const uint8_t *>(c.data()), c.size() });
    EXPECT_EQ(h.finalize(), sha256("abc"));
}

TEST(Signatures, Rfc8032FirstVector)
{
    const auto kp = keypair_from_seed(hash32::from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac031cae7f60"));
    EXPECT_EQ(kp.pk.hex(), "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
    const auto s = sign(kp.sk, {});
    EXPECT_EQ(s.hex(), "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e065224901555fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
    EXPECT_TRUE(verify(kp.pk, {}, s));
}

TEST(Signatures, RoundTripDeterministicAndWrongMessage)
{
    const auto kp = keypair_from_seed(sha256("seed"));
    EXPECT_EQ(keypair_from_seed(sha256("seed")), kp);
    const bytes m { 1, 2, 3 }, m2 { 1, 2, 4 };
    const auto s = sign(kp.sk, m);
    EXPECT_EQ(sign(kp.sk, m), s);
    EXPECT_TRUE(verify(kp.pk, m, s));
    EXPECT_FALSE(verify(kp.pk, m2, s));
    EXPECT_FALSE(verify(keypair_from_seed(sha256("other")).pk, m, s));
}

TEST(Signatures, MalformedKeysVerifyFalse)
{
    const auto kp = keypair_from_seed(sha256("seed"));
    const bytes m { 9 };
    const auto s = sign(kp.sk, m);
    // not a curve point
    public_key junk;
    junk.data.fill(0xff);
    EXPECT_FALSE(verify(junk, m, s));
    EXPECT_FALSE(verify(public_key {}, m, s));
    const bytes short_key(kp.pk.begin(), kp.pk.begin() + 31);
    EXPECT_FALSE(verify(short_key, m, s.span()));
    EXPECT_FALSE(verify(kp.pk.span(), m, byte_span { s.data.data(), 63 }));
    EXPECT_TRUE(verify(kp.pk.span(), m, s.span()));
}

TEST(HashStream, MatchesReferenceWords)
{
    hash_stream r { seed_from_u64(0) };
    const uint64_t want[] = { 7289466843766394283ULL, 9447713087488499971ULL, 10300031331021078574ULL,
                              11299424935586203957ULL, 12033775969807339346ULL };
    for (auto w: want)
        EXPECT_EQ(r.next_u64(), w);
    EXPECT_EQ(r.words_drawn(), 5u);
}

TEST(HashStream, DeriveSeedReference)
{
    EXPECT_EQ(derive_seed(hash32 {}, "delay", 7).hex(), "9550b3e8281cf305f3d2f6bcf607373fe25b3914dccd112ec70c30505f1e58d5");
    EXPECT_NE(derive_seed(hash32 {}, "delay", 7), derive_seed(hash32 {}, "delay", 8));
    EXPECT_NE(derive_seed(hash32 {}, "delay", 7), derive_seed(hash32 {}, "delax", 7));
}

TEST(HashStream, FisherYatesReference)
{
    hash_stream r { seed_from_u64(42) };
    EXPECT_EQ(fisher_yates_prefix(10, r, 10), (std::vector<uint32_t> { 6, 7, 9, 4, 5, 3, 2, 8, 0, 1 }));
}

TEST(HashStream, UniformRangeBoundsAndErrors)
{
    hash_stream r { seed_from_u64(3) };
    for (int i = 0; i < 1000; ++i) {
        const auto v = r.uniform_range(25, 100);
        ASSERT_GE(v, 25u);
        ASSERT_LE(v, 100u);
        const auto d = r.uniform01();
        ASSERT_GE(d, 0.0);
        ASSERT_LT(d, 1.0);
    }
    EXPECT_THROW(r.uniform_below(0), precondition_violation);
    EXPECT_THROW(r.uniform_range(5, 4), precondition_violation);
}

TEST(Codec, RoundTripRandomizedRecords)
{
    record_gen g { 11 };
    for (int i = 0; i < 60; ++i) {
        roundtrip_binary_and_json(g.blk());
        roundtrip_binary_and_json(g.receipt());
        roundtrip_binary_and_json(g.approval());
        roundtrip_binary_and_json(g.fcc());
        roundtrip_binary_and_json(g.mcc());
        roundtrip_binary_and_json(g.tx());
        roundtrip_binary_and_json(faulty_computation_response { g.h(), { g.h(), g.h() }, g.sb() });
        roundtrip_binary_and_json(missing_collection_attestation { g.h(), g.id(), g.wp(), g.sig() });
        roundtrip_binary_and_json(collection { { g.tx(), g.tx() } });
    }
}

TEST(Codec, AnyFieldChangeChangesBytes)
{
    record_gen g { 12 };
    const auto base = g.blk();
    const auto b0 = serialize(base);
    auto v = base;
    v.height += 1;
    EXPECT_NE(serialize(v), b0);
    v = base;
    v.entropy[31] ^= 1;
    EXPECT_NE(serialize(v), b0);
    v = base;
    v.updates.push_back({});
    EXPECT_NE(serialize(v), b0);
    v = base;
    std::get<faulty_computation_challenge>(v.challenges[0]).chunk_index += 1;
    EXPECT_NE(serialize(v), b0);
    v = base;
    v.consensus_sigs[0].sig[0] ^= 1;
    EXPECT_NE(serialize(v), b0);
    // the block hash deliberately skips consensus signatures
    EXPECT_EQ(block_hash(v), block_hash(base));

    // strings are length-prefixed, so moving a byte across a boundary is visible
    const auto t1 = machine_op::add("ab", "c"), t2 = machine_op::add("a", "bc");
    EXPECT_NE(serialize(t1), serialize(t2));
}

TEST(Codec, IntegersAreBigEndianFixedWidth)
{
    encoder e;
    e.u32(0x01020304);
    e.u64(5);
    e.str("hi");
    EXPECT_EQ(to_hex(e.out()), "01020304" "0000000000000005" "00000002" "6869");
}

TEST(Codec, MalformedInputThrows)
{
    record_gen g { 13 };
    const auto b = serialize(g.blk());
    for (size_t cut: { size_t { 0 }, size_t { 1 }, b.size() / 2, b.size() - 1 })
        EXPECT_THROW(deserialize<block>(byte_span { b.data(), cut }), decode_error) << cut;
    auto extra = b;
    extra.push_back(0);
    EXPECT_THROW(deserialize<block>(extra), decode_error);

    // unknown variant tag / enum value
    auto op = serialize(machine_op::set("a", 1));
    op[0] = 9;
    EXPECT_THROW(deserialize<machine_op>(op), decode_error);
    auto rl = serialize(role::execution);
    rl[0] = 4;
    EXPECT_THROW(deserialize<role>(rl), decode_error);

    // absurd sequence length does not allocate
    const bytes huge { 0xff, 0xff, 0xff, 0xff };
    EXPECT_THROW(deserialize<std::vector<hash32>>(huge), decode_error);
}

TEST(Json, RejectsBadEnumsAndHex)
{
    EXPECT_THROW(json("Nope").get<verdict>(), std::exception);
    EXPECT_THROW(json("xyz").get<hash32>(), decode_error);
    EXPECT_EQ(json(verdict::executor_slashed).get<std::string>(), "ExecutorSlashed");
    EXPECT_EQ(role_from_name("verification"), role::verification);
}

TEST(StakeFraction, SpecExamples)
{
    auto l = equal_verifiers(4);
    const std::vector three { verifier_id(0), verifier_id(1), verifier_id(2) };
    EXPECT_TRUE(stake_fraction_met(three, role::verification, { 2, 3 }, l, threshold_mode::strictly_more));

    auto l3 = equal_verifiers(3);
    const std::vector two { verifier_id(0), verifier_id(1) };
    EXPECT_FALSE(stake_fraction_met(two, role::verification, { 2, 3 }, l3, threshold_mode::strictly_more));
    EXPECT_TRUE(stake_fraction_met(two, role::verification, { 2, 3 }, l3, threshold_mode::at_least));

    stake_ledger w;
    const uint64_t stakes[] = { 10, 10, 10, 70 };
    for (uint32_t i = 0; i < 4; ++i)
        w.stake(verifier_id(i), stakes[i]);
    const std::vector big { verifier_id(3) };
    EXPECT_TRUE(stake_fraction_met(big, role::verification, { 2, 3 }, w, threshold_mode::strictly_more));
}

TEST(StakeFraction, DuplicatesCountOnceAndErrors)
{
    auto l = equal_verifiers(3);
    const std::vector dup { verifier_id(0), verifier_id(0), verifier_id(0) };
    EXPECT_FALSE(stake_fraction_met(dup, role::verification, { 1, 2 }, l, threshold_mode::strictly_more));
    const std::vector unknown { verifier_id(7) };
    EXPECT_THROW(stake_fraction_met(unknown, role::verification, { 2, 3 }, l, threshold_mode::strictly_more), ledger_error);
    const std::vector wrong_role { make_identity(role::execution, 0).id };
    l.stake(wrong_role[0], 10);
    EXPECT_THROW(stake_fraction_met(wrong_role, role::verification, { 2, 3 }, l, threshold_mode::strictly_more), ledger_error);
}

TEST(StakeFraction, MonotoneInSigners)
{
    hash_stream rng { seed_from_u64(5) };
    for (int trial = 0; trial < 200; ++trial) {
        stake_ledger l;
        const uint32_t n = 2 + static_cast<uint32_t>(rng.uniform_below(8));
        for (uint32_t i = 0; i < n; ++i)
            l.stake(verifier_id(i), 1 + rng.uniform_below(50));
        std::vector<node_id> signers;
        bool was = false;
        for (auto i: fisher_yates_prefix(n, rng, n)) {
            signers.push_back(verifier_id(i));
            const bool now = stake_fraction_met(signers, role::verification, { 2, 3 }, l, threshold_mode::strictly_more);
            ASSERT_FALSE(was && !now);
            was = now;
        }
        EXPECT_TRUE(was);
    }
}

TEST(StakeLedger, SlashClampsAndLogsEveryChange)
{
    stake_ledger l;
    const auto a = verifier_id(0);
    l.stake(a, 30, 0);
    l.stake(a, 5, 2);
    EXPECT_EQ(l.stake_of(a), 35u);
    EXPECT_EQ(l.slash(a, 10, "fine", 3), 10u);
    EXPECT_EQ(l.slash(a, 100, "large", 4), 25u);
    EXPECT_EQ(l.stake_of(a), 0u);
    ASSERT_EQ(l.staking_log().size(), 2u);
    ASSERT_EQ(l.slashing_log().size(), 2u);
    EXPECT_EQ(l.slashing_log()[1].amount, 25u);
    EXPECT_EQ(l.slashing_log()[1].height, 4u);
    uint64_t net = 0;
    for (const auto &e: l.staking_log())
        net += e.amount;
    for (const auto &e: l.slashing_log())
        net -= e.amount;
    EXPECT_EQ(net, l.stake_of(a));
    EXPECT_THROW(l.slash(verifier_id(9), 1, "x", 1), ledger_error);
    EXPECT_THROW(l.stake_of(verifier_id(9)), ledger_error);
    EXPECT_EQ(l.find(role::verification, 0), a);
}

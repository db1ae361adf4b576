#include <set>

#include <sealnet/challenges.hpp>
#include <sealnet/codec.hpp>
#include <sealnet/rng.hpp>
#include <sealnet/vdf.hpp>

namespace sealnet {

    faulty_computation_challenge make_fcc(const node_identity &verifier, const execution_receipt &receipt,
                                          const chunk_assignment &assignment, uint32_t chunk_index,
                                          chunk_verdict claimed, std::vector<hash32> commitments)
    {
        if (std::find(assignment.indices.begin(), assignment.indices.end(), chunk_index) == assignment.indices.end())
            throw precondition_violation("chunk {} is not in the verifier's assignment", chunk_index);
        if (claimed == chunk_verdict::ok)
            throw precondition_violation("cannot challenge a chunk that verified");
        faulty_computation_challenge c;
        c.receipt_hash = receipt_hash(receipt);
        c.chunk_index = chunk_index;
        c.claimed_fault = claimed;
        c.assignment = { assignment.indices, assignment.proof };
        c.state_commitments = std::move(commitments);
        c.verifier.signer = verifier.id;
        c.verifier.sig = sign(verifier.sk, fcc_payload(c));
        return c;
    }

    bool fcc_authentic(const faulty_computation_challenge &c, const execution_receipt &receipt, double eta)
    {
        const auto &v = c.verifier.signer;
        if (v.r != role::verification || c.receipt_hash != receipt_hash(receipt))
            return false;
        if (c.chunk_index >= receipt.result.chunks.size())
            return false;
        if (!verify(v.key, fcc_payload(c), c.verifier.sig))
            return false;
        const auto &L = c.assignment.chunk_indices;
        if (std::find(L.begin(), L.end(), c.chunk_index) == L.end())
            return false;
        return verify_selection_proof(receipt.result, v.key, c.assignment.selection_proof, L, eta);
    }

    faulty_computation_response make_fcr(const node_identity &executor, const faulty_computation_challenge &c,
                                         std::vector<hash32> commitments)
    {
        faulty_computation_response r;
        r.challenge_hash = challenge_hash(c);
        r.state_commitments = std::move(commitments);
        r.executor.signer = executor.id;
        r.executor.sig = sign(executor.sk, fcr_payload(r));
        return r;
    }

    std::optional<size_t> first_mismatch(std::span<const hash32> a, std::span<const hash32> b)
    {
        if (a.size() != b.size())
            throw malformed_response(fmt::format("commitment lists differ in length ({} vs {})", a.size(), b.size()));
        for (size_t i = 0; i < a.size(); ++i)
            if (a[i] != b[i])
                return i;
        return std::nullopt;
    }

    static const hash32 &published_end(const execution_result &r, uint32_t i)
    {
        return i + 1 < r.chunks.size() ? r.chunks[i + 1].start_state : r.final_state;
    }

    static adjudication_outcome outcome_for(const faulty_computation_challenge &c, const execution_receipt &receipt,
                                            bool executor_wrong, std::string note)
    {
        adjudication_outcome o;
        o.challenge_id = challenge_hash(c);
        o.outcome = executor_wrong ? verdict::executor_slashed : verdict::challenger_slashed;
        o.penalized.push_back(executor_wrong ? receipt.executor.signer : c.verifier.signer);
        o.evidence.note = std::move(note);
        return o;
    }

    adjudication_outcome adjudicate_fcc_static(const faulty_computation_challenge &c, const execution_receipt &receipt,
                                               std::span<const transaction> chunk_txs, const gas_schedule &g)
    {
        const auto &res = receipt.result;
        if (c.chunk_index >= res.chunks.size())
            return outcome_for(c, receipt, false, "chunk index out of range");
        const auto &ch = res.chunks[c.chunk_index];
        if (chunk_txs.empty())
            throw precondition_violation("static adjudication needs the chunk's transactions");
        uint64_t total = 0;
        for (const auto &tx: chunk_txs)
            total += gas_of(tx.ops);
        const bool last = c.chunk_index + 1 == res.chunks.size();
        bool executor_wrong = false;
        switch (c.claimed_fault) {
            case chunk_verdict::bad_tau0:
                executor_wrong = gas_of(chunk_txs.front().ops) != ch.first_tx_gas;
                break;
            case chunk_verdict::bad_consumption:
                executor_wrong = total != ch.consumption;
                break;
            case chunk_verdict::over_limit:
                executor_wrong = ch.consumption > g.chunk_limit;
                break;
            case chunk_verdict::under_full:
                executor_wrong = !last && ch.consumption + res.chunks[c.chunk_index + 1].first_tx_gas <= g.chunk_limit;
                break;
            default:
                throw precondition_violation("{} is not a gas claim", verdict_name(c.claimed_fault));
        }
        return outcome_for(c, receipt, executor_wrong, fmt::format("static check {}", verdict_name(c.claimed_fault)));
    }

    std::optional<adjudication_outcome> fcc_precheck(const faulty_computation_challenge &c, const execution_receipt &receipt,
                                                     size_t chunk_tx_count)
    {
        const auto &res = receipt.result;
        if (c.chunk_index >= res.chunks.size())
            return outcome_for(c, receipt, false, "chunk index out of range");
        const auto &cs = c.state_commitments;
        if (cs.size() != chunk_tx_count + 1)
            return outcome_for(c, receipt, false, "challenge commitment list has the wrong length");
        if (cs.front() != res.chunks[c.chunk_index].start_state)
            return outcome_for(c, receipt, false, "challenge disputes the published chunk start");
        if (cs.back() == published_end(res, c.chunk_index))
            return outcome_for(c, receipt, false, "challenge agrees with the published end state");
        return std::nullopt;
    }

    adjudication_outcome adjudicate_fcc(const faulty_computation_challenge &c, const execution_receipt &receipt,
                                        const fcc_reply &reply, std::span<const transaction> chunk_txs,
                                        const state_lookup &states, const gas_schedule &g)
    {
        if (auto bad = fcc_precheck(c, receipt, chunk_txs.size()))
            return *bad;
        const auto id = challenge_hash(c);
        if (const auto *wp = std::get_if<waiting_proof>(&reply)) {
            auto o = outcome_for(c, receipt, true, "no response within the window");
            o.proof = *wp;
            return o;
        }
        const auto &r = std::get<faulty_computation_response>(reply);
        const auto &res = receipt.result;
        if (r.challenge_hash != id || r.executor.signer != receipt.executor.signer
            || !verify(r.executor.signer.key, fcr_payload(r), r.executor.sig))
            return outcome_for(c, receipt, true, "response not authenticated by the receipt's executor");
        const auto &mine = r.state_commitments;
        if (mine.size() != c.state_commitments.size())
            return outcome_for(c, receipt, true, "response commitment list has the wrong length");
        if (mine.front() != res.chunks[c.chunk_index].start_state || mine.back() != published_end(res, c.chunk_index))
            return outcome_for(c, receipt, true, "response contradicts the executor's own receipt");

        const auto l = *first_mismatch(c.state_commitments, mine);
        // precheck pins position 0 for both parties, and the last entries differ
        const auto input = states(mine[l - 1]);
        if (!input || state_commitment(*input) != mine[l - 1]) {
            auto o = outcome_for(c, receipt, true, "executor did not supply the agreed input state");
            o.evidence.mismatch_index = static_cast<uint32_t>(l);
            return o;
        }
        const auto after = state_commitment(execute_transaction(*input, chunk_txs[l - 1], g).state);
        const bool exec_ok = mine[l] == after;
        const bool chal_ok = c.state_commitments[l] == after;

        adjudication_outcome o;
        o.challenge_id = id;
        o.evidence.mismatch_index = static_cast<uint32_t>(l);
        o.evidence.recomputed = after;
        if (!exec_ok) {
            o.outcome = verdict::executor_slashed;
            o.penalized.push_back(receipt.executor.signer);
            o.evidence.note = "executor's commitment differs from recomputation";
        } else {
            o.outcome = verdict::challenger_slashed;
            o.evidence.note = "challenger's commitment differs from recomputation";
        }
        if (!chal_ok)
            o.penalized.push_back(c.verifier.signer);
        if (!exec_ok && !chal_ok)
            o.evidence.note = "neither party matches recomputation";
        return o;
    }

    // --- missing collection ------------------------------------------------

    missing_collection_challenge make_mcc(const node_identity &executor, const hash32 &block_hash,
                                          const hash32 &collection_hash)
    {
        missing_collection_challenge c;
        c.block_hash = block_hash;
        c.collection_hash = collection_hash;
        c.challenger = executor.id;
        c.sig = sign(executor.sk, mcc_payload(c));
        return c;
    }

    bool mcc_authentic(const missing_collection_challenge &c)
    {
        return c.challenger.r == role::execution && verify(c.challenger.key, mcc_payload(c), c.sig);
    }

    std::vector<node_id> mcc_probe_plan(const node_id &collector, std::span<const node_id> guarantors,
                                        uint32_t kappa_probe, const hash32 &challenge_seed)
    {
        encoder e;
        encode(e, challenge_seed);
        encode(e, collector);
        hash_stream rng { sha256(e.out()) };
        const auto picks = fisher_yates_prefix(static_cast<uint32_t>(guarantors.size()), rng, kappa_probe);
        std::vector<node_id> out;
        out.reserve(picks.size());
        for (auto i: picks)
            out.push_back(guarantors[i]);
        return out;
    }

    missing_collection_attestation make_mca(const node_identity &collector, const hash32 &collection_hash,
                                            const waiting_proof &proof)
    {
        missing_collection_attestation a;
        a.collection_hash = collection_hash;
        a.attestor = collector.id;
        a.proof = proof;
        a.sig = sign(collector.sk, mca_payload(a));
        return a;
    }

    mcc_tally_result mcc_tally(const missing_collection_challenge &c, std::span<const missing_collection_attestation> mcas,
                               const stake_ledger &ledger, bool collection_surfaced, const mcc_tally_params &p)
    {
        mcc_tally_result r;
        const auto id = challenge_hash(c);
        const auto in = [](std::span<const node_id> s, const node_id &n) {
            return std::find(s.begin(), s.end(), n) != s.end();
        };
        std::set<node_id> seen;
        std::vector<node_id> attestors;
        for (const auto &a: mcas) {
            const bool ok = a.collection_hash == c.collection_hash
                && a.attestor.r == role::collector
                && ledger.contains(a.attestor)
                && !in(p.challenged_cluster, a.attestor)
                && !in(p.guarantors, a.attestor)
                && verify(a.attestor.key, mca_payload(a), a.sig)
                && waiting_proof_verify(a.proof, id, p.delta_t, p.vdf_rate)
                && seen.insert(a.attestor).second;
            if (!ok) {
                ++r.rejected;
                continue;
            }
            r.counted.push_back(a);
            attestors.push_back(a.attestor);
        }

        adjudication_outcome fines;
        fines.challenge_id = id;
        fines.outcome = verdict::fines_applied;
        fines.penalized.assign(p.executors.begin(), p.executors.end());
        fines.penalized.insert(fines.penalized.end(), p.guarantors.begin(), p.guarantors.end());

        if (collection_surfaced) {
            r.status = mcc_status::resolved;
            adjudication_outcome resolved;
            resolved.challenge_id = id;
            resolved.outcome = verdict::collection_resolved;
            r.outcomes.push_back(std::move(resolved));
            r.outcomes.push_back(std::move(fines));
        } else if (stake_fraction_met(attestors, role::collector, { 2, 3 }, ledger, threshold_mode::strictly_more)) {
            r.status = mcc_status::accepted;
            r.outcomes.push_back(std::move(fines));
        }
        return r;
    }

    adjudication_outcome mcc_cluster_slash(const missing_collection_challenge &c, std::span<const node_id> guarantors)
    {
        adjudication_outcome o;
        o.challenge_id = challenge_hash(c);
        o.outcome = verdict::cluster_slashed;
        o.penalized.assign(guarantors.begin(), guarantors.end());
        return o;
    }
}

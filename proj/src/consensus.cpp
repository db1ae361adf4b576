#include <algorithm>

#include <sealnet/codec.hpp>
#include <sealnet/consensus.hpp>
#include <sealnet/spock.hpp>

namespace sealnet {

    // --- waiting proofs ----------------------------------------------------

    static hash32 iterate(hash32 h, uint64_t n)
    {
        for (uint64_t i = 0; i < n; ++i)
            h = sha256(h.span());
        return h;
    }

    waiting_proof waiting_proof_make(const hash32 &start_mark, uint64_t duration_ticks, uint64_t rate)
    {
        const auto n = duration_ticks * rate;
        return { start_mark, n, iterate(start_mark, n) };
    }

    bool waiting_proof_verify(const waiting_proof &p, uint64_t required_ticks, uint64_t rate)
    {
        if (p.iterations < required_ticks * rate)
            return false;
        return iterate(p.start_mark, p.iterations) == p.output;
    }

    bool waiting_proof_verify(const waiting_proof &p, const hash32 &expected_start, uint64_t required_ticks, uint64_t rate)
    {
        return p.start_mark == expected_start && waiting_proof_verify(p, required_ticks, rate);
    }

    hash32 next_entropy(const hash32 &parent_entropy, uint64_t height)
    {
        hasher h;
        h.update(parent_entropy);
        h.update_u64(height);
        return h.finalize();
    }

    // --- slashing ----------------------------------------------------------

    uint64_t slashing_policy::large(role r) const
    {
        const auto it = min_stake.find(r);
        return it == min_stake.end() ? 0 : it->second;
    }

    apply_result apply_slashing(const adjudication_outcome &o, stake_ledger &ledger, slashing_journal &journal,
                                const slashing_policy &policy, uint64_t height)
    {
        apply_result r;
        if (!journal.insert(o.challenge_id, o.outcome))
            return r;
        r.applied = true;
        if (o.outcome == verdict::collection_resolved) {
            r.updates.push_back({ o.challenge_id, o.outcome, {}, 0, o.proof });
            return r;
        }
        for (const auto &n: o.penalized) {
            const auto amount = o.outcome == verdict::fines_applied ? policy.small_fine : policy.large(n.r);
            const auto taken = ledger.slash(n, amount, verdict_name(o.outcome), height);
            r.updates.push_back({ o.challenge_id, o.outcome, n, taken, o.proof });
        }
        return r;
    }

    // --- chain state and seal validity -------------------------------------

    chain_state chain_state::from_genesis(const block &genesis, const execution_result &genesis_result)
    {
        chain_state c;
        c.blocks.push_back(genesis);
        const auto bh = block_hash(genesis);
        c.height_of[bh] = 0;
        c.last_seal.block_hash = bh;
        c.last_seal.result_hash = result_hash(genesis_result);
        c.last_sealed_result = genesis_result;
        c.sealed_results.push_back(c.last_seal.result_hash);
        return c;
    }

    const block *chain_state::find_block(const hash32 &h) const
    {
        const auto it = height_of.find(h);
        return it == height_of.end() ? nullptr : &blocks[it->second];
    }

    const hash32 &result_start_state(const execution_result &r)
    {
        return r.chunks.empty() ? r.final_state : r.chunks.front().start_state;
    }

    bool seal_verdict::valid() const
    {
        return std::all_of(conditions.begin(), conditions.end(), [](bool b) { return b; });
    }

    std::vector<int> seal_verdict::failed() const
    {
        std::vector<int> out;
        for (size_t i = 0; i < conditions.size(); ++i)
            if (!conditions[i])
                out.push_back(static_cast<int>(i));
        return out;
    }

    seal_verdict seal_validity(const block_seal &s, const chain_state &chain, const stake_ledger &ledger,
                               const consensus_params &p)
    {
        seal_verdict v;
        const block *bhat = chain.find_block(s.block_hash);
        const auto rit = chain.results.find(s.result_hash);
        const result_record *rec = rit == chain.results.end() ? nullptr : &rit->second;

        // 0: structure
        const execution_receipt *ref_receipt = nullptr;
        bool well_formed = bhat && rec && rec->result.block_hash == s.block_hash && !s.executor_sigs.empty();
        if (well_formed) {
            for (const auto &es: s.executor_sigs) {
                const auto it = rec->receipts.find(es.signer);
                if (it == rec->receipts.end() || it->second.executor.sig != es.sig
                    || !verify(es.signer.key, receipt_payload(it->second), es.sig)) {
                    well_formed = false;
                    break;
                }
                if (!ref_receipt)
                    ref_receipt = &it->second;
            }
        }
        v.conditions[0] = well_formed;

        if (rec) {
            v.conditions[1] = rec->result.previous_result_hash == chain.last_seal.result_hash;
            v.conditions[3] = result_start_state(rec->result) == chain.last_sealed_result.final_state;
        }
        if (bhat)
            v.conditions[2] = bhat->previous_block_hash == chain.last_seal.block_hash;

        // 4: strictly more than 2/3 of verification stake, every signature checked
        {
            std::vector<node_id> signers;
            bool sigs_ok = true;
            for (const auto &a: s.attestation_sigs) {
                if (a.signer.r != role::verification || !ledger.contains(a.signer)
                    || !verify(a.signer.key, attestation_payload(s.result_hash), a.sig)) {
                    sigs_ok = false;
                    break;
                }
                signers.push_back(a.signer);
            }
            v.conditions[4] = sigs_ok
                && stake_fraction_met(signers, role::verification, { 2, 3 }, ledger, threshold_mode::strictly_more);
        }

        // 5: each contributing verifier's proof
        if (rec && ref_receipt) {
            bool all = true;
            for (const auto &a: s.attestation_sigs) {
                const auto it = rec->approvals.find(a.signer);
                if (it == rec->approvals.end() || it->second.attestation.sig != a.sig
                    || !approval_valid(it->second, *ref_receipt, p.eta)) {
                    all = false;
                    break;
                }
            }
            v.conditions[5] = all;
        }

        // 6 and 7: challenges against this result
        bool pending = false, upheld = false;
        for (const auto &[id, f]: chain.fccs) {
            if (f.result_hash != s.result_hash)
                continue;
            pending |= f.state == fcc_state::pending;
            upheld |= f.state == fcc_state::upheld;
        }
        v.conditions[6] = !pending;
        v.conditions[7] = !upheld;

        // 8
        v.conditions[8] = waiting_proof_verify(s.proof_of_waiting, s.result_hash, p.delta_t, p.vdf_rate);
        return v;
    }

    bool collection_guaranteed(const guaranteed_collection &gc, std::span<const node_id> cluster, const stake_ledger &ledger)
    {
        using u128 = unsigned __int128;
        std::set<node_id> counted;
        u128 signed_stake = 0, total = 0;
        for (const auto &m: cluster)
            total += ledger.stake_of(m);
        for (const auto &s: gc.guarantor_sigs) {
            if (std::find(cluster.begin(), cluster.end(), s.signer) == cluster.end())
                return false;
            if (!verify(s.signer.key, guarantee_payload(gc.collection_hash), s.sig))
                return false;
            if (counted.insert(s.signer).second)
                signed_stake += ledger.stake_of(s.signer);
        }
        return signed_stake * 3 > total * 2;
    }

    // --- committee ----------------------------------------------------------

    consensus_committee::consensus_committee(consensus_params p, stake_ledger ledger, std::vector<node_identity> members,
                                             std::vector<std::vector<node_id>> clusters, data_access data,
                                             const register_state &genesis_state, const hash32 &genesis_entropy)
        : _p { std::move(p) }, _ledger { std::move(ledger) }, _members { std::move(members) },
          _clusters { std::move(clusters) }, _data { std::move(data) }
    {
        block g;
        g.height = 0;
        g.entropy = genesis_entropy;
        execution_result gr;
        gr.block_hash = block_hash(g);
        gr.final_state = state_commitment(genesis_state);
        for (const auto &m: _members)
            g.consensus_sigs.push_back({ m.id, sign(m.sk, block_payload(gr.block_hash)) });
        _chain = chain_state::from_genesis(g, gr);
    }

    bool consensus_committee::staked(const node_id &n) const
    {
        return _ledger.contains(n) && _ledger.stake_of(n) > 0;
    }

    void consensus_committee::on_collection(const guaranteed_collection &gc, uint64_t)
    {
        if (gc.cluster_index >= _clusters.size() || !_seen_collections.insert(gc.collection_hash).second) {
            ++_dropped;
            return;
        }
        if (!collection_guaranteed(gc, _clusters[gc.cluster_index], _ledger)) {
            _seen_collections.erase(gc.collection_hash);
            ++_dropped;
            return;
        }
        _pending_collections.push_back(gc);
    }

    void consensus_committee::on_receipt(const execution_receipt &r, uint64_t now)
    {
        const auto &ex = r.executor.signer;
        const block *b = _chain.find_block(r.result.block_hash);
        bool ok = ex.r == role::execution && staked(ex) && b && b->height > 0
            && r.spocks.size() == r.result.chunks.size()
            && verify(ex.key, receipt_payload(r), r.executor.sig);
        for (size_t i = 0; ok && i < r.spocks.size(); ++i)
            ok = spock_verify(r.spocks[i], ex);
        if (!ok) {
            ++_dropped;
            return;
        }
        const auto rh = result_hash(r.result);
        auto [it, inserted] = _chain.results.try_emplace(rh);
        auto &rec = it->second;
        if (inserted) {
            rec.result = r.result;
            rec.hash = rh;
            rec.block_height = b->height;
            rec.first_receipt_time = now;
            rec.seq = _seq++;
        }
        rec.receipts.emplace(ex, r);
        _receipts_by_hash.emplace(receipt_hash(r), r);

        if (auto orphans = _orphan_approvals.extract(rh)) {
            for (const auto &a: orphans.mapped())
                on_approval(a, now);
        }
    }

    void consensus_committee::on_approval(const result_approval &a, uint64_t)
    {
        const auto it = _chain.results.find(a.attestation.result_hash);
        if (it == _chain.results.end()) {
            _orphan_approvals[a.attestation.result_hash].push_back(a);
            return;
        }
        auto &rec = it->second;
        const auto &vid = a.verifier.signer;
        if (!staked(vid) || rec.approvals.count(vid))
            return;
        if (!approval_valid(a, rec.receipts.begin()->second, _p.eta)) {
            _rejected_approvals.insert({ vid, rec.hash });
            return;
        }
        rec.approvals.emplace(vid, a);
    }

    void consensus_committee::on_fcc(const faulty_computation_challenge &c, uint64_t)
    {
        _incoming_fccs.push_back(c);
    }

    void consensus_committee::on_fcr(const faulty_computation_response &r, uint64_t now)
    {
        const auto it = _chain.fccs.find(r.challenge_hash);
        if (it == _chain.fccs.end() || it->second.state != fcc_state::pending || now > it->second.deadline
            || it->second.response) {
            ++_dropped;
            return;
        }
        // authenticity is judged during adjudication; an unauthenticated reply counts against the executor
        it->second.response = r;
    }

    void consensus_committee::on_mcc(const missing_collection_challenge &c, uint64_t)
    {
        if (!mcc_authentic(c) || !staked(c.challenger) || _mcc_by_collection.count(c.collection_hash)) {
            ++_dropped;
            return;
        }
        const block *b = _chain.find_block(c.block_hash);
        if (!b || std::none_of(b->collections.begin(), b->collections.end(),
                               [&](const auto &gc) { return gc.collection_hash == c.collection_hash; })) {
            ++_dropped;
            return;
        }
        _mcc_by_collection.emplace(c.collection_hash, challenge_hash(c));
        _incoming_mccs.push_back(c);
    }

    void consensus_committee::on_mca(const missing_collection_attestation &a, uint64_t)
    {
        const auto it = _mcc_by_collection.find(a.collection_hash);
        if (it != _mcc_by_collection.end()) {
            if (auto m = _mccs.find(it->second); m != _mccs.end()) {
                m->second.mcas.push_back(a);
                return;
            }
        }
        _early_mcas.push_back(a);
    }

    void consensus_committee::on_collection_text(const hash32 &collection_hash, uint64_t)
    {
        _surfaced.insert(collection_hash);
        if (const auto it = _mcc_by_collection.find(collection_hash); it != _mcc_by_collection.end())
            if (auto m = _mccs.find(it->second); m != _mccs.end())
                m->second.surfaced = true;
    }

    void consensus_committee::record(const adjudication_outcome &o, uint64_t height)
    {
        auto r = apply_slashing(o, _ledger, _journal, _p.policy, height);
        if (!r.applied)
            return;
        _updates.insert(_updates.end(), r.updates.begin(), r.updates.end());
        _events.push_back({ height, o, std::move(r.updates) });
    }

    void consensus_committee::settle_fcc(fcc_record &f, const adjudication_outcome &o, uint64_t height)
    {
        f.outcome = o;
        f.state = o.outcome == verdict::executor_slashed ? fcc_state::upheld : fcc_state::rejected;
        record(o, height);
    }

    std::vector<transaction> consensus_committee::chunk_txs(const fcc_record &f) const
    {
        if (!_data.chunk_transactions)
            return {};
        auto t = _data.chunk_transactions(f.result_hash, f.challenge.chunk_index);
        return t ? std::move(*t) : std::vector<transaction> {};
    }

    void consensus_committee::journal_challenges(block &b, uint64_t now)
    {
        std::vector<faulty_computation_challenge> later;
        for (auto &c: _incoming_fccs) {
            const auto rit = _receipts_by_hash.find(c.receipt_hash);
            if (rit == _receipts_by_hash.end()) {
                later.push_back(std::move(c));
                continue;
            }
            const auto id = challenge_hash(c);
            if (_chain.fccs.count(id) || !staked(c.verifier.signer) || !fcc_authentic(c, rit->second, _p.eta)) {
                ++_dropped;
                continue;
            }
            fcc_record f;
            f.challenge = c;
            f.id = id;
            f.receipt = rit->second;
            f.result_hash = result_hash(rit->second.result);
            f.journal_height = b.height;
            f.deadline = now + _p.response_window;
            b.challenges.emplace_back(c);
            auto &rec = _chain.fccs.emplace(id, std::move(f)).first->second;

            const auto txs = chunk_txs(rec);
            if (txs.empty()) {
                adjudication_outcome o;
                o.challenge_id = id;
                o.outcome = verdict::executor_slashed;
                o.penalized.push_back(rec.receipt.executor.signer);
                o.evidence.note = "chunk data unavailable";
                settle_fcc(rec, o, b.height);
            } else if (c.claimed_fault != chunk_verdict::bad_final_state) {
                settle_fcc(rec, adjudicate_fcc_static(c, rec.receipt, txs, _p.gas), b.height);
            } else if (auto bad = fcc_precheck(c, rec.receipt, txs.size())) {
                settle_fcc(rec, *bad, b.height);
            }
        }
        _incoming_fccs = std::move(later);

        for (auto &c: _incoming_mccs) {
            const auto id = challenge_hash(c);
            const block *home = _chain.find_block(c.block_hash);
            mcc_record m;
            m.challenge = c;
            m.id = id;
            for (const auto &gc: home->collections)
                if (gc.collection_hash == c.collection_hash)
                    m.collection = gc;
            m.cluster = _clusters.at(m.collection.cluster_index);
            m.surfaced = _surfaced.count(c.collection_hash) > 0;
            m.journal_height = b.height;
            std::vector<missing_collection_attestation> rest;
            for (auto &a: _early_mcas)
                (a.collection_hash == c.collection_hash ? m.mcas : rest).push_back(std::move(a));
            _early_mcas = std::move(rest);
            b.challenges.emplace_back(c);
            _mccs.emplace(id, std::move(m));
        }
        _incoming_mccs.clear();
    }

    void consensus_committee::adjudicate_due(uint64_t height, uint64_t now)
    {
        for (auto &[id, f]: _chain.fccs) {
            if (f.state != fcc_state::pending || f.journal_height >= height)
                continue;
            if (!f.response && now < f.deadline)
                continue;
            const auto txs = chunk_txs(f);
            fcc_reply reply = f.response ? fcc_reply { *f.response }
                                         : fcc_reply { waiting_proof_make(f.id, _p.response_window, _p.vdf_rate) };
            settle_fcc(f, adjudicate_fcc(f.challenge, f.receipt, reply, txs, _data.states, _p.gas),
                       height);
        }

        const auto executors = _ledger.nodes(role::execution);
        for (auto &[id, m]: _mccs) {
            if (m.status != mcc_status::pending || m.journal_height >= height)
                continue;
            std::vector<node_id> guarantors;
            for (const auto &s: m.collection.guarantor_sigs)
                guarantors.push_back(s.signer);
            mcc_tally_params tp { m.cluster, guarantors, executors, _p.delta_t, _p.vdf_rate };
            auto t = mcc_tally(m.challenge, m.mcas, _ledger, m.surfaced, tp);
            if (t.status == mcc_status::pending)
                continue;
            m.status = t.status;
            for (const auto &o: t.outcomes)
                record(o, height);
        }
    }

    std::optional<block_seal> consensus_committee::build_seal(const result_record &r, uint64_t now)
    {
        if (now < r.first_receipt_time + _p.seal_wait || r.receipts.empty())
            return std::nullopt;
        block_seal s;
        s.block_hash = r.result.block_hash;
        s.result_hash = r.hash;
        for (const auto &[id, rc]: r.receipts)
            s.executor_sigs.push_back(rc.executor);
        for (const auto &[id, a]: r.approvals)
            s.attestation_sigs.push_back({ id, a.attestation.sig });
        auto [pit, fresh] = _seal_proofs.try_emplace(r.hash);
        if (fresh)
            pit->second = waiting_proof_make(r.hash, _p.seal_wait, _p.vdf_rate);
        s.proof_of_waiting = pit->second;
        return s;
    }

    void consensus_committee::add_seals(block &b, uint64_t now)
    {
        for (;;) {
            const auto next = _chain.sealed_height + 1;
            if (next >= _chain.blocks.size())
                return;
            const auto bh = block_hash(_chain.blocks[next]);
            std::vector<const result_record *> cands;
            for (const auto &[h, r]: _chain.results)
                if (r.result.block_hash == bh && r.result.previous_result_hash == _chain.last_seal.result_hash)
                    cands.push_back(&r);
            std::sort(cands.begin(), cands.end(), [](const result_record *x, const result_record *y) {
                if (x->receipts.size() != y->receipts.size())
                    return x->receipts.size() > y->receipts.size();
                if (x->seq != y->seq)
                    return x->seq < y->seq;
                return x->hash < y->hash;
            });
            const result_record *chosen = nullptr;
            for (const auto *c: cands) {
                std::vector<node_id> approvers;
                for (const auto &[id, a]: c->approvals)
                    approvers.push_back(id);
                // skip the signature-heavy check until the stake threshold can be met at all
                if (!stake_fraction_met(approvers, role::verification, { 2, 3 }, _ledger, threshold_mode::strictly_more))
                    continue;
                auto seal = build_seal(*c, now);
                if (!seal)
                    continue;
                if (!seal_validity(*seal, _chain, _ledger, _p).valid())
                    continue;
                b.seals.push_back(*seal);
                _chain.last_seal = *seal;
                chosen = c;
                break;
            }
            if (!chosen)
                return;
            _chain.last_sealed_result = chosen->result;
            _chain.sealed_height = next;
            _chain.sealed_results.push_back(chosen->hash);
            _seals.push_back({ next, b.height, chosen->hash });

            // a sealed receipt that skipped collections triggers the cluster penalty
            for (const auto &[id, rc]: chosen->receipts) {
                for (const auto &a: rc.mcas) {
                    const auto mit = _mcc_by_collection.find(a.collection_hash);
                    if (mit == _mcc_by_collection.end())
                        continue;
                    auto m = _mccs.find(mit->second);
                    if (m == _mccs.end() || m->second.cluster_slashed)
                        continue;
                    m->second.cluster_slashed = true;
                    std::vector<node_id> guarantors;
                    for (const auto &s: m->second.collection.guarantor_sigs)
                        guarantors.push_back(s.signer);
                    record(mcc_cluster_slash(m->second.challenge, guarantors), b.height);
                }
            }
        }
    }

    const block &consensus_committee::propose(uint64_t now)
    {
        const block &parent = _chain.blocks.back();
        block b;
        b.height = parent.height + 1;
        b.previous_block_hash = block_hash(parent);
        b.entropy = next_entropy(parent.entropy, b.height);

        journal_challenges(b, now);
        adjudicate_due(b.height, now);
        add_seals(b, now);

        while (!_pending_collections.empty()) {
            b.collections.push_back(std::move(_pending_collections.front()));
            _pending_collections.pop_front();
        }
        b.updates = std::move(_updates);
        _updates.clear();

        const auto bh = block_hash(b);
        for (const auto &m: _members)
            b.consensus_sigs.push_back({ m.id, sign(m.sk, block_payload(bh)) });
        _chain.height_of[bh] = b.height;
        _chain.blocks.push_back(std::move(b));
        return _chain.blocks.back();
    }
}

#include <memory>
#include <set>

#include <sealnet/netsim.hpp>
#include <sealnet/spock.hpp>

namespace sealnet {

    namespace {

        std::string reg_name(uint32_t i) { return std::string(1, static_cast<char>('a' + i)); }

        // what an executor publishes for a result: enough to serve any chunk
        struct da_entry {
            std::vector<transaction> txs;
            std::vector<chunk> chunks;
            std::vector<register_state> boundary; // before tx k
            register_state final_state;
        };

        struct published_receipt {
            std::vector<std::vector<hash32>> interim;
        };

        struct executor_node {
            node_identity self;
            strategy kind = strategy::honest;
            bool respond = true;
            fault_placement placement = fault_placement::random;
            std::optional<hash_stream> rng;
            std::map<uint64_t, block> blocks;
            std::map<hash32, uint64_t> height_of;
            std::map<hash32, collection> texts;
            std::set<hash32> requested;
            std::map<hash32, missing_collection_challenge> mccs;                     // by collection
            std::map<hash32, std::vector<missing_collection_attestation>> mcas;      // by collection
            std::map<hash32, std::vector<missing_collection_attestation>> skipped;   // counted MCAs
            struct head {
                hash32 result_hash;
                register_state state;
            };
            std::vector<head> chain; // honest view, index = height
            std::map<hash32, published_receipt> receipts;
        };

        struct verifier_node {
            node_identity self;
            strategy kind = strategy::honest;
            uint32_t partner = 0;
            bool designated = false;
            std::set<hash32> handled;
        };

        struct probe_state {
            bool started = false;
            bool done = false;
            bool found = false;
            std::vector<missing_collection_challenge> waiting;
            std::set<hash32> attested;
        };

        struct collector_node {
            node_identity self;
            uint32_t cluster = 0;
            bool withholding = false;
            std::map<hash32, probe_state> probes;
        };

        class simulation {
        public:
            explicit simulation(const scenario_config &cfg);
            run_output run();

        private:
            const scenario_config &_cfg;
            hash32 _master;
            event_queue _q;
            delay_model _delays;
            uint64_t _now = 0;

            std::vector<collector_node> _collectors;
            std::vector<executor_node> _executors;
            std::vector<verifier_node> _verifiers;
            std::vector<node_identity> _consensus;
            std::vector<std::vector<uint32_t>> _clusters;
            std::vector<std::vector<uint32_t>> _guarantors; // per cluster
            std::map<node_id, strategy> _strategy;
            register_state _genesis;
            std::unique_ptr<consensus_committee> _committee;

            std::map<hash32, collection> _texts;               // ground truth, served only by guarantors
            std::map<hash32, guaranteed_collection> _guaranteed;
            std::map<hash32, da_entry> _da;
            std::map<hash32, register_state> _states;
            std::map<std::pair<uint32_t, hash32>, std::vector<hash32>> _zetas; // (executor, result) -> ζ
            std::map<hash32, size_t> _faulty;                  // result hash -> detections index
            run_report _report;

            void send(std::function<void()> fn) { _q.schedule(_now + _delays.sample(), std::move(fn)); }
            void at(uint64_t t, std::function<void()> fn) { _q.schedule(t, std::move(fn)); }

            std::optional<chunk_data> fetch(const hash32 &rh, uint32_t i) const;
            collection make_collection(uint32_t round, uint32_t cluster, uint32_t j) const;
            void produce_collections(uint32_t round);
            void propose();

            void exec_on_block(uint32_t e, const std::shared_ptr<const block> &b);
            void exec_fetch_timeout(uint32_t e, uint64_t height);
            void exec_on_text(uint32_t e, const hash32 &h, const collection &c);
            void exec_on_mca(uint32_t e, const missing_collection_attestation &a);
            void exec_check_skip(uint32_t e, const hash32 &coll);
            void exec_try(uint32_t e);
            void exec_run(uint32_t e, const block &b);
            void publish(const hash32 &rh, const std::vector<transaction> &txs, const block_execution_output &out);

            void collector_on_request(uint32_t c, const hash32 &coll, uint32_t e);
            void collector_on_mcc(uint32_t c, const missing_collection_challenge &m);
            void collector_on_probe(uint32_t g, const hash32 &coll, uint32_t c);
            void collector_probe_reply(uint32_t c, const hash32 &coll);
            void collector_probe_timeout(uint32_t c, const hash32 &coll);
            void collector_attest(uint32_t c, const missing_collection_challenge &m);

            void verifier_on_receipt(uint32_t v, const std::shared_ptr<const execution_receipt> &r);

            void finish(run_output &out);
        };

        simulation::simulation(const scenario_config &cfg)
            : _cfg { cfg }, _master { seed_from_u64(cfg.seed) },
              _delays { derive_seed(_master, "delay"), cfg.delta_t }
        {
            const auto identity = [&](role r, uint32_t i) {
                const auto kp = node_keypair(_master, static_cast<uint8_t>(r), i);
                return node_identity { { r, i, kp.pk }, kp.sk };
            };
            const auto stake_for = [&](role r, uint32_t i) {
                const auto it = cfg.stake_overrides.find(r);
                return it == cfg.stake_overrides.end() ? cfg.stakes.of(r) : it->second[i];
            };

            _clusters = form_clusters(cfg.collectors, cfg.n_cluster, derive_seed(_master, "beacon"));
            std::set<uint32_t> withholding_clusters;
            for (const auto &a: cfg.adversaries)
                if (a.kind == strategy::withholding_cluster)
                    withholding_clusters.insert(*a.cluster);

            stake_ledger ledger;
            _collectors.resize(cfg.collectors);
            for (uint32_t c = 0; c < _clusters.size(); ++c)
                for (auto i: _clusters[c]) {
                    _collectors[i].cluster = c;
                    _collectors[i].withholding = withholding_clusters.count(c) > 0;
                }
            for (uint32_t i = 0; i < cfg.collectors; ++i) {
                _collectors[i].self = identity(role::collector, i);
                ledger.stake(_collectors[i].self.id, stake_for(role::collector, i));
                _strategy[_collectors[i].self.id] = _collectors[i].withholding ? strategy::withholding_cluster
                                                                                : strategy::honest;
            }
            for (uint32_t i = 0; i < cfg.consensus_nodes; ++i) {
                _consensus.push_back(identity(role::consensus, i));
                ledger.stake(_consensus.back().id, stake_for(role::consensus, i));
                _strategy[_consensus.back().id] = strategy::honest;
            }
            _executors.resize(cfg.executors);
            for (uint32_t i = 0; i < cfg.executors; ++i) {
                auto &ex = _executors[i];
                ex.self = identity(role::execution, i);
                ex.rng.emplace(derive_seed(_master, "fault", i));
                ledger.stake(ex.self.id, stake_for(role::execution, i));
            }
            _verifiers.resize(cfg.verifiers);
            for (uint32_t i = 0; i < cfg.verifiers; ++i) {
                _verifiers[i].self = identity(role::verification, i);
                ledger.stake(_verifiers[i].self.id, stake_for(role::verification, i));
            }
            for (const auto &a: cfg.adversaries) {
                for (auto idx: a.indices) {
                    if (a.kind == strategy::faulty_executor) {
                        _executors[idx].kind = a.kind;
                        _executors[idx].respond = a.respond;
                        _executors[idx].placement = a.placement;
                    } else {
                        _verifiers[idx].kind = a.kind;
                        _verifiers[idx].partner = a.partner;
                    }
                }
            }
            for (const auto &ex: _executors)
                _strategy[ex.self.id] = ex.kind;
            for (auto &v: _verifiers) {
                _strategy[v.self.id] = v.kind;
                const bool honest = v.kind == strategy::honest;
                v.designated = cfg.coverage_subset.empty()
                    ? honest
                    : std::find(cfg.coverage_subset.begin(), cfg.coverage_subset.end(), v.self.id.index)
                        != cfg.coverage_subset.end();
            }

            // guarantors: the smallest prefix of the cluster holding more than 2/3 of its
            // stake, Byzantine members first so a withholding cluster signs by itself
            _guarantors.resize(_clusters.size());
            std::vector<std::vector<node_id>> cluster_ids(_clusters.size());
            for (uint32_t c = 0; c < _clusters.size(); ++c) {
                auto order = _clusters[c];
                std::stable_sort(order.begin(), order.end(), [&](uint32_t a, uint32_t b) {
                    return _collectors[a].withholding > _collectors[b].withholding;
                });
                unsigned __int128 total = 0, acc = 0;
                for (auto i: order)
                    total += ledger.stake_of(_collectors[i].self.id);
                for (auto i: order) {
                    _guarantors[c].push_back(i);
                    acc += ledger.stake_of(_collectors[i].self.id);
                    if (acc * 3 > total * 2)
                        break;
                }
                for (auto i: _clusters[c])
                    cluster_ids[c].push_back(_collectors[i].self.id);
            }

            for (uint32_t r = 0; r < cfg.workload.registers; ++r)
                _genesis.set(reg_name(r), static_cast<int64_t>(r) + 1);
            _states[state_commitment(_genesis)] = _genesis;

            consensus_params p;
            p.eta = cfg.eta;
            p.delta_t = cfg.delta_t;
            p.vdf_rate = cfg.vdf_rate;
            p.seal_wait = 2 * cfg.delta_t;
            p.response_window = 4 * cfg.delta_t;
            p.gas = cfg.gas;
            p.policy.small_fine = cfg.small_fine;
            for (auto r: { role::collector, role::consensus, role::execution, role::verification })
                p.policy.min_stake[r] = cfg.min_stake.of(r);

            data_access data;
            data.chunk_transactions = [this](const hash32 &rh, uint32_t i) -> std::optional<std::vector<transaction>> {
                auto d = fetch(rh, i);
                if (!d)
                    return std::nullopt;
                return std::move(d->transactions);
            };
            data.states = [this](const hash32 &h) -> std::optional<register_state> {
                const auto it = _states.find(h);
                if (it == _states.end())
                    return std::nullopt;
                return it->second;
            };
            _committee = std::make_unique<consensus_committee>(p, std::move(ledger), _consensus, cluster_ids, data,
                                                               _genesis, derive_seed(_master, "entropy"));

            const auto &chain = _committee->chain();
            for (auto &ex: _executors) {
                ex.chain.push_back({ chain.sealed_results[0], _genesis });
                ex.height_of[block_hash(chain.blocks[0])] = 0;
            }
        }

        std::optional<chunk_data> simulation::fetch(const hash32 &rh, uint32_t i) const
        {
            const auto it = _da.find(rh);
            if (it == _da.end() || i >= it->second.chunks.size())
                return std::nullopt;
            const auto &d = it->second;
            const size_t lo = d.chunks[i].start_index;
            const size_t hi = i + 1 < d.chunks.size() ? d.chunks[i + 1].start_index : d.txs.size();
            chunk_data out;
            out.start_state = d.boundary[lo];
            out.transactions.assign(d.txs.begin() + lo, d.txs.begin() + hi);
            return out;
        }

        // Random op mix under a per-transaction gas budget in [1, Γ_Tx].
        collection simulation::make_collection(uint32_t round, uint32_t cluster, uint32_t j) const
        {
            hash_stream rng { derive_seed(derive_seed(_master, "workload", round), "cluster", cluster * 1024 + j) };
            const auto regs = _cfg.workload.registers;
            const auto pick = [&] { return reg_name(static_cast<uint32_t>(rng.uniform_below(regs))); };
            collection c;
            for (uint32_t t = 0; t < _cfg.workload.collection_size; ++t) {
                uint64_t budget = rng.uniform_range(1, _cfg.gas.tx_limit);
                std::vector<machine_op> ops;
                while (budget > 0) {
                    std::vector<op_kind> allowed;
                    for (auto k: { op_kind::set, op_kind::add, op_kind::mul, op_kind::hashmix })
                        if (op_cost(k) <= budget)
                            allowed.push_back(k);
                    const auto k = allowed[rng.uniform_below(allowed.size())];
                    switch (k) {
                        case op_kind::set:
                            ops.push_back(machine_op::set(pick(), static_cast<int64_t>(rng.uniform_below(1000))));
                            break;
                        case op_kind::add: {
                            auto d = pick();
                            ops.push_back(machine_op::add(std::move(d), pick()));
                            break;
                        }
                        case op_kind::mul: {
                            auto d = pick();
                            ops.push_back(machine_op::mul(std::move(d), pick()));
                            break;
                        }
                        case op_kind::hashmix:
                            ops.push_back(machine_op::hashmix(pick()));
                            break;
                    }
                    budget -= op_cost(k);
                }
                c.transactions.push_back(make_transaction(std::move(ops), rng.next_u64()));
            }
            return c;
        }

        void simulation::produce_collections(uint32_t round)
        {
            for (uint32_t c = 0; c < _clusters.size(); ++c) {
                for (uint32_t j = 0; j < _cfg.workload.collections_per_cluster; ++j) {
                    auto col = make_collection(round, c, j);
                    guaranteed_collection gc;
                    gc.collection_hash = collection_hash(col);
                    gc.cluster_index = c;
                    for (auto g: _guarantors[c]) {
                        const auto &id = _collectors[g].self;
                        gc.guarantor_sigs.push_back({ id.id, sign(id.sk, guarantee_payload(gc.collection_hash)) });
                    }
                    _texts.emplace(gc.collection_hash, std::move(col));
                    _guaranteed.emplace(gc.collection_hash, gc);
                    send([this, gc] { _committee->on_collection(gc, _now); });
                }
            }
        }

        void simulation::propose()
        {
            auto b = std::make_shared<const block>(_committee->propose(_now));
            for (uint32_t e = 0; e < _executors.size(); ++e)
                send([this, e, b] { exec_on_block(e, b); });
        }

        // --- executors -------------------------------------------------------

        void simulation::exec_on_block(uint32_t e, const std::shared_ptr<const block> &bp)
        {
            auto &ex = _executors[e];
            const auto &b = *bp;
            ex.blocks.emplace(b.height, b);
            ex.height_of[block_hash(b)] = b.height;

            for (const auto &gc: b.collections) {
                if (ex.texts.count(gc.collection_hash) || !ex.requested.insert(gc.collection_hash).second)
                    continue;
                for (const auto &s: gc.guarantor_sigs)
                    send([this, g = s.signer.index, h = gc.collection_hash, e] { collector_on_request(g, h, e); });
            }
            if (!b.collections.empty())
                at(_now + 2 * _cfg.delta_t, [this, e, h = b.height] { exec_fetch_timeout(e, h); });

            for (const auto &ch: b.challenges) {
                const auto *f = std::get_if<faulty_computation_challenge>(&ch);
                if (!f)
                    continue;
                const auto it = ex.receipts.find(f->receipt_hash);
                if (it == ex.receipts.end() || (ex.kind == strategy::faulty_executor && !ex.respond))
                    continue;
                if (f->chunk_index >= it->second.interim.size())
                    continue;
                auto resp = make_fcr(ex.self, *f, it->second.interim[f->chunk_index]);
                send([this, resp] { _committee->on_fcr(resp, _now); });
            }

            // rebase onto a sealed result that differs from ours
            for (const auto &s: b.seals) {
                const auto hit = ex.height_of.find(s.block_hash);
                if (hit == ex.height_of.end())
                    continue;
                const auto h = hit->second;
                if (h >= ex.chain.size() || ex.chain[h].result_hash == s.result_hash)
                    continue;
                const auto d = _da.find(s.result_hash);
                if (d == _da.end())
                    continue;
                ex.chain.resize(h);
                ex.chain.push_back({ s.result_hash, d->second.final_state });
            }
            exec_try(e);
        }

        void simulation::exec_fetch_timeout(uint32_t e, uint64_t height)
        {
            auto &ex = _executors[e];
            const auto &b = ex.blocks.at(height);
            for (const auto &gc: b.collections) {
                const auto &h = gc.collection_hash;
                if (ex.texts.count(h) || ex.mccs.count(h))
                    continue;
                auto m = make_mcc(ex.self, block_hash(b), h);
                ex.mccs.emplace(h, m);
                ++_report.mccs_raised;
                send([this, m] { _committee->on_mcc(m, _now); });
                for (uint32_t c = 0; c < _collectors.size(); ++c)
                    send([this, c, m] { collector_on_mcc(c, m); });
            }
        }

        void simulation::exec_on_text(uint32_t e, const hash32 &h, const collection &c)
        {
            auto &ex = _executors[e];
            if (collection_hash(c) != h || ex.skipped.count(h))
                return;
            if (ex.texts.emplace(h, c).second)
                exec_try(e);
        }

        void simulation::exec_on_mca(uint32_t e, const missing_collection_attestation &a)
        {
            _executors[e].mcas[a.collection_hash].push_back(a);
            exec_check_skip(e, a.collection_hash);
        }

        void simulation::exec_check_skip(uint32_t e, const hash32 &coll)
        {
            auto &ex = _executors[e];
            const auto mit = ex.mccs.find(coll);
            if (ex.texts.count(coll) || ex.skipped.count(coll) || mit == ex.mccs.end())
                return;
            const auto &gc = _guaranteed.at(coll);
            std::vector<node_id> cluster, guarantors;
            for (auto i: _clusters[gc.cluster_index])
                cluster.push_back(_collectors[i].self.id);
            for (const auto &s: gc.guarantor_sigs)
                guarantors.push_back(s.signer);
            const auto executors = _committee->ledger().nodes(role::execution);
            mcc_tally_params tp { cluster, guarantors, executors, _cfg.delta_t, _cfg.vdf_rate };
            auto t = mcc_tally(mit->second, ex.mcas[coll], _committee->ledger(), false, tp);
            if (t.status != mcc_status::accepted)
                return;
            ex.skipped.emplace(coll, std::move(t.counted));
            exec_try(e);
        }

        void simulation::exec_try(uint32_t e)
        {
            auto &ex = _executors[e];
            for (;;) {
                const auto it = ex.blocks.find(ex.chain.size());
                if (it == ex.blocks.end())
                    return;
                const bool ready = std::all_of(it->second.collections.begin(), it->second.collections.end(),
                                               [&](const guaranteed_collection &gc) {
                                                   return ex.texts.count(gc.collection_hash)
                                                       || ex.skipped.count(gc.collection_hash);
                                               });
                if (!ready)
                    return;
                exec_run(e, it->second);
            }
        }

        void simulation::publish(const hash32 &rh, const std::vector<transaction> &txs, const block_execution_output &out)
        {
            if (_da.count(rh))
                return;
            da_entry d;
            d.txs = txs;
            d.chunks = out.chunks;
            d.boundary = out.boundary_states;
            d.final_state = out.final_state;
            for (size_t i = 0; i < out.chunks.size(); ++i) {
                const auto &lam = out.interim_commitments[i];
                for (size_t k = 0; k < lam.size(); ++k)
                    _states.try_emplace(lam[k], out.boundary_states[out.chunks[i].start_index + k]);
            }
            _states.try_emplace(state_commitment(out.final_state), out.final_state);
            _da.emplace(rh, std::move(d));
        }

        void simulation::exec_run(uint32_t e, const block &b)
        {
            auto &ex = _executors[e];
            std::vector<transaction> txs;
            std::vector<missing_collection_attestation> used;
            for (const auto &gc: b.collections) {
                if (const auto t = ex.texts.find(gc.collection_hash); t != ex.texts.end()) {
                    txs.insert(txs.end(), t->second.transactions.begin(), t->second.transactions.end());
                } else {
                    const auto &m = ex.skipped.at(gc.collection_hash);
                    used.insert(used.end(), m.begin(), m.end());
                }
            }
            const auto prev = ex.chain.back();
            const auto bh = block_hash(b);
            const auto result_of = [&](const block_execution_output &o) {
                execution_result r;
                r.block_hash = bh;
                r.previous_result_hash = prev.result_hash;
                r.chunks = o.chunks;
                r.final_state = state_commitment(o.final_state);
                return r;
            };

            auto honest = execute_block(prev.state, txs, _cfg.gas);
            auto honest_result = result_of(honest);
            const auto honest_hash = result_hash(honest_result);

            block_execution_output pub = honest;
            execution_result pub_result = honest_result;
            std::optional<uint32_t> fault_chunk;
            if (ex.kind == strategy::faulty_executor && !honest.chunks.empty()) {
                const auto n = static_cast<uint32_t>(honest.chunks.size());
                const auto corrupt = [&](uint32_t c) {
                    // last transaction of chunk c, so the chunk's published end is wrong
                    state_fault f;
                    f.tx_index = (c + 1 < n ? honest.chunks[c + 1].start_index : static_cast<uint32_t>(txs.size())) - 1;
                    return execute_block(prev.state, txs, _cfg.gas, f);
                };
                const auto first = static_cast<uint32_t>(ex.rng->uniform_below(n));
                uint32_t chosen = first;
                if (ex.placement == fault_placement::grind_colluders) {
                    for (uint32_t k = 0; k < n; ++k) {
                        const auto c = (first + k) % n;
                        const auto res = result_of(corrupt(c));
                        const bool hit = std::any_of(_verifiers.begin(), _verifiers.end(), [&](const verifier_node &v) {
                            if (v.kind != strategy::colluding_verifier || v.partner != e)
                                return false;
                            const auto L = chunk_self_selection(_cfg.eta, res, v.self.sk).indices;
                            return std::find(L.begin(), L.end(), c) != L.end();
                        });
                        if (hit) {
                            chosen = c;
                            break;
                        }
                    }
                }
                pub = corrupt(chosen);
                pub_result = result_of(pub);
                fault_chunk = chosen;
            }
            const auto pub_hash = result_hash(pub_result);
            publish(pub_hash, txs, pub);
            if (pub_hash != honest_hash)
                publish(honest_hash, txs, honest);
            _zetas[{ e, honest_hash }] = honest.chunk_secrets;
            _zetas[{ e, pub_hash }] = pub.chunk_secrets;

            auto r = std::make_shared<execution_receipt>();
            r->result = pub_result;
            for (const auto &z: pub.chunk_secrets)
                r->spocks.push_back(spock_create(z, ex.self.id));
            r->mcas = std::move(used);
            r->executor.signer = ex.self.id;
            r->executor.sig = sign(ex.self.sk, receipt_payload(*r));
            ex.receipts[receipt_hash(*r)] = { pub.interim_commitments };
            ex.chain.push_back({ honest_hash, honest.final_state });

            if (fault_chunk && !_faulty.count(pub_hash)) {
                detection_record d;
                d.height = b.height;
                d.result_hash = pub_hash;
                d.chunks = static_cast<uint32_t>(pub.chunks.size());
                d.faulty_chunk = *fault_chunk;
                d.checks_per_verifier = chunks_to_check(_cfg.eta, d.chunks);
                d.honest_verifiers = static_cast<uint32_t>(std::count_if(
                    _verifiers.begin(), _verifiers.end(), [](const verifier_node &v) { return v.designated; }));
                _faulty.emplace(pub_hash, _report.detections.size());
                _report.detections.push_back(d);
            }

            std::shared_ptr<const execution_receipt> rc = r;
            send([this, rc] { _committee->on_receipt(*rc, _now); });
            for (uint32_t v = 0; v < _verifiers.size(); ++v)
                send([this, v, rc] { verifier_on_receipt(v, rc); });
        }

        // --- collectors ------------------------------------------------------

        void simulation::collector_on_request(uint32_t c, const hash32 &coll, uint32_t e)
        {
            if (_collectors[c].withholding)
                return;
            const auto it = _texts.find(coll);
            if (it == _texts.end())
                return;
            send([this, e, coll, text = it->second] { exec_on_text(e, coll, text); });
        }

        void simulation::collector_on_mcc(uint32_t c, const missing_collection_challenge &m)
        {
            auto &node = _collectors[c];
            const auto git = _guaranteed.find(m.collection_hash);
            if (node.withholding || git == _guaranteed.end() || git->second.cluster_index == node.cluster)
                return;
            auto &p = node.probes[m.collection_hash];
            if (p.done) {
                if (!p.found)
                    collector_attest(c, m);
                return;
            }
            p.waiting.push_back(m);
            if (p.started)
                return;
            p.started = true;
            std::vector<node_id> guarantors;
            for (const auto &s: git->second.guarantor_sigs)
                guarantors.push_back(s.signer);
            for (const auto &g: mcc_probe_plan(node.self.id, guarantors, _cfg.kappa_probe, challenge_hash(m)))
                send([this, g = g.index, h = m.collection_hash, c] { collector_on_probe(g, h, c); });
            // request and reply are each bounded by Δ_t
            at(_now + 2 * _cfg.delta_t, [this, c, h = m.collection_hash] { collector_probe_timeout(c, h); });
        }

        void simulation::collector_on_probe(uint32_t g, const hash32 &coll, uint32_t c)
        {
            if (_collectors[g].withholding || !_texts.count(coll))
                return;
            send([this, c, coll] { collector_probe_reply(c, coll); });
        }

        void simulation::collector_probe_reply(uint32_t c, const hash32 &coll)
        {
            auto &p = _collectors[c].probes[coll];
            if (p.done)
                return;
            p.done = true;
            p.found = true;
            p.waiting.clear();
            const auto &text = _texts.at(coll);
            for (uint32_t e = 0; e < _executors.size(); ++e)
                send([this, e, coll, text] { exec_on_text(e, coll, text); });
            send([this, coll] { _committee->on_collection_text(coll, _now); });
        }

        void simulation::collector_probe_timeout(uint32_t c, const hash32 &coll)
        {
            auto &p = _collectors[c].probes[coll];
            if (p.done)
                return;
            p.done = true;
            const auto waiting = std::move(p.waiting);
            p.waiting.clear();
            for (const auto &m: waiting)
                collector_attest(c, m);
        }

        void simulation::collector_attest(uint32_t c, const missing_collection_challenge &m)
        {
            auto &node = _collectors[c];
            const auto id = challenge_hash(m);
            if (!node.probes[m.collection_hash].attested.insert(id).second)
                return;
            const auto a = make_mca(node.self, m.collection_hash,
                                    waiting_proof_make(id, 2 * _cfg.delta_t, _cfg.vdf_rate));
            ++_report.mcas_signed;
            send([this, a] { _committee->on_mca(a, _now); });
            for (uint32_t e = 0; e < _executors.size(); ++e)
                send([this, e, a] { exec_on_mca(e, a); });
        }

        // --- verifiers -------------------------------------------------------

        void simulation::verifier_on_receipt(uint32_t vi, const std::shared_ptr<const execution_receipt> &rp)
        {
            auto &v = _verifiers[vi];
            const auto &r = *rp;
            const auto rh = result_hash(r.result);
            if (!v.handled.insert(rh).second)
                return;
            const auto assignment = chunk_self_selection(_cfg.eta, r.result, v.self.sk);
            const auto &L = assignment.indices;

            detection_record *det = nullptr;
            if (const auto f = _faulty.find(rh); f != _faulty.end())
                det = &_report.detections[f->second];
            if (det && v.designated && std::find(L.begin(), L.end(), det->faulty_chunk) != L.end())
                ++det->honest_coverage;

            const auto fetcher = [this](const execution_receipt &x, uint32_t i) {
                return fetch(result_hash(x.result), i);
            };

            switch (v.kind) {
                case strategy::honest: {
                    check_outcome out;
                    try {
                        out = check_assigned_chunks(r, assignment, fetcher, v.self, _cfg.gas);
                    } catch (const missing_chunk_data &) {
                        return;
                    }
                    if (auto *a = std::get_if<result_approval>(&out)) {
                        send([this, a = *a] { _committee->on_approval(a, _now); });
                    } else {
                        if (det)
                            det->detected = true;
                        send([this, c = std::get<faulty_computation_challenge>(out)] { _committee->on_fcc(c, _now); });
                    }
                    return;
                }
                case strategy::lazy_verifier: {
                    // claims the executor's SPoCKs as its own without replaying anything
                    std::vector<spock> copied;
                    for (auto i: L)
                        copied.push_back(r.spocks.at(i));
                    send([this, a = make_approval(r.result, assignment, std::move(copied), v.self)] {
                        _committee->on_approval(a, _now);
                    });
                    return;
                }
                case strategy::spurious_challenger: {
                    if (L.empty())
                        return;
                    const auto i = L.front();
                    const auto data = fetch(rh, i);
                    if (!data)
                        return;
                    const bool last = i + 1 == r.result.chunks.size();
                    const auto &ch = r.result.chunks[i];
                    auto check = verify_chunk(data->start_state, data->transactions, ch.first_tx_gas,
                                              last ? r.result.final_state : r.result.chunks[i + 1].start_state,
                                              last ? no_next_chunk : r.result.chunks[i + 1].first_tx_gas,
                                              ch.consumption, _cfg.gas);
                    auto list = std::move(check.interim_commitments);
                    hasher h;
                    h.update(rh);
                    h.update_u64(v.self.id.index);
                    list.back() = h.finalize();
                    auto c = make_fcc(v.self, r, assignment, i, chunk_verdict::bad_final_state, std::move(list));
                    send([this, c] { _committee->on_fcc(c, _now); });
                    return;
                }
                case strategy::colluding_verifier: {
                    const auto z = _zetas.find({ v.partner, rh });
                    if (z == _zetas.end())
                        return;
                    std::vector<spock> proofs;
                    for (auto i: L)
                        proofs.push_back(spock_create(z->second.at(i), v.self.id));
                    send([this, a = make_approval(r.result, assignment, std::move(proofs), v.self)] {
                        _committee->on_approval(a, _now);
                    });
                    return;
                }
                default:
                    return;
            }
        }

        // --- orchestration ---------------------------------------------------

        run_output simulation::run()
        {
            const auto R = _cfg.round_length();
            for (uint32_t k = 1; k <= _cfg.blocks; ++k)
                at((k - 1) * R + 1, [this, k] { produce_collections(k); });
            for (uint32_t k = 1; k <= _cfg.blocks + _cfg.drain_rounds; ++k)
                at(k * R, [this] { propose(); });
            while (!_q.empty()) {
                _now = _q.next_time();
                _q.run_one();
            }
            run_output out;
            finish(out);
            return out;
        }

        void simulation::finish(run_output &out)
        {
            const auto &chain = _committee->chain();
            auto &r = _report;
            r.scenario = _cfg.name;
            r.seed = _cfg.seed;
            r.target_blocks = _cfg.blocks;
            r.final_height = chain.blocks.size() - 1;
            r.sealed_height = chain.sealed_height;
            r.sealed_target_blocks = static_cast<uint32_t>(std::min<uint64_t>(chain.sealed_height, _cfg.blocks));
            r.seals = _committee->seals();
            r.slashings = _committee->ledger().slashing_log();
            for (const auto &s: r.seals)
                if (s.sealed_height <= _cfg.blocks)
                    r.max_seal_lag = std::max(r.max_seal_lag, s.included_in - s.sealed_height);
            r.rejected_approvals = _committee->rejected_approvals();
            for (const auto &[id, rh]: _committee->rejected_approval_set())
                if (_strategy.at(id) == strategy::lazy_verifier)
                    ++r.rejected_lazy_approvals;
            for (const auto &s: r.slashings)
                if (s.reason != verdict_name(verdict::fines_applied) && _strategy.at(s.node) == strategy::honest)
                    r.honest_slashed = true;
            const auto &last = chain.sealed_results[std::min<uint64_t>(chain.sealed_height, _cfg.blocks)];
            r.sealed_state = chain.results.count(last) ? chain.results.at(last).result.final_state
                                                       : state_commitment(_genesis);
            for (const auto &ev: _committee->events()) {
                adjudication_summary a;
                a.height = ev.height;
                a.challenge_id = ev.outcome.challenge_id;
                a.outcome = ev.outcome.outcome;
                a.penalized = ev.outcome.penalized;
                a.mismatch_index = ev.outcome.evidence.mismatch_index;
                a.has_waiting_proof = ev.outcome.proof.has_value();
                a.note = ev.outcome.evidence.note;
                r.adjudications.push_back(std::move(a));
            }
            std::set<hash32> sealed(chain.sealed_results.begin(), chain.sealed_results.end());
            for (auto &d: r.detections) {
                d.sealed = sealed.count(d.result_hash) > 0;
                r.faulty_sealed |= d.sealed;
                for (const auto &[id, f]: chain.fccs)
                    if (f.result_hash == d.result_hash && f.state == fcc_state::upheld)
                        d.executor_slashed = true;
            }
            r.events = _q.processed();

            out.report = r;
            auto &a = out.artifacts;
            a.chain = chain.blocks;
            a.collection_texts = _texts;
            a.genesis_state = _genesis;
            a.sealed_results = chain.sealed_results;
            for (const auto &[h, rec]: chain.results)
                a.results.emplace(h, rec.result);
            a.final_ledger = _committee->ledger();
            a.strategies = _strategy;
        }
    }

    run_output run_scenario(const scenario_config &cfg)
    {
        cfg.validate();
        simulation sim { cfg };
        return sim.run();
    }
}

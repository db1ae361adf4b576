#include <fstream>
#include <set>
#include <type_traits>

#include <sealnet/netsim.hpp>

namespace sealnet {

    namespace {
        struct strategy_row {
            strategy s;
            const char *name;
            role r;
        };
        constexpr strategy_row strategies[] = {
            { strategy::honest, "Honest", role::collector },
            { strategy::faulty_executor, "FaultyExecutor", role::execution },
            { strategy::withholding_cluster, "WithholdingCluster", role::collector },
            { strategy::lazy_verifier, "LazyVerifier", role::verification },
            { strategy::spurious_challenger, "SpuriousChallenger", role::verification },
            { strategy::colluding_verifier, "ColludingVerifiers", role::verification },
        };

        strategy strategy_from_name(const std::string &s)
        {
            for (const auto &row: strategies)
                if (s == row.name && row.s != strategy::honest)
                    return row.s;
            throw config_error("adversaries: unknown strategy '{}'", s);
        }

        role strategy_role(strategy s)
        {
            for (const auto &row: strategies)
                if (row.s == s)
                    return row.r;
            return role::collector;
        }

        // Rejects keys outside `allowed` so typos fail loudly.
        void only_keys(const json &j, const std::string &where, std::initializer_list<const char *> allowed)
        {
            if (!j.is_object())
                throw config_error("{}: expected an object", where.empty() ? "config" : where);
            for (const auto &[k, _]: j.items()) {
                bool ok = false;
                for (const char *a: allowed)
                    ok |= k == a;
                if (!ok)
                    throw config_error("{}{}: unknown field", where.empty() ? "" : where + ".", k);
            }
        }

        template <class T>
        bool unsigned_ok(const json &v)
        {
            if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
                return !v.is_number_integer() || v.is_number_unsigned();
            } else if constexpr (requires { typename T::value_type; } && !std::is_same_v<T, std::string>) {
                if (v.is_array())
                    for (const auto &x: v)
                        if (!unsigned_ok<typename T::value_type>(x))
                            return false;
                return true;
            } else {
                return true;
            }
        }

        template <class T>
        void read(const json &j, const char *key, T &out, const std::string &where)
        {
            if (!j.contains(key))
                return;
            if (!unsigned_ok<T>(j.at(key)))
                throw config_error("{}{}: must not be negative", where.empty() ? "" : where + ".", key);
            try {
                out = j.at(key).get<T>();
            } catch (const nlohmann::json::exception &) {
                throw config_error("{}{}: wrong type", where.empty() ? "" : where + ".", key);
            }
        }

        void read_stakes(const json &j, role_stakes &s, const std::string &where)
        {
            only_keys(j, where, { "collector", "consensus", "execution", "verification" });
            read(j, "collector", s.collector, where);
            read(j, "consensus", s.consensus, where);
            read(j, "execution", s.execution, where);
            read(j, "verification", s.verification, where);
        }

        json stakes_json(const role_stakes &s)
        {
            return { { "collector", s.collector }, { "consensus", s.consensus },
                     { "execution", s.execution }, { "verification", s.verification } };
        }

        uint32_t role_count(const scenario_config &c, role r)
        {
            switch (r) {
                case role::collector: return c.collectors;
                case role::consensus: return c.consensus_nodes;
                case role::execution: return c.executors;
                case role::verification: return c.verifiers;
            }
            return 0;
        }
    }

    const char *strategy_name(strategy s)
    {
        for (const auto &row: strategies)
            if (row.s == s)
                return row.name;
        return "?";
    }

    uint64_t role_stakes::of(role r) const
    {
        switch (r) {
            case role::collector: return collector;
            case role::consensus: return consensus;
            case role::execution: return execution;
            case role::verification: return verification;
        }
        return 0;
    }

    void scenario_config::validate() const
    {
        if (collectors < 1 || consensus_nodes < 1 || executors < 1 || verifiers < 1)
            throw config_error("nodes: every role needs at least one node");
        if (!(eta > 0.0 && eta <= 1.0))
            throw config_error("eta: must lie in (0, 1], got {}", eta);
        if (delta_t == 0)
            throw config_error("delta_t: must be positive");
        if (vdf_rate == 0)
            throw config_error("vdf_rate: must be positive");
        if (n_cluster < 1 || n_cluster > collectors)
            throw config_error("n_cluster: must lie in [1, collectors], got {}", n_cluster);
        if (blocks < 1)
            throw config_error("blocks: must be at least 1");
        if (workload.collection_size < 1 || workload.collections_per_cluster < 1)
            throw config_error("workload: collection_size and collections_per_cluster must be at least 1");
        if (workload.registers < 1 || workload.registers > 26)
            throw config_error("workload.registers: must lie in [1, 26]");
        try {
            gas.validate();
        } catch (const error &e) {
            throw config_error("gas: {}", e.what());
        }
        for (auto r: { role::collector, role::consensus, role::execution, role::verification }) {
            if (stakes.of(r) == 0)
                throw config_error("stakes.{}: must be positive", role_name(r));
            if (auto it = stake_overrides.find(r); it != stake_overrides.end()) {
                if (it->second.size() != role_count(*this, r))
                    throw config_error("stake_overrides.{}: expected {} entries, got {}", role_name(r),
                                       role_count(*this, r), it->second.size());
                for (auto v: it->second)
                    if (v == 0)
                        throw config_error("stake_overrides.{}: stakes must be positive", role_name(r));
            }
        }

        const uint32_t clusters = (collectors + n_cluster - 1) / n_cluster;
        std::set<std::pair<role, uint32_t>> taken;
        std::set<uint32_t> colluders;
        for (size_t i = 0; i < adversaries.size(); ++i) {
            const auto &a = adversaries[i];
            const auto where = fmt::format("adversaries[{}]", i);
            const auto r = strategy_role(a.kind);
            if (a.kind == strategy::honest)
                throw config_error("{}.strategy: Honest is not an adversary", where);
            if (a.kind == strategy::withholding_cluster) {
                if (!a.cluster || *a.cluster >= clusters)
                    throw config_error("{}.cluster: need a cluster index below {}", where, clusters);
                if (!taken.insert({ role::collector, 1'000'000 + *a.cluster }).second)
                    throw config_error("{}.cluster: cluster {} assigned twice", where, *a.cluster);
                continue;
            }
            if (a.cluster)
                throw config_error("{}.cluster: only WithholdingCluster takes a cluster", where);
            if (a.indices.empty())
                throw config_error("{}.indices: at least one node required", where);
            for (auto idx: a.indices) {
                if (idx >= role_count(*this, r))
                    throw config_error("{}.indices: {} index {} out of range", where, role_name(r), idx);
                if (!taken.insert({ r, idx }).second)
                    throw config_error("{}.indices: {} {} has two strategies", where, role_name(r), idx);
                if (a.kind == strategy::colluding_verifier)
                    colluders.insert(idx);
            }
            if (a.kind == strategy::colluding_verifier && a.partner >= executors)
                throw config_error("{}.partner: executor {} does not exist", where, a.partner);
            if (a.placement == fault_placement::grind_colluders && a.kind != strategy::faulty_executor)
                throw config_error("{}.placement: only FaultyExecutor places faults", where);
        }
        for (auto v: coverage_subset) {
            if (v >= verifiers)
                throw config_error("coverage_subset: verifier {} out of range", v);
            if (taken.count({ role::verification, v }))
                throw config_error("coverage_subset: verifier {} is not honest", v);
        }
        if (liveness_ceiling && *liveness_ceiling == 0)
            throw config_error("liveness_ceiling: must be positive");
        validate_expectations(expect);
    }

    scenario_config parse_config(const json &j)
    {
        only_keys(j, "", { "name", "seed", "blocks", "drain_rounds", "nodes", "stakes", "stake_overrides", "min_stake",
                           "small_fine", "n_cluster", "eta", "gas", "delta_t", "kappa_probe", "vdf_rate", "workload",
                           "adversaries", "coverage_subset", "liveness_ceiling", "expect" });
        scenario_config c;
        read(j, "name", c.name, "");
        read(j, "seed", c.seed, "");
        read(j, "blocks", c.blocks, "");
        read(j, "drain_rounds", c.drain_rounds, "");
        read(j, "small_fine", c.small_fine, "");
        read(j, "n_cluster", c.n_cluster, "");
        read(j, "eta", c.eta, "");
        read(j, "delta_t", c.delta_t, "");
        read(j, "kappa_probe", c.kappa_probe, "");
        read(j, "vdf_rate", c.vdf_rate, "");
        read(j, "coverage_subset", c.coverage_subset, "");
        if (j.contains("liveness_ceiling")) {
            uint32_t v = 0;
            read(j, "liveness_ceiling", v, "");
            c.liveness_ceiling = v;
        }
        if (j.contains("nodes")) {
            const auto &n = j["nodes"];
            only_keys(n, "nodes", { "collectors", "consensus", "executors", "verifiers" });
            read(n, "collectors", c.collectors, "nodes");
            read(n, "consensus", c.consensus_nodes, "nodes");
            read(n, "executors", c.executors, "nodes");
            read(n, "verifiers", c.verifiers, "nodes");
        }
        if (j.contains("stakes"))
            read_stakes(j["stakes"], c.stakes, "stakes");
        if (j.contains("min_stake"))
            read_stakes(j["min_stake"], c.min_stake, "min_stake");
        if (j.contains("stake_overrides")) {
            const auto &o = j["stake_overrides"];
            only_keys(o, "stake_overrides", { "collector", "consensus", "execution", "verification" });
            for (const auto &[k, v]: o.items()) {
                std::vector<uint64_t> list;
                read(o, k.c_str(), list, "stake_overrides");
                c.stake_overrides[role_from_name(k)] = std::move(list);
            }
        }
        if (j.contains("gas")) {
            const auto &g = j["gas"];
            only_keys(g, "gas", { "tx_limit", "chunk_limit" });
            read(g, "tx_limit", c.gas.tx_limit, "gas");
            read(g, "chunk_limit", c.gas.chunk_limit, "gas");
        }
        if (j.contains("workload")) {
            const auto &w = j["workload"];
            only_keys(w, "workload", { "collection_size", "collections_per_cluster", "registers" });
            read(w, "collection_size", c.workload.collection_size, "workload");
            read(w, "collections_per_cluster", c.workload.collections_per_cluster, "workload");
            read(w, "registers", c.workload.registers, "workload");
        }
        if (j.contains("adversaries")) {
            const auto &list = j["adversaries"];
            if (!list.is_array())
                throw config_error("adversaries: expected an array");
            for (size_t i = 0; i < list.size(); ++i) {
                const auto &a = list[i];
                const auto where = fmt::format("adversaries[{}]", i);
                only_keys(a, where, { "strategy", "indices", "cluster", "respond", "placement", "partner" });
                if (!a.contains("strategy"))
                    throw config_error("{}.strategy: missing", where);
                adversary_assignment x;
                std::string s;
                read(a, "strategy", s, where);
                x.kind = strategy_from_name(s);
                read(a, "indices", x.indices, where);
                read(a, "respond", x.respond, where);
                read(a, "partner", x.partner, where);
                if (a.contains("cluster")) {
                    uint32_t cl = 0;
                    read(a, "cluster", cl, where);
                    x.cluster = cl;
                }
                if (a.contains("placement")) {
                    std::string p;
                    read(a, "placement", p, where);
                    if (p == "random")
                        x.placement = fault_placement::random;
                    else if (p == "grind_colluders")
                        x.placement = fault_placement::grind_colluders;
                    else
                        throw config_error("{}.placement: unknown value '{}'", where, p);
                }
                c.adversaries.push_back(std::move(x));
            }
        }
        if (j.contains("expect"))
            c.expect = j["expect"];
        c.validate();
        return c;
    }

    scenario_config load_config(const std::filesystem::path &p)
    {
        std::ifstream in { p };
        if (!in)
            throw config_error("{}: cannot open config file", p.string());
        json j;
        try {
            j = json::parse(in);
        } catch (const nlohmann::json::parse_error &e) {
            throw config_error("{}: not valid JSON ({})", p.string(), e.what());
        }
        return parse_config(j);
    }

    json config_to_json(const scenario_config &c)
    {
        json j;
        j["name"] = c.name;
        j["seed"] = c.seed;
        j["blocks"] = c.blocks;
        j["drain_rounds"] = c.drain_rounds;
        j["nodes"] = { { "collectors", c.collectors }, { "consensus", c.consensus_nodes },
                       { "executors", c.executors }, { "verifiers", c.verifiers } };
        j["stakes"] = stakes_json(c.stakes);
        if (!c.stake_overrides.empty()) {
            json o = json::object();
            for (const auto &[r, v]: c.stake_overrides)
                o[role_name(r)] = v;
            j["stake_overrides"] = o;
        }
        j["min_stake"] = stakes_json(c.min_stake);
        j["small_fine"] = c.small_fine;
        j["n_cluster"] = c.n_cluster;
        j["eta"] = c.eta;
        j["gas"] = { { "tx_limit", c.gas.tx_limit }, { "chunk_limit", c.gas.chunk_limit } };
        j["delta_t"] = c.delta_t;
        j["kappa_probe"] = c.kappa_probe;
        j["vdf_rate"] = c.vdf_rate;
        j["workload"] = { { "collection_size", c.workload.collection_size },
                          { "collections_per_cluster", c.workload.collections_per_cluster },
                          { "registers", c.workload.registers } };
        json adv = json::array();
        for (const auto &a: c.adversaries) {
            json x;
            x["strategy"] = strategy_name(a.kind);
            if (a.kind == strategy::withholding_cluster) {
                x["cluster"] = *a.cluster;
            } else {
                x["indices"] = a.indices;
            }
            if (a.kind == strategy::faulty_executor) {
                x["respond"] = a.respond;
                x["placement"] = a.placement == fault_placement::random ? "random" : "grind_colluders";
            }
            if (a.kind == strategy::colluding_verifier)
                x["partner"] = a.partner;
            adv.push_back(std::move(x));
        }
        j["adversaries"] = std::move(adv);
        if (!c.coverage_subset.empty())
            j["coverage_subset"] = c.coverage_subset;
        if (c.liveness_ceiling)
            j["liveness_ceiling"] = *c.liveness_ceiling;
        j["expect"] = c.expect;
        return j;
    }
}

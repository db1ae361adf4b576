#include <sealnet/netsim.hpp>

namespace sealnet {

    namespace {
        // expectation name -> JSON type it takes
        struct expectation {
            const char *name;
            json::value_t type;
        };
        constexpr expectation known[] = {
            { "all_sealed", json::value_t::boolean },
            { "sealed_blocks", json::value_t::number_unsigned },
            { "no_slashing", json::value_t::boolean },
            { "honest_never_slashed", json::value_t::boolean },
            { "faulty_never_sealed", json::value_t::boolean },
            { "min_executor_slashed", json::value_t::number_unsigned },
            { "min_challenger_slashed", json::value_t::number_unsigned },
            { "min_rejected_lazy", json::value_t::number_unsigned },
            { "min_mccs", json::value_t::number_unsigned },
            { "timeout_slash", json::value_t::boolean },
            { "verdicts_include", json::value_t::array },
            { "max_seal_lag", json::value_t::number_unsigned },
        };

        size_t count_verdict(const run_report &r, verdict v)
        {
            return std::count_if(r.adjudications.begin(), r.adjudications.end(),
                                 [&](const adjudication_summary &a) { return a.outcome == v; });
        }
    }

    void validate_expectations(const json &expect)
    {
        if (!expect.is_object())
            throw config_error("expect: expected an object");
        for (const auto &[k, v]: expect.items()) {
            const auto it = std::find_if(std::begin(known), std::end(known),
                                         [&](const expectation &e) { return k == e.name; });
            if (it == std::end(known))
                throw config_error("expect.{}: unknown expectation", k);
            if (v.type() != it->type)
                throw config_error("expect.{}: wrong type", k);
            if (k == "verdicts_include")
                for (const auto &name: v) {
                    verdict tmp {};
                    try {
                        from_json(name, tmp);
                    } catch (const std::exception &) {
                        throw config_error("expect.verdicts_include: '{}' is not a verdict", name.dump());
                    }
                }
        }
    }

    std::vector<std::string> check_expectations(const run_report &r, const scenario_config &cfg)
    {
        std::vector<std::string> miss;
        const auto &e = cfg.expect;
        const auto flag = [&](const char *k) { return e.contains(k) && e[k].get<bool>(); };
        const auto num = [&](const char *k) { return e[k].get<uint64_t>(); };

        if (flag("all_sealed") && r.sealed_target_blocks != r.target_blocks)
            miss.push_back(fmt::format("all_sealed: {}/{} blocks sealed", r.sealed_target_blocks, r.target_blocks));
        if (e.contains("sealed_blocks") && r.sealed_target_blocks != num("sealed_blocks"))
            miss.push_back(fmt::format("sealed_blocks: got {}", r.sealed_target_blocks));
        if (flag("no_slashing") && !r.slashings.empty())
            miss.push_back(fmt::format("no_slashing: {} slashing entries", r.slashings.size()));
        if (flag("honest_never_slashed") && r.honest_slashed)
            miss.push_back("honest_never_slashed: an honest node was slashed");
        if (flag("faulty_never_sealed") && r.faulty_sealed)
            miss.push_back("faulty_never_sealed: a faulty result was sealed");
        if (e.contains("min_executor_slashed") && count_verdict(r, verdict::executor_slashed) < num("min_executor_slashed"))
            miss.push_back(fmt::format("min_executor_slashed: got {}", count_verdict(r, verdict::executor_slashed)));
        if (e.contains("min_challenger_slashed")
            && count_verdict(r, verdict::challenger_slashed) < num("min_challenger_slashed"))
            miss.push_back(fmt::format("min_challenger_slashed: got {}", count_verdict(r, verdict::challenger_slashed)));
        if (e.contains("min_rejected_lazy") && r.rejected_lazy_approvals < num("min_rejected_lazy"))
            miss.push_back(fmt::format("min_rejected_lazy: got {}", r.rejected_lazy_approvals));
        if (e.contains("min_mccs") && r.mccs_raised < num("min_mccs"))
            miss.push_back(fmt::format("min_mccs: got {}", r.mccs_raised));
        if (flag("timeout_slash")
            && std::none_of(r.adjudications.begin(), r.adjudications.end(), [](const adjudication_summary &a) {
                   return a.outcome == verdict::executor_slashed && a.has_waiting_proof;
               }))
            miss.push_back("timeout_slash: no executor slashed by waiting proof");
        if (e.contains("verdicts_include"))
            for (const auto &name: e["verdicts_include"]) {
                verdict v {};
                from_json(name, v);
                if (count_verdict(r, v) == 0)
                    miss.push_back(fmt::format("verdicts_include: no {}", verdict_name(v)));
            }
        if (e.contains("max_seal_lag") && r.max_seal_lag > num("max_seal_lag"))
            miss.push_back(fmt::format("max_seal_lag: got {}", r.max_seal_lag));
        if (cfg.liveness_ceiling) {
            if (r.sealed_target_blocks != r.target_blocks)
                miss.push_back(fmt::format("liveness: {}/{} blocks sealed", r.sealed_target_blocks, r.target_blocks));
            if (r.max_seal_lag > *cfg.liveness_ceiling)
                miss.push_back(fmt::format("liveness: seal lag {} exceeds ceiling {}", r.max_seal_lag,
                                           *cfg.liveness_ceiling));
        }
        return miss;
    }

    json report_to_json(const run_report &r)
    {
        json j;
        j["scenario"] = r.scenario;
        j["seed"] = r.seed;
        j["target_blocks"] = r.target_blocks;
        j["sealed_target_blocks"] = r.sealed_target_blocks;
        j["final_height"] = r.final_height;
        j["sealed_height"] = r.sealed_height;
        j["max_seal_lag"] = r.max_seal_lag;
        j["sealed_state"] = r.sealed_state;
        j["rejected_approvals"] = r.rejected_approvals;
        j["rejected_lazy_approvals"] = r.rejected_lazy_approvals;
        j["mccs_raised"] = r.mccs_raised;
        j["mcas_signed"] = r.mcas_signed;
        j["honest_slashed"] = r.honest_slashed;
        j["faulty_sealed"] = r.faulty_sealed;
        j["events"] = r.events;

        json seals = json::array();
        for (const auto &s: r.seals)
            seals.push_back({ { "sealed_height", s.sealed_height }, { "included_in", s.included_in },
                              { "result_hash", s.result_hash } });
        j["seals"] = std::move(seals);
        j["slashings"] = r.slashings;

        json adj = json::array();
        for (const auto &a: r.adjudications) {
            json x;
            x["height"] = a.height;
            x["challenge_id"] = a.challenge_id;
            x["outcome"] = a.outcome;
            x["penalized"] = a.penalized;
            x["mismatch_index"] = a.mismatch_index ? json(*a.mismatch_index) : json(nullptr);
            x["waiting_proof"] = a.has_waiting_proof;
            x["note"] = a.note;
            adj.push_back(std::move(x));
        }
        j["adjudications"] = std::move(adj);

        json det = json::array();
        for (const auto &d: r.detections)
            det.push_back({ { "height", d.height },
                            { "result_hash", d.result_hash },
                            { "chunks", d.chunks },
                            { "faulty_chunk", d.faulty_chunk },
                            { "checks_per_verifier", d.checks_per_verifier },
                            { "honest_verifiers", d.honest_verifiers },
                            { "honest_coverage", d.honest_coverage },
                            { "detected", d.detected },
                            { "sealed", d.sealed },
                            { "executor_slashed", d.executor_slashed } });
        j["detections"] = std::move(det);
        return j;
    }
}

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>

#include <CLI11.hpp>

#include <sealnet/analytics.hpp>
#include <sealnet/cli.hpp>
#include <sealnet/netsim.hpp>

namespace sealnet {

    namespace {
        namespace fs = std::filesystem;

        std::string default_out_dir()
        {
            if (const char *e = std::getenv("SEALNET_OUT_DIR"); e && *e)
                return e;
            return "sealnet-out";
        }

        void write_file(const fs::path &p, const std::string &content)
        {
            if (p.has_parent_path())
                fs::create_directories(p.parent_path());
            std::ofstream f { p, std::ios::binary | std::ios::trunc };
            if (!f)
                throw config_error("{}: cannot write", p.string());
            f << content;
            if (!f)
                throw config_error("{}: write failed", p.string());
        }

        std::string fmt_estimate(const mc_estimate &m)
        {
            return fmt::format("{:.6g} ± {:.2g} (3σ [{:.6g}, {:.6g}], {} hits / {} trials)", m.mean, m.std_error, m.lo,
                               m.hi, m.hits, m.trials);
        }

        struct simulate_args {
            std::string config;
            std::optional<uint64_t> seed;
            std::string out;
            bool quiet = false;
        };

        int cmd_simulate(const simulate_args &a, std::ostream &out)
        {
            auto cfg = load_config(a.config);
            if (a.seed) {
                cfg.seed = *a.seed;
                cfg.validate();
            }
            out << fmt::format("scenario {} seed {}\n", cfg.name, cfg.seed);

            const auto run = run_scenario(cfg);
            const auto &r = run.report;

            auto report = report_to_json(r);
            report["config"] = config_to_json(cfg);
            const auto misses = check_expectations(r, cfg);
            report["expectation_failures"] = misses;

            json chain;
            chain["scenario"] = cfg.name;
            chain["seed"] = cfg.seed;
            chain["blocks"] = run.artifacts.chain;
            chain["seals"] = report["seals"];
            chain["slashing_log"] = run.artifacts.final_ledger.slashing_log();

            const fs::path dir { a.out };
            const auto report_path = dir / (cfg.name + ".report.json");
            const auto chain_path = dir / (cfg.name + ".chain.json");
            write_file(report_path, report.dump(2) + "\n");
            write_file(chain_path, chain.dump(2) + "\n");

            out << fmt::format("{}/{} blocks sealed (chain height {}, sealed height {}, max seal lag {} rounds)\n",
                               r.sealed_target_blocks, r.target_blocks, r.final_height, r.sealed_height, r.max_seal_lag);
            out << fmt::format("slashing events: {}\n", r.slashings.size());
            if (!a.quiet) {
                for (const auto &s: r.slashings)
                    out << fmt::format("  height {} {} -{} ({})\n", s.height, to_string(s.node), s.amount, s.reason);
                for (const auto &ad: r.adjudications)
                    out << fmt::format("  verdict {} at height {}{}\n", verdict_name(ad.outcome), ad.height,
                                       ad.has_waiting_proof ? " (waiting proof)" : "");
            }
            size_t detected = 0, sealed = 0;
            for (const auto &d: r.detections) {
                detected += d.detected;
                sealed += d.sealed;
            }
            out << fmt::format("faulty results: {} published, {} detected, {} sealed\n", r.detections.size(), detected,
                               sealed);
            if (r.rejected_approvals)
                out << fmt::format("rejected approvals: {} ({} from lazy verifiers)\n", r.rejected_approvals,
                                   r.rejected_lazy_approvals);
            if (r.mccs_raised)
                out << fmt::format("missing-collection challenges: {}, attestations signed: {}\n", r.mccs_raised,
                                   r.mcas_signed);
            out << fmt::format("sealed state {}\n", r.sealed_state.hex());
            out << fmt::format("wrote {} and {}\n", report_path.string(), chain_path.string());

            if (!misses.empty()) {
                for (const auto &m: misses)
                    out << "expectation failed: " << m << "\n";
                return exit_assertion;
            }
            return exit_ok;
        }

        struct mc_args {
            uint64_t trials = 0;
            uint64_t seed = 1;
        };

        int cmd_p_error(const safety_params &p, const mc_args &mc, unsigned jobs, std::ostream &out)
        {
            p.validate();
            out << fmt::format("eta {} xi {} honest {} (n = {} chunks per verifier)\n", p.eta, p.xi, p.honest,
                               chunks_per_verifier(p.eta, p.xi));
            out << fmt::format("p_unchecked      {:.12g}\n", p_unchecked_all(p));
            out << fmt::format("with_replacement {:.12g}\n", p_unchecked_with_replacement(p));
            out << fmt::format("exact            {:.12g}\n", p_error_exact(p));
            out << fmt::format("bound            {:.12g}\n", p_error_bound(p));
            out << fmt::format("envelope         {:.12g}\n", p_error_envelope(p));
            if (mc.trials) {
                out << fmt::format("seed {}\n", mc.seed);
                const auto cov = monte_carlo_coverage(p, mc.trials, mc.seed, jobs);
                const auto err = monte_carlo_error(p, mc.trials, mc.seed, jobs);
                out << fmt::format("mc p_unchecked   {} {}\n", fmt_estimate(cov),
                                   cov.within(p_unchecked_all(p)) ? "agrees" : "DISAGREES");
                // exact is 1 - (1 - P)^Ξ, so it is checked by pushing the interval on P through it
                const auto lift = [&](double q) { return 1.0 - std::pow(1.0 - q, static_cast<double>(p.xi)); };
                const double ex = p_error_exact(p), lo = lift(cov.lo), hi = lift(cov.hi);
                out << fmt::format("mc exact         {:.6g} (3σ [{:.6g}, {:.6g}] from mc p_unchecked) {}\n", lift(cov.mean),
                                   lo, hi, lo <= ex && ex <= hi ? "agrees" : "DISAGREES");
                // the union event itself; exact treats chunks as failing independently, so this may differ
                out << fmt::format("mc any_unchecked {}\n", fmt_estimate(err));
            }
            return exit_ok;
        }

        int cmd_mcc(const mcc_params &p, bool breakdown, const mc_args &mc, unsigned jobs, std::ostream &out)
        {
            p.validate();
            const auto a = mcc_accept_probability(p);
            out << fmt::format("N {} honest {} byzantine {} n_cluster {} kappa {} (n_g = {}, threshold {})\n", p.total,
                               p.honest, p.byzantine, p.n_cluster, p.kappa, p.guarantors(), p.threshold());
            out << fmt::format("p_accept {:.12g}\n", a.p_accept);
            if (breakdown) {
                out << "byzantine_in_cluster,weight,worst_byzantine_guarantors,p_probe_fails,required_honest,p_accept\n";
                for (const auto &t: a.breakdown)
                    out << fmt::format("{},{},{},{},{},{}\n", t.byzantine_in_cluster, t.weight,
                                       t.worst_byzantine_guarantors, t.p_probe_fails, t.required_honest, t.p_accept);
            }
            if (mc.trials) {
                out << fmt::format("seed {}\n", mc.seed);
                const auto m = monte_carlo_mcc(p, mc.trials, mc.seed, jobs);
                out << fmt::format("mc p_accept {} {}\n", fmt_estimate(m), m.within(a.p_accept) ? "agrees" : "DISAGREES");
            }
            return exit_ok;
        }

        int cmd_required_eta(double target, uint32_t xi, uint32_t honest, std::ostream &out)
        {
            out << fmt::format("target {} xi {} honest {}\n", target, xi, honest);
            for (auto f: { bound_form::envelope, bound_form::polynomial }) {
                const auto r = required_eta(target, xi, honest, f);
                if (r.achievable)
                    out << fmt::format("{:<10} n {} chunks, eta {}, bound {:.6g}\n", bound_form_name(f), r.chunks,
                                       r.eta, r.bound);
                else
                    out << fmt::format("{:<10} unachievable (bound {:.6g} at eta 1)\n", bound_form_name(f), r.bound);
            }
            return exit_ok;
        }

        int cmd_emit_curves(const std::string &figure, const std::string &format, const std::string &dir,
                            std::ostream &out)
        {
            std::vector<curve> curves;
            if (figure == "fig4")
                curves.push_back(fig4_curve());
            else
                curves = fig6_curves();
            for (const auto &c: curves) {
                const fs::path p = fs::path { dir } / (c.name + "." + format);
                write_file(p, format == "csv" ? curve_csv(c) : curve_json(c).dump(2) + "\n");
                out << fmt::format("wrote {} ({} rows)\n", p.string(), c.rows.size());
            }
            return exit_ok;
        }
    }

    int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app { "sealnet: pipelined execute-then-verify simulator and safety analytics" };
        app.require_subcommand(1);
        app.fallthrough();
        unsigned jobs = 1;
        app.add_option("--jobs", jobs, "Monte Carlo worker threads")->check(CLI::Range(1u, 1024u));

        simulate_args sim;
        sim.out = default_out_dir();
        auto *simulate = app.add_subcommand("simulate", "run a scenario config");
        simulate->add_option("--config", sim.config, "scenario JSON")->required();
        simulate->add_option("--seed", sim.seed, "override the config's master seed");
        simulate->add_option("--out", sim.out, "output directory (default $SEALNET_OUT_DIR or sealnet-out)");
        simulate->add_flag("--quiet", sim.quiet, "omit per-event lines");

        auto *analytics = app.add_subcommand("analytics", "evaluate the safety formulas");
        analytics->require_subcommand(1);

        safety_params sp;
        mc_args mc;
        auto *p_error = analytics->add_subcommand("p-error", "probability a faulty chunk escapes all honest verifiers");
        p_error->add_option("--eta", sp.eta)->required();
        p_error->add_option("--xi", sp.xi, "chunks in the result")->required();
        p_error->add_option("--honest", sp.honest, "honest verifiers")->required();

        mcc_params mp;
        bool breakdown = false;
        auto *mcc = analytics->add_subcommand("mcc", "probability a missing-collection challenge is accepted");
        mcc->add_option("--total", mp.total, "collectors N")->required();
        mcc->add_option("--honest", mp.honest, "honest collectors")->required();
        mcc->add_option("--byzantine", mp.byzantine, "Byzantine collectors")->required();
        mcc->add_option("--n-cluster", mp.n_cluster)->required();
        mcc->add_option("--kappa", mp.kappa, "guarantors probed per collector")->required();
        mcc->add_flag("--breakdown", breakdown, "print the per-cluster-composition terms");

        for (auto *sub: { p_error, mcc }) {
            sub->add_option("--mc", mc.trials, "also run a Monte Carlo check with this many trials");
            sub->add_option("--seed", mc.seed, "Monte Carlo seed");
        }

        double target = 0;
        uint32_t xi = 0, honest = 0;
        auto *req = analytics->add_subcommand("required-eta", "smallest per-verifier load meeting a target");
        req->add_option("--target", target)->required();
        req->add_option("--xi", xi)->required();
        req->add_option("--honest", honest)->required();

        std::string figure, format = "csv", curve_dir = default_out_dir();
        auto *curves = app.add_subcommand("emit-curves", "write figure data files");
        curves->add_option("figure", figure)->required()->check(CLI::IsMember({ "fig4", "fig6" }));
        curves->add_option("--format", format)->check(CLI::IsMember({ "csv", "json" }));
        curves->add_option("--out", curve_dir, "output directory (default $SEALNET_OUT_DIR or sealnet-out)");

        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError &e) {
            const int code = app.exit(e, out, err);
            return code == 0 ? exit_ok : exit_config;
        }

        try {
            if (*simulate)
                return cmd_simulate(sim, out);
            if (*p_error)
                return cmd_p_error(sp, mc, jobs, out);
            if (*mcc)
                return cmd_mcc(mp, breakdown, mc, jobs, out);
            if (*req)
                return cmd_required_eta(target, xi, honest, out);
            if (*curves)
                return cmd_emit_curves(figure, format, curve_dir, out);
        } catch (const config_error &e) {
            err << "config error: " << e.what() << "\n";
            return exit_config;
        } catch (const precondition_violation &e) {
            err << "invalid parameters: " << e.what() << "\n";
            return exit_config;
        } catch (const std::exception &e) {
            err << "error: " << e.what() << "\n";
            return exit_internal;
        }
        return exit_internal;
    }
}

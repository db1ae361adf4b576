// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/multiprecision/cpp_dec_float.hpp>

#include <sealnet/analytics.hpp>

#include "replay.hpp"

using namespace sealnet;
using namespace sealnet::test;

namespace {

    const std::filesystem::path configs { SEALNET_CONFIG_DIR };

    struct outcome {
        bool pass = true;
        std::string detail;

        void require(bool ok, const std::string &what)
        {
            if (!ok) {
                pass = false;
                detail += (detail.empty() ? "" : "; ") + what;
            }
        }
        void note(const std::string &s) { info += (info.empty() ? "" : ", ") + s; }
        std::string info;
    };

    int failures = 0;

    void criterion(int id, const char *title, double budget_s, const std::function<void(outcome &)> &body)
    {
        outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            body(o);
        } catch (const std::exception &e) {
            o.require(false, fmt::format("exception: {}", e.what()));
        }
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(dt < budget_s, fmt::format("runtime {:.2f} s over the {:.0f} s budget", dt, budget_s));
        failures += !o.pass;
        std::cout << fmt::format("{} {:>2} {} ({:.2f} s){}{}\n", o.pass ? "PASS" : "FAIL", id, title, dt,
                                 o.info.empty() ? "" : ": " + o.info, o.detail.empty() ? "" : " -- " + o.detail)
                  << std::flush;
    }

    double chi2_critical(double df, double alpha)
    {
        return boost::math::quantile(boost::math::complement(boost::math::chi_squared(df), alpha));
    }

    bool has_verdict(const run_report &r, verdict v)
    {
        return std::any_of(r.adjudications.begin(), r.adjudications.end(),
                           [&](const adjudication_summary &a) { return a.outcome == v; });
    }

    // base for the detection-rate runs: one faulty executor, ten honest verifiers, n = 3 of about 20 chunks
    scenario_config detection_config(uint64_t seed)
    {
        auto c = load_config(configs / "faulty_executor.json");
        c.name = "detection";
        c.seed = seed;
        c.blocks = 1;
        c.drain_rounds = 8;
        c.eta = 0.15;
        c.gas = { 5, 20 };
        c.workload.collection_size = 40;
        c.expect = json::object();
        return c;
    }
}

int main()
{
    criterion(1, "verifier load at 1000 chunks and 667 honest verifiers", 1, [](outcome &o) {
        const auto a = required_eta(1e-6, 1000, 667), b = required_eta(1e-9, 1000, 667);
        o.note(fmt::format("n(1e-6) = {}, n(1e-9) = {}", a.chunks, b.chunks));
        o.require(a.achievable && a.chunks == 32, "1e-6 needs 32 chunks");
        o.require(b.achievable && b.chunks == 42, "1e-9 needs 42 chunks");
        const double b32 = p_error_bound({ 0.032, 1000, 667 }), b42 = p_error_bound({ 0.042, 1000, 667 });
        o.note(fmt::format("bound(3.2%) = {:.4g}, bound(4.2%) = {:.4g}", b32, b42));
        o.require(b32 <= 1e-6, "bound at 3.2% above 1e-6");
        o.require(b42 <= 1e-9, "bound at 4.2% above 1e-9");
    });

    criterion(2, "unchecked-chunk curve", 1, [](outcome &o) {
        using big = boost::multiprecision::cpp_dec_float_50;
        const auto c = fig4_curve(667, 1000, 100);
        o.require(c.rows.size() == 100, "grid size");
        double worst = 0;
        for (size_t i = 0; i < c.rows.size(); ++i) {
            const auto &r = c.rows[i];
            const auto n = static_cast<uint32_t>(std::ceil(r[0] * 1000 - 1e-9));
            const double ref = static_cast<double>(boost::multiprecision::pow(big(1000 - n) / 1000, 667));
            worst = std::max(worst, std::abs(r[2] - ref) / ref);
            if (i > 0)
                o.require(r[2] < c.rows[i - 1][2], fmt::format("not decreasing at row {}", i));
            // sampling without replacement leaves a chunk unchecked no more often than with replacement
            o.require(r[2] <= r[3], fmt::format("with-replacement curve below at row {}", i));
        }
        o.note(fmt::format("max relative error {:.2g}", worst));
        o.require(worst < 1e-12, "12 significant digits");
    });

    criterion(3, "Monte Carlo chunk coverage (50 chunks, 20 verifiers, eta 0.1)", 30, [](outcome &o) {
        const safety_params p { 0.1, 50, 20 };
        const auto mc = monte_carlo_coverage(p, 100000, 2024);
        o.note(fmt::format("mc {:.5f} vs {:.6f}", mc.mean, p_unchecked_all(p)));
        o.require(mc.within(p_unchecked_all(p)), "outside 3 sigma");
    });

    criterion(4, "chunking invariants over 1000 workloads", 10, [](outcome &o) {
        hash_stream rng { seed_from_u64(4) };
        uint64_t chunks = 0;
        for (int w = 0; w < 1000; ++w) {
            const uint64_t tx_limit = rng.uniform_range(1, 50);
            const uint64_t n = rng.uniform_range(2, 12);
            const uint64_t chunk_limit = tx_limit * n + rng.uniform_below(tx_limit);
            const gas_schedule g { tx_limit, chunk_limit };
            std::vector<uint64_t> gas(rng.uniform_range(1, 400));
            for (auto &x: gas)
                x = rng.uniform_range(1, tx_limit);
            const auto spans = chunking(gas, g);
            const double floor = (1.0 - 1.0 / double(g.ratio())) * double(chunk_limit);
            uint32_t expect_start = 0;
            for (size_t i = 0; i < spans.size(); ++i) {
                const auto end = i + 1 < spans.size() ? spans[i + 1].start : gas.size();
                uint64_t sum = 0;
                for (auto t = spans[i].start; t < end; ++t)
                    sum += gas[t];
                if (spans[i].start != expect_start || sum != spans[i].consumption || sum > chunk_limit
                    || (i + 1 < spans.size() && !(double(sum) > floor))) {
                    o.require(false, fmt::format("workload {} chunk {}", w, i));
                    return;
                }
                expect_start = static_cast<uint32_t>(end);
            }
            o.require(expect_start == gas.size(), fmt::format("workload {} not covered", w));
            chunks += spans.size();
        }
        o.note(fmt::format("{} chunks checked", chunks));
    });

    criterion(5, "honest baseline end to end", 10, [](outcome &o) {
        const auto c = load_config(configs / "honest_baseline.json");
        o.require(c.collectors == 12 && c.collectors / c.n_cluster == 3 && c.executors == 3 && c.verifiers == 10
                      && c.blocks == 20,
                  "fixture shape");
        const auto out = run_scenario(c);
        const auto &r = out.report;
        o.note(fmt::format("{}/{} sealed", r.sealed_target_blocks, r.target_blocks));
        o.require(r.sealed_target_blocks == r.target_blocks, "not all blocks sealed");
        o.require(r.slashings.empty(), "slashing occurred");
        const auto rep = serial_replay(out.artifacts);
        for (const auto &m: rep.mismatches)
            o.require(false, m);
        o.require(rep.checked >= r.target_blocks, "replay covered too few blocks");
        // the reported state of the last sealed target block, against the oracle
        std::map<std::string, int64_t> s = out.artifacts.genesis_state.registers();
        const uint64_t last = r.seals.empty() ? 0 : std::max_element(r.seals.begin(), r.seals.end(), [](auto &a, auto &b) {
            return a.sealed_height < b.sealed_height;
        })->sealed_height;
        for (uint64_t h = 1; h <= last; ++h)
            for (const auto &gc: out.artifacts.chain[h].collections) {
                const auto &t = out.artifacts.collection_texts.at(gc.collection_hash).transactions;
                s = replay(s, t);
            }
        register_state rs;
        for (const auto &[k, v]: s)
            rs.set(k, v);
        o.require(state_commitment(rs) == r.sealed_state, "sealed state differs from serial oracle");
        o.note("sealed state " + r.sealed_state.hex().substr(0, 16));
    });

    criterion(6, "faulty computation detection rate over 200 runs", 120, [](outcome &o) {
        double mean = 0, var = 0;
        uint64_t detected = 0, trials = 0, xi_sum = 0;
        for (uint64_t run = 0; run < 200; ++run) {
            const auto out = run_scenario(detection_config(5000 + run));
            const auto &r = out.report;
            o.require(!r.honest_slashed, fmt::format("run {}: honest node slashed", run));
            bool slashed = false, sealed = false, any = false;
            for (const auto &d: r.detections) {
                o.require(d.honest_verifiers == 10 && d.checks_per_verifier == chunks_per_verifier(0.15, d.chunks),
                          fmt::format("run {}: unexpected verifier shape", run));
                const double p = 1 - std::pow(1 - double(d.checks_per_verifier) / d.chunks, d.honest_verifiers);
                mean += p;
                var += p * (1 - p);
                ++trials;
                xi_sum += d.chunks;
                detected += d.detected;
                any |= d.detected;
                slashed |= d.executor_slashed;
                sealed |= d.detected && d.sealed;
            }
            if (any) {
                o.require(slashed, fmt::format("run {}: executor not slashed", run));
                o.require(!sealed, fmt::format("run {}: faulty result sealed", run));
            }
        }
        const double sd = std::sqrt(var);
        o.note(fmt::format("{} faulty results, mean chunks {:.1f}, detected {} vs expected {:.1f} ± {:.1f}", trials,
                           trials ? double(xi_sum) / trials : 0.0, detected, mean, sd));
        o.require(trials >= 200, "too few faulty results");
        o.require(std::abs(double(xi_sum) / double(trials) - 20) <= 4, "mean chunk count far from 20");
        o.require(std::abs(double(detected) - mean) <= 3 * sd, "detection rate outside 3 sigma");
    });

    criterion(7, "challenge outcomes in both directions", 30, [](outcome &o) {
        const auto s = run_scenario(load_config(configs / "spurious_challenger.json")).report;
        o.require(has_verdict(s, verdict::challenger_slashed), "spurious challenger not slashed");
        o.require(!s.honest_slashed, "honest node slashed in the spurious run");
        const auto t = run_scenario(load_config(configs / "faulty_executor_timeout.json")).report;
        const bool via_proof = std::any_of(t.adjudications.begin(), t.adjudications.end(), [](const auto &a) {
            return a.outcome == verdict::executor_slashed && a.has_waiting_proof;
        });
        o.require(via_proof, "silent executor not slashed via waiting proof");
        o.note(fmt::format("{} challenger verdicts, {} timeout verdicts", s.adjudications.size(), t.adjudications.size()));
    });

    criterion(8, "SPoCK properties and lazy verifiers", 30, [](outcome &o) {
        hash_stream rng { seed_from_u64(8) };
        uint64_t bad = 0;
        for (uint64_t i = 0; i < 10000; ++i) {
            const auto z = derive_seed(rng.seed(), "zeta", i), other = derive_seed(rng.seed(), "other", i);
            const auto a = make_identity(role::execution, static_cast<uint32_t>(rng.uniform_below(50)), i);
            const auto b = make_identity(role::verification, static_cast<uint32_t>(rng.uniform_below(50)), i);
            const auto pa = spock_create(z, a.id), pb = spock_create(z, b.id);
            bad += !spock_consistent(pa, a.id, pb, b.id);                        // completeness
            bad += spock_consistent(pa, a.id, spock_create(other, b.id), b.id); // soundness
            bad += spock_consistent(pa, a.id, pa, b.id);                        // copied proof
            bad += spock_verify(pa, b.id);
        }
        o.require(bad == 0, fmt::format("{} property failures", bad));
        const auto c = load_config(configs / "lazy_verifier.json");
        const auto r = run_scenario(c).report;
        o.note(fmt::format("{} lazy approvals rejected", r.rejected_lazy_approvals));
        o.require(r.rejected_lazy_approvals > 0, "no lazy approval rejected");
        o.require(r.rejected_approvals == r.rejected_lazy_approvals, "honest approval rejected");
        o.require(r.sealed_target_blocks == r.target_blocks, "lazy run did not seal");
        o.require(r.slashings.empty(), "slashing in the lazy run");
    });

    criterion(9, "missing-collection acceptance model", 120, [](outcome &o) {
        const mcc_params p { 30, 21, 9, 6, 2 };
        const double v = mcc_accept_probability(p).p_accept;
        const auto mc = monte_carlo_mcc(p, 100000, 909);
        o.note(fmt::format("model {:.6f}, mc {:.6f} ± {:.6f}", v, mc.mean, mc.std_error));
        o.require(mc.within(v), "outside 3 sigma");
        o.require(mcc_accept_probability({ 30, 30, 0, 6, 2 }).p_accept == 0.0, "no Byzantine collectors must give 0");
        for (const auto &c: fig6_curves(1000, 667, 333))
            for (const auto &r: c.rows)
                for (size_t i = 0; i < r.size(); ++i)
                    if (c.columns[i].rfind("p_", 0) == 0)
                        o.require(std::isfinite(r[i]) && r[i] >= 0 && r[i] <= 1,
                                  fmt::format("{} row {} out of range", c.name, r[0]));
    });

    criterion(10, "honest coverage with and without colluders", 120, [](outcome &o) {
        const auto base = load_config(configs / "colluding_verifiers.json");
        auto without = base;
        without.adversaries = { base.adversaries[0] };
        without.adversaries[0].placement = fault_placement::random;
        const uint32_t honest = static_cast<uint32_t>(base.coverage_subset.size());
        std::vector<double> a(honest + 1), b(honest + 1);
        const auto tally = [&](const scenario_config &c, std::vector<double> &h) {
            const auto r = run_scenario(c).report;
            for (const auto &d: r.detections)
                ++h[d.honest_coverage];
            return r.detections.size();
        };
        uint64_t na = 0, nb = 0;
        for (uint64_t run = 0; run < 100; ++run) {
            auto x = base, y = without;
            x.seed = y.seed = 7000 + run;
            na += tally(x, a);
            nb += tally(y, b);
        }
        // 2 x k homogeneity; sparse columns merged into the last kept one
        std::vector<std::pair<double, double>> cols;
        double ca = 0, cb = 0;
        for (uint32_t k = 0; k <= honest; ++k) {
            ca += a[k];
            cb += b[k];
            if (ca + cb >= 10) {
                cols.push_back({ ca, cb });
                ca = cb = 0;
            }
        }
        if (ca + cb > 0 && !cols.empty()) {
            cols.back().first += ca;
            cols.back().second += cb;
        }
        const double ta = double(na), tb = double(nb), tot = ta + tb;
        double chi2 = 0;
        for (const auto &[x, y]: cols) {
            const double col = x + y;
            const double ea = col * ta / tot, eb = col * tb / tot;
            chi2 += (x - ea) * (x - ea) / ea + (y - eb) * (y - eb) / eb;
        }
        const double df = double(cols.size()) - 1;
        const double pval = df > 0 ? boost::math::cdf(boost::math::complement(boost::math::chi_squared(df), chi2)) : 1.0;
        o.note(fmt::format("{} vs {} faulty results, chi2 {:.2f} on {} df, p = {:.3f}", na, nb, chi2, df, pval));
        o.require(na >= 100 && nb >= 100, "too few faulty results");
        o.require(df >= 1, "coverage counts degenerate");
        o.require(chi2 < chi2_critical(std::max(1.0, df), 0.01), "coverage distributions differ at 0.01");
    });

    criterion(11, "liveness under faulty executor and spurious challenger", 60, [](outcome &o) {
        const auto base = load_config(configs / "liveness_combined.json");
        o.require(base.liveness_ceiling.has_value(), "fixture has no ceiling");
        uint64_t worst = 0;
        for (uint64_t k = 0; k < 10; ++k) {
            auto c = base;
            c.seed = base.seed + k;
            const auto r = run_scenario(c).report;
            for (const auto &m: check_expectations(r, c))
                o.require(false, fmt::format("seed {}: {}", c.seed, m));
            worst = std::max(worst, r.max_seal_lag);
        }
        o.note(fmt::format("worst seal lag {} rounds, ceiling {}", worst, base.liveness_ceiling.value_or(0)));
    });

    std::cout << (failures ? fmt::format("{} criteria failed\n", failures) : std::string("all criteria passed\n"));
    return failures;
}

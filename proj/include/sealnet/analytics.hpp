#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"

namespace sealnet {

    struct safety_params {
        double eta = 0.0;      // η
        uint32_t xi = 1;       // Ξ, chunks in the result
        uint32_t honest = 0;   // Ñ, honest verifiers
        void validate() const; // throws precondition_violation
    };

    // ⌈η·Ξ⌉ with the same tolerant ceiling the verifier uses
    uint32_t chunks_per_verifier(double eta, uint32_t xi);

    // log C(n, k); -inf when k > n
    double log_choose(uint64_t n, uint64_t k);

    // (1 - n/Ξ)^Ñ: one given chunk is checked by none of the honest verifiers
    double p_unchecked_all(const safety_params &p);
    // 1 - (1 - P̄)^Ξ
    double p_error_exact(const safety_params &p);
    // Ξ·(1 - η)^Ñ
    double p_error_bound(const safety_params &p);
    // Ξ·e^(-η·Ñ), the looser envelope of the bound above
    double p_error_envelope(const safety_params &p);
    // (1 - 1/Ξ)^(n·Ñ), each verifier drawing its n chunks with replacement
    double p_unchecked_with_replacement(const safety_params &p);

    enum class bound_form { envelope, polynomial };
    const char *bound_form_name(bound_form f);

    struct eta_requirement {
        bool achievable = false;
        uint32_t chunks = 0; // n
        double eta = 0.0;    // n / Ξ
        double bound = 1.0;  // bound value at n (at n = Ξ when unachievable)
    };

    // smallest n in 1..Ξ whose bound at η = n/Ξ is ≤ target
    eta_requirement required_eta(double target, uint32_t xi, uint32_t honest, bound_form form = bound_form::envelope);

    struct mcc_params {
        uint32_t total = 0;      // N
        uint32_t honest = 0;     // Ñ
        uint32_t byzantine = 0;  // N̄
        uint32_t n_cluster = 1;
        uint32_t kappa = 1;      // κ_probe
        void validate() const;
        // n_g = 2⌊n_cluster/3⌋ + 1
        uint32_t guarantors() const { return 2 * (n_cluster / 3) + 1; }
        // MCAs needed: more than 2/3 of N
        uint32_t threshold() const { return 2 * total / 3 + 1; }
    };

    // P(0): every one of κ probed guarantors is Byzantine. κ > n_g probes all of them.
    double p_probe_fails(uint32_t n_g, uint32_t byzantine_guarantors, uint32_t kappa);
    // P(X ≥ r_min) for X ~ Binomial(trials, p), summed in log space
    double binomial_tail(uint32_t trials, int64_t r_min, double p);
    // hypergeometric weight of drawing h Byzantine members into a cluster
    double cluster_weight(const mcc_params &p, uint32_t h);

    struct mcc_cluster_term {
        uint32_t byzantine_in_cluster = 0;       // n̄_cluster
        double weight = 0.0;                     // hypergeometric probability
        uint32_t worst_byzantine_guarantors = 0; // maximizing n̄_g
        double p_probe_fails = 0.0;              // P(0) at that n̄_g
        int64_t required_honest = 0;             // r_min
        double p_accept = 0.0;                   // conditional, maximized over n̄_g
    };

    struct mcc_analysis {
        double p_accept = 0.0;
        std::vector<mcc_cluster_term> breakdown;
    };

    mcc_analysis mcc_accept_probability(const mcc_params &p);

    struct mc_estimate {
        uint64_t trials = 0;
        uint64_t hits = 0;
        double mean = 0.0;
        double std_error = 0.0;
        double lo = 0.0; // mean ± 3σ, clamped to [0, 1]
        double hi = 0.0;
        // |mean - value| within `sigmas` binomial standard errors evaluated at `value`
        bool within(double value, double sigmas = 3.0) const;
    };

    // Trials run in blocks of 4096 with per-block seeds, so the estimate does not
    // depend on `jobs`.
    // fraction of trials where chunk 0 is left unchecked, Fisher-Yates path
    mc_estimate monte_carlo_coverage(const safety_params &p, uint64_t trials, uint64_t seed, unsigned jobs = 1);
    // same, each verifier drawing n chunks with replacement
    mc_estimate monte_carlo_coverage_with_replacement(const safety_params &p, uint64_t trials, uint64_t seed,
                                                      unsigned jobs = 1);
    // fraction of trials where some chunk is left unchecked
    mc_estimate monte_carlo_error(const safety_params &p, uint64_t trials, uint64_t seed, unsigned jobs = 1);
    // cluster draw, worst-case guarantor choice, probe plans, threshold
    mc_estimate monte_carlo_mcc(const mcc_params &p, uint64_t trials, uint64_t seed, unsigned jobs = 1);

    struct curve {
        std::string name;
        std::vector<std::string> columns;
        std::vector<std::vector<double>> rows;
    };

    // η = n/1000 for n = 1..100 at Ñ = 667, Ξ = 1000
    curve fig4_curve(uint32_t honest = 667, uint32_t xi = 1000, uint32_t max_chunks = 100);
    // n_cluster sweep and κ_probe sweep at N = 1000, Ñ = 667, N̄ = 333
    std::vector<curve> fig6_curves(uint32_t total = 1000, uint32_t honest = 667, uint32_t byzantine = 333);

    std::string curve_csv(const curve &c);
    json curve_json(const curve &c);
}

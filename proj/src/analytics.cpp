#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

#include <sealnet/analytics.hpp>
#include <sealnet/challenges.hpp>
#include <sealnet/rng.hpp>
#include <sealnet/verifier.hpp>

namespace sealnet {

    namespace {
        constexpr uint64_t mc_block = 4096;
        constexpr double neg_inf = -std::numeric_limits<double>::infinity();

        // Neumaier-compensated running sum
        struct compensated {
            double sum = 0.0, c = 0.0;
            void add(double x)
            {
                const double t = sum + x;
                c += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
                sum = t;
            }
            double value() const { return sum + c; }
        };

        double log_factorial(uint64_t n)
        {
            static const std::vector<double> table = [] {
                std::vector<double> t(1 << 16);
                t[0] = 0.0;
                for (size_t i = 1; i < t.size(); ++i)
                    t[i] = std::lgamma(static_cast<double>(i) + 1.0);
                return t;
            }();
            return n < table.size() ? table[n] : std::lgamma(static_cast<double>(n) + 1.0);
        }

        hash32 draw_seed(hash_stream &rng)
        {
            hash32 h;
            for (int w = 0; w < 4; ++w) {
                const auto v = rng.next_u64();
                for (int i = 0; i < 8; ++i)
                    h[w * 8 + i] = static_cast<uint8_t>(v >> (56 - 8 * i));
            }
            return h;
        }

        // trials split into fixed blocks; block k always sees the stream derive_seed(seed, label, k)
        template <class Trial>
        mc_estimate run_blocks(uint64_t trials, uint64_t seed, unsigned jobs, std::string_view label, Trial trial)
        {
            if (trials == 0)
                throw precondition_violation("Monte Carlo needs at least one trial");
            const auto root = seed_from_u64(seed);
            const uint64_t blocks = (trials + mc_block - 1) / mc_block;
            std::vector<uint64_t> hits(blocks, 0);
            std::atomic<uint64_t> next { 0 };
            const auto work = [&] {
                for (uint64_t b; (b = next.fetch_add(1)) < blocks;) {
                    hash_stream rng { derive_seed(root, label, b) };
                    const auto n = std::min(mc_block, trials - b * mc_block);
                    uint64_t h = 0;
                    for (uint64_t i = 0; i < n; ++i)
                        h += trial(rng) ? 1 : 0;
                    hits[b] = h;
                }
            };
            const auto workers = static_cast<unsigned>(std::min<uint64_t>(std::max(1u, jobs), blocks));
            if (workers <= 1) {
                work();
            } else {
                std::vector<std::thread> pool;
                for (unsigned w = 0; w < workers; ++w)
                    pool.emplace_back(work);
                for (auto &t: pool)
                    t.join();
            }
            mc_estimate e;
            e.trials = trials;
            for (auto h: hits)
                e.hits += h;
            e.mean = static_cast<double>(e.hits) / static_cast<double>(trials);
            e.std_error = std::sqrt(e.mean * (1.0 - e.mean) / static_cast<double>(trials));
            e.lo = std::max(0.0, e.mean - 3.0 * e.std_error);
            e.hi = std::min(1.0, e.mean + 3.0 * e.std_error);
            return e;
        }
    }

    void safety_params::validate() const
    {
        if (!(eta > 0.0 && eta <= 1.0))
            throw precondition_violation("eta must lie in (0, 1], got {}", eta);
        if (xi < 1)
            throw precondition_violation("need at least one chunk");
    }

    uint32_t chunks_per_verifier(double eta, uint32_t xi)
    {
        return chunks_to_check(eta, xi);
    }

    double log_choose(uint64_t n, uint64_t k)
    {
        if (k > n)
            return neg_inf;
        return log_factorial(n) - log_factorial(k) - log_factorial(n - k);
    }

    double p_unchecked_all(const safety_params &p)
    {
        p.validate();
        const auto n = chunks_per_verifier(p.eta, p.xi);
        if (p.honest == 0)
            return 1.0;
        if (n >= p.xi)
            return 0.0;
        return std::exp(static_cast<double>(p.honest)
                        * std::log1p(-static_cast<double>(n) / static_cast<double>(p.xi)));
    }

    double p_error_exact(const safety_params &p)
    {
        const auto q = p_unchecked_all(p);
        if (q >= 1.0)
            return 1.0;
        return -std::expm1(static_cast<double>(p.xi) * std::log1p(-q));
    }

    double p_error_bound(const safety_params &p)
    {
        p.validate();
        if (p.eta >= 1.0)
            return p.honest == 0 ? static_cast<double>(p.xi) : 0.0;
        return static_cast<double>(p.xi) * std::exp(static_cast<double>(p.honest) * std::log1p(-p.eta));
    }

    double p_error_envelope(const safety_params &p)
    {
        p.validate();
        return static_cast<double>(p.xi) * std::exp(-p.eta * static_cast<double>(p.honest));
    }

    double p_unchecked_with_replacement(const safety_params &p)
    {
        p.validate();
        const auto n = chunks_per_verifier(p.eta, p.xi);
        const auto draws = static_cast<double>(n) * static_cast<double>(p.honest);
        if (draws == 0.0)
            return 1.0;
        if (p.xi == 1)
            return 0.0;
        return std::exp(draws * std::log1p(-1.0 / static_cast<double>(p.xi)));
    }

    const char *bound_form_name(bound_form f)
    {
        return f == bound_form::envelope ? "envelope" : "polynomial";
    }

    eta_requirement required_eta(double target, uint32_t xi, uint32_t honest, bound_form form)
    {
        if (!(target > 0.0 && target < 1.0))
            throw precondition_violation("target probability must lie in (0, 1), got {}", target);
        if (xi < 1)
            throw precondition_violation("need at least one chunk");
        eta_requirement r;
        for (uint32_t n = 1; n <= xi; ++n) {
            const safety_params sp { static_cast<double>(n) / xi, xi, honest };
            r.chunks = n;
            r.eta = sp.eta;
            r.bound = form == bound_form::envelope ? p_error_envelope(sp) : p_error_bound(sp);
            if (r.bound <= target) {
                r.achievable = true;
                return r;
            }
        }
        return r;
    }

    // --- missing collection model ----------------------------------------

    void mcc_params::validate() const
    {
        if (total != honest + byzantine)
            throw precondition_violation("collector counts disagree: {} != {} + {}", total, honest, byzantine);
        if (total < 1)
            throw precondition_violation("need at least one collector");
        if (n_cluster < 1 || n_cluster > total)
            throw precondition_violation("cluster size must lie in [1, {}], got {}", total, n_cluster);
    }

    double p_probe_fails(uint32_t n_g, uint32_t byzantine_guarantors, uint32_t kappa)
    {
        const auto k = std::min(kappa, n_g);
        if (byzantine_guarantors < k)
            return 0.0;
        // C(b, k) / C(n_g, k) as a product of k ratios
        double p = 1.0;
        for (uint32_t i = 0; i < k; ++i)
            p *= static_cast<double>(byzantine_guarantors - i) / static_cast<double>(n_g - i);
        return p;
    }

    double binomial_tail(uint32_t trials, int64_t r_min, double p)
    {
        if (r_min <= 0)
            return 1.0;
        if (r_min > static_cast<int64_t>(trials) || p <= 0.0)
            return 0.0;
        if (p >= 1.0)
            return 1.0;
        const double lp = std::log(p), lq = std::log1p(-p);
        const auto n = static_cast<int64_t>(trials);
        const auto term = [&](int64_t r) {
            return log_choose(trials, r) + static_cast<double>(r) * lp + static_cast<double>(n - r) * lq;
        };
        // the largest term in [r_min, n] sits at the mode or at r_min
        const auto mode = std::clamp<int64_t>(static_cast<int64_t>(std::floor((n + 1) * p)), 0, n);
        const auto peak = std::max(mode, r_min);
        const double ref = term(peak);
        compensated s;
        for (int64_t r = r_min; r <= n; ++r) {
            const double x = std::exp(term(r) - ref);
            s.add(x);
            if (r > peak && x < 1e-18 * s.value())
                break;
        }
        return std::min(1.0, std::exp(ref) * s.value());
    }

    double cluster_weight(const mcc_params &p, uint32_t h)
    {
        if (h > p.byzantine || h > p.n_cluster || p.n_cluster - h > p.honest)
            return 0.0;
        return std::exp(log_choose(p.byzantine, h) + log_choose(p.honest, p.n_cluster - h)
                        - log_choose(p.total, p.n_cluster));
    }

    mcc_analysis mcc_accept_probability(const mcc_params &p)
    {
        p.validate();
        const auto n_g = p.guarantors();
        const auto T = static_cast<int64_t>(p.threshold());
        mcc_analysis out;
        compensated total;
        for (uint32_t h = 0; h <= p.n_cluster; ++h) {
            const double w = cluster_weight(p, h);
            if (w == 0.0 && (h > p.byzantine || p.n_cluster - h > p.honest))
                continue;
            mcc_cluster_term t;
            t.byzantine_in_cluster = h;
            t.weight = w;
            t.p_accept = -1.0;
            for (uint32_t b = 0; b <= std::min(n_g, h); ++b) {
                const double p0 = p_probe_fails(n_g, b, p.kappa);
                // Byzantine collectors that are not guarantors all attest
                const int64_t r_min = T - (static_cast<int64_t>(p.byzantine) - b);
                const double acc = binomial_tail(p.honest, r_min, p0);
                if (acc > t.p_accept) {
                    t.p_accept = acc;
                    t.worst_byzantine_guarantors = b;
                    t.p_probe_fails = p0;
                    t.required_honest = r_min;
                }
            }
            total.add(w * t.p_accept);
            out.breakdown.push_back(t);
        }
        out.p_accept = std::clamp(total.value(), 0.0, 1.0);
        return out;
    }

    // --- Monte Carlo ---------------------------------------------------------

    bool mc_estimate::within(double value, double sigmas) const
    {
        const double sd = std::sqrt(value * (1.0 - value) / static_cast<double>(trials));
        return std::fabs(mean - value) <= sigmas * sd;
    }

    mc_estimate monte_carlo_coverage(const safety_params &p, uint64_t trials, uint64_t seed, unsigned jobs)
    {
        p.validate();
        const auto n = chunks_per_verifier(p.eta, p.xi);
        return run_blocks(trials, seed, jobs, "coverage", [&](hash_stream &rng) {
            for (uint32_t v = 0; v < p.honest; ++v) {
                const auto L = fisher_yates_sample(p.xi, draw_seed(rng), n);
                if (std::find(L.begin(), L.end(), 0u) != L.end())
                    return false;
            }
            return true;
        });
    }

    mc_estimate monte_carlo_coverage_with_replacement(const safety_params &p, uint64_t trials, uint64_t seed,
                                                      unsigned jobs)
    {
        p.validate();
        const auto n = chunks_per_verifier(p.eta, p.xi);
        return run_blocks(trials, seed, jobs, "coverage-replacement", [&](hash_stream &rng) {
            bool unchecked = true;
            for (uint64_t d = 0; d < uint64_t { n } * p.honest; ++d)
                unchecked &= rng.uniform_below(p.xi) != 0;
            return unchecked;
        });
    }

    mc_estimate monte_carlo_error(const safety_params &p, uint64_t trials, uint64_t seed, unsigned jobs)
    {
        p.validate();
        const auto n = chunks_per_verifier(p.eta, p.xi);
        return run_blocks(trials, seed, jobs, "error", [&](hash_stream &rng) {
            std::vector<bool> seen(p.xi, false);
            for (uint32_t v = 0; v < p.honest; ++v)
                for (auto i: fisher_yates_sample(p.xi, draw_seed(rng), n))
                    seen[i] = true;
            return std::find(seen.begin(), seen.end(), false) != seen.end();
        });
    }

    mc_estimate monte_carlo_mcc(const mcc_params &p, uint64_t trials, uint64_t seed, unsigned jobs)
    {
        const auto analysis = mcc_accept_probability(p);
        const auto n_g = p.guarantors();
        const auto T = p.threshold();
        // the adversary's guarantor choice per cluster composition, as in the model
        std::vector<uint32_t> worst(p.n_cluster + 1, 0);
        for (const auto &t: analysis.breakdown)
            worst[t.byzantine_in_cluster] = t.worst_byzantine_guarantors;
        // collectors 0..N̄-1 are Byzantine
        const auto collector = [](uint32_t i) { return node_id { role::collector, i, {} }; };

        return run_blocks(trials, seed, jobs, "mcc", [&](hash_stream &rng) {
            const auto cluster = fisher_yates_prefix(p.total, rng, p.n_cluster);
            const auto h = static_cast<uint32_t>(
                std::count_if(cluster.begin(), cluster.end(), [&](uint32_t i) { return i < p.byzantine; }));
            const auto b = worst[h];
            std::vector<node_id> guarantors;
            for (uint32_t i = 0; i < n_g; ++i)
                guarantors.push_back(collector(i < b ? i : p.byzantine + i));
            const auto challenge = draw_seed(rng);
            uint64_t mcas = p.byzantine - b;
            for (uint32_t j = 0; j < p.honest && mcas < T; ++j) {
                const auto plan = mcc_probe_plan(collector(p.byzantine + j), guarantors, p.kappa, challenge);
                if (std::all_of(plan.begin(), plan.end(), [&](const node_id &g) { return g.index < p.byzantine; }))
                    ++mcas;
            }
            return mcas >= T;
        });
    }

    // --- curves ----------------------------------------------------------------

    curve fig4_curve(uint32_t honest, uint32_t xi, uint32_t max_chunks)
    {
        curve c;
        c.name = "fig4";
        c.columns = { "eta", "chunks", "p_unchecked", "p_unchecked_with_replacement" };
        for (uint32_t n = 1; n <= std::min(max_chunks, xi); ++n) {
            const safety_params sp { static_cast<double>(n) / xi, xi, honest };
            c.rows.push_back({ sp.eta, static_cast<double>(n), p_unchecked_all(sp), p_unchecked_with_replacement(sp) });
        }
        return c;
    }

    std::vector<curve> fig6_curves(uint32_t total, uint32_t honest, uint32_t byzantine)
    {
        const auto eval = [&](uint32_t n_cluster, uint32_t kappa) {
            return mcc_accept_probability({ total, honest, byzantine, n_cluster, kappa }).p_accept;
        };
        curve by_cluster;
        by_cluster.name = "fig6_ncluster";
        by_cluster.columns = { "n_cluster", "n_g", "p_accept_kappa_1", "p_accept_kappa_2", "p_accept_kappa_3" };
        for (uint32_t n = 3; n <= std::min<uint32_t>(60, total); ++n)
            by_cluster.rows.push_back({ static_cast<double>(n), static_cast<double>(2 * (n / 3) + 1), eval(n, 1),
                                        eval(n, 2), eval(n, 3) });

        curve by_kappa;
        by_kappa.name = "fig6_kappa";
        by_kappa.columns = { "kappa_probe", "p_accept_ncluster_10", "p_accept_ncluster_20", "p_accept_ncluster_40" };
        for (uint32_t k = 0; k <= 10; ++k)
            by_kappa.rows.push_back({ static_cast<double>(k), eval(std::min<uint32_t>(10, total), k),
                                      eval(std::min<uint32_t>(20, total), k), eval(std::min<uint32_t>(40, total), k) });
        return { by_cluster, by_kappa };
    }

    std::string curve_csv(const curve &c)
    {
        std::string out;
        for (size_t i = 0; i < c.columns.size(); ++i)
            out += (i ? "," : "") + c.columns[i];
        out += '\n';
        for (const auto &row: c.rows) {
            for (size_t i = 0; i < row.size(); ++i)
                out += fmt::format("{}{}", i ? "," : "", row[i]);
            out += '\n';
        }
        return out;
    }

    json curve_json(const curve &c)
    {
        json j;
        j["name"] = c.name;
        j["columns"] = c.columns;
        json rows = json::array();
        for (const auto &r: c.rows)
            rows.push_back(r);
        j["rows"] = std::move(rows);
        return j;
    }
}

#include <numeric>

#include <sealnet/netsim.hpp>

namespace sealnet {

    void event_queue::schedule(uint64_t at, action a)
    {
        _q.push({ at, _seq++, std::move(a) });
    }

    uint64_t event_queue::run_one()
    {
        // move the action out before popping; it may schedule more events
        auto top = std::move(const_cast<item &>(_q.top()));
        _q.pop();
        ++_processed;
        top.fn();
        return top.at;
    }

    uint64_t delay_model::sample()
    {
        return _rng.uniform_range(_delta / 4, _delta);
    }

    std::vector<std::vector<uint32_t>> form_clusters(uint32_t collectors, uint32_t n_cluster, const hash32 &beacon)
    {
        if (n_cluster == 0)
            throw precondition_violation("cluster size must be positive");
        hash_stream rng { beacon };
        const auto order = fisher_yates_prefix(collectors, rng, collectors);
        std::vector<std::vector<uint32_t>> out;
        for (uint32_t i = 0; i < collectors; i += n_cluster) {
            const auto end = std::min(collectors, i + n_cluster);
            out.emplace_back(order.begin() + i, order.begin() + end);
        }
        return out;
    }
}

#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "types.hpp"

namespace sealnet {

    // exact rational threshold, e.g. {2, 3}
    struct fraction {
        uint64_t num = 2;
        uint64_t den = 3;
    };

    enum class threshold_mode { at_least, strictly_more };

    struct slashing_entry {
        node_id node;
        uint64_t amount = 0; // actually removed (clamped to the remaining stake)
        std::string reason;
        uint64_t height = 0;
        bool operator==(const slashing_entry &) const = default;
    };

    struct staking_event {
        node_id node;
        uint64_t amount = 0;
        uint64_t height = 0;
        bool operator==(const staking_event &) const = default;
    };

    // Per-node, per-role stake. Every change lands in exactly one of the two logs.
    class stake_ledger {
    public:
        void stake(const node_id &node, uint64_t amount, uint64_t height = 0);
        // returns the amount actually removed
        uint64_t slash(const node_id &node, uint64_t amount, std::string reason, uint64_t height);

        bool contains(const node_id &node) const;
        uint64_t stake_of(const node_id &node) const;
        uint64_t role_total(role r) const;
        std::vector<node_id> nodes(role r) const;
        // look up the registered identity for (role, index)
        const node_id &find(role r, uint32_t index) const;

        const std::vector<slashing_entry> &slashing_log() const { return _slashes; }
        const std::vector<staking_event> &staking_log() const { return _stakes; }
        bool operator==(const stake_ledger &) const = default;
    private:
        struct entry {
            node_id id;
            uint64_t amount = 0;
            bool operator==(const entry &) const = default;
        };
        using key = std::pair<role, uint32_t>;
        std::map<key, entry> _entries;
        std::vector<slashing_entry> _slashes;
        std::vector<staking_event> _stakes;

        const entry &lookup(const node_id &node) const;
    };

    // Σ stake(signers) ≥ κ·Σ stake(role), or > in strict mode. Duplicate signers count
    // once. Exact integer arithmetic. Nodes of another role or unknown to the ledger
    // throw ledger_error.
    bool stake_fraction_met(std::span<const node_id> signers, role r, fraction kappa,
                            const stake_ledger &ledger, threshold_mode mode);
}

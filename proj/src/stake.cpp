#include <set>

#include <boost/multiprecision/cpp_int.hpp>

#include <sealnet/stake.hpp>

namespace sealnet {

    const stake_ledger::entry &stake_ledger::lookup(const node_id &node) const
    {
        const auto it = _entries.find({ node.r, node.index });
        if (it == _entries.end())
            throw ledger_error("unknown node {}", to_string(node));
        if (it->second.id.key != node.key)
            throw ledger_error("node {} presented a key that differs from the staked one", to_string(node));
        return it->second;
    }

    void stake_ledger::stake(const node_id &node, uint64_t amount, uint64_t height)
    {
        auto [it, inserted] = _entries.try_emplace({ node.r, node.index }, entry { node, 0 });
        if (!inserted && it->second.id.key != node.key)
            throw ledger_error("node {} re-staked with a different key", to_string(node));
        if (it->second.amount > UINT64_MAX - amount)
            throw ledger_error("stake overflow for {}", to_string(node));
        it->second.amount += amount;
        _stakes.push_back({ node, amount, height });
    }

    uint64_t stake_ledger::slash(const node_id &node, uint64_t amount, std::string reason, uint64_t height)
    {
        lookup(node);
        auto &e = _entries.at({ node.r, node.index });
        const auto taken = std::min(amount, e.amount);
        e.amount -= taken;
        _slashes.push_back({ node, taken, std::move(reason), height });
        return taken;
    }

    bool stake_ledger::contains(const node_id &node) const
    {
        const auto it = _entries.find({ node.r, node.index });
        return it != _entries.end() && it->second.id.key == node.key;
    }

    uint64_t stake_ledger::stake_of(const node_id &node) const { return lookup(node).amount; }

    uint64_t stake_ledger::role_total(role r) const
    {
        uint64_t t = 0;
        for (auto it = _entries.lower_bound({ r, 0 }); it != _entries.end() && it->first.first == r; ++it)
            t += it->second.amount;
        return t;
    }

    std::vector<node_id> stake_ledger::nodes(role r) const
    {
        std::vector<node_id> out;
        for (auto it = _entries.lower_bound({ r, 0 }); it != _entries.end() && it->first.first == r; ++it)
            out.push_back(it->second.id);
        return out;
    }

    const node_id &stake_ledger::find(role r, uint32_t index) const
    {
        const auto it = _entries.find({ r, index });
        if (it == _entries.end())
            throw ledger_error("unknown node {}#{}", role_name(r), index);
        return it->second.id;
    }

    bool stake_fraction_met(std::span<const node_id> signers, role r, fraction kappa,
                            const stake_ledger &ledger, threshold_mode mode)
    {
        using boost::multiprecision::uint128_t;
        if (kappa.den == 0)
            throw precondition_violation("threshold with zero denominator");
        std::set<std::pair<role, uint32_t>> seen;
        uint128_t signed_stake = 0;
        for (const auto &s: signers) {
            if (s.r != r)
                throw ledger_error("signer {} does not hold role {}", to_string(s), role_name(r));
            const auto amount = ledger.stake_of(s);
            if (seen.emplace(s.r, s.index).second)
                signed_stake += amount;
        }
        const uint128_t lhs = signed_stake * kappa.den;
        const uint128_t rhs = uint128_t { ledger.role_total(r) } * kappa.num;
        return mode == threshold_mode::strictly_more ? lhs > rhs : lhs >= rhs;
    }
}

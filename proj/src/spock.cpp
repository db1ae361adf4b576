#include <sealnet/codec.hpp>
#include <sealnet/spock.hpp>

namespace sealnet {

    spock spock_create(const hash32 &zeta, const node_id &prover)
    {
        const auto kp = keypair_from_seed(sha256(zeta.span()));
        return { kp.pk, sign(kp.sk, serialize(prover)) };
    }

    bool spock_verify(const spock &z, const node_id &claimed) noexcept
    {
        try {
            return verify(z.pk, serialize(claimed), z.sig);
        } catch (...) {
            return false;
        }
    }

    bool spock_consistent(const spock &a, const node_id &ida, const spock &b, const node_id &idb) noexcept
    {
        return a.pk == b.pk && spock_verify(a, ida) && spock_verify(b, idb);
    }

    bool receipts_consistent(const execution_receipt &a, const execution_receipt &b) noexcept
    {
        if (a.result != b.result || a.spocks.size() != b.spocks.size()
            || a.spocks.size() != a.result.chunks.size())
            return false;
        for (size_t i = 0; i < a.spocks.size(); ++i)
            if (!spock_consistent(a.spocks[i], a.executor.signer, b.spocks[i], b.executor.signer))
                return false;
        return true;
    }
}

#pragma once

#include "types.hpp"

namespace sealnet {

    // pk = keypair_from_seed(sha256(ζ)).pk, sig = sign(sk, canonical(prover))
    spock spock_create(const hash32 &zeta, const node_id &prover);
    bool spock_verify(const spock &z, const node_id &claimed) noexcept;
    bool spock_consistent(const spock &a, const node_id &ida, const spock &b, const node_id &idb) noexcept;

    // Two receipts agree when they carry the same result and every per-chunk
    // SPoCK pair is consistent.
    bool receipts_consistent(const execution_receipt &a, const execution_receipt &b) noexcept;
}

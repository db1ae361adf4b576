#pragma once

#include "types.hpp"

namespace sealnet {

    // Simulated VDF: output = sha256 iterated `iterations` times over start_mark.
    // rate = hash iterations per simulated tick.
    waiting_proof waiting_proof_make(const hash32 &start_mark, uint64_t duration_ticks, uint64_t rate);
    // true iff iterations ≥ rate·required_ticks and the chain recomputes to output
    bool waiting_proof_verify(const waiting_proof &p, uint64_t required_ticks, uint64_t rate);
    // same, additionally pinning the start mark
    bool waiting_proof_verify(const waiting_proof &p, const hash32 &expected_start, uint64_t required_ticks, uint64_t rate);
}

#include <cmath>

#include <sealnet/challenges.hpp>
#include <sealnet/rng.hpp>
#include <sealnet/spock.hpp>
#include <sealnet/verifier.hpp>

namespace sealnet {

    uint32_t chunks_to_check(double eta, uint32_t num_chunks)
    {
        if (!(eta > 0.0 && eta <= 1.0))
            throw precondition_violation("eta must lie in (0, 1], got {}", eta);
        const double x = eta * static_cast<double>(num_chunks);
        const double r = std::round(x);
        if (std::fabs(x - r) <= 1e-9 * std::max(1.0, std::fabs(x)))
            return static_cast<uint32_t>(r);
        return static_cast<uint32_t>(std::ceil(x));
    }

    std::vector<uint32_t> fisher_yates_sample(uint32_t len, const hash32 &seed, uint32_t n)
    {
        hash_stream rng { seed };
        return fisher_yates_prefix(len, rng, n);
    }

    static std::vector<uint32_t> expected_indices(const execution_result &result, const signature &p, double eta)
    {
        const auto xi = static_cast<uint32_t>(result.chunks.size());
        return fisher_yates_sample(xi, sha256(p.span()), chunks_to_check(eta, xi));
    }

    chunk_assignment chunk_self_selection(double eta, const execution_result &result, const secret_key &sk)
    {
        chunk_assignment a;
        a.proof = sign(sk, serialize(result));
        a.indices = expected_indices(result, a.proof, eta);
        return a;
    }

    bool verify_selection_proof(const execution_result &result, const public_key &pk, const signature &p,
                                std::span<const uint32_t> L, double eta)
    {
        if (!verify(pk, serialize(result), p))
            return false;
        const auto expect = expected_indices(result, p, eta);
        return std::equal(expect.begin(), expect.end(), L.begin(), L.end());
    }

    result_approval make_approval(const execution_result &result, const chunk_assignment &assignment,
                                  std::vector<spock> spocks, const node_identity &self)
    {
        result_approval a;
        a.attestation.result_hash = result_hash(result);
        a.attestation.sig = sign(self.sk, attestation_payload(a.attestation.result_hash));
        a.proof.chunk_indices = assignment.indices;
        a.proof.selection_proof = assignment.proof;
        a.proof.spocks = std::move(spocks);
        a.verifier.signer = self.id;
        a.verifier.sig = sign(self.sk, approval_payload(a));
        return a;
    }

    check_outcome check_assigned_chunks(const execution_receipt &receipt, const chunk_assignment &assignment,
                                        const chunk_fetcher &fetch, const node_identity &self,
                                        const gas_schedule &g)
    {
        const auto &res = receipt.result;
        std::vector<spock> zs;
        zs.reserve(assignment.indices.size());
        for (const auto i: assignment.indices) {
            if (i >= res.chunks.size())
                throw precondition_violation("assigned chunk {} outside result with {} chunks", i, res.chunks.size());
            auto data = fetch(receipt, i);
            if (!data)
                throw missing_chunk_data(i, "fetch failed");
            const auto &c = res.chunks[i];
            if (state_commitment(data->start_state) != c.start_state)
                throw missing_chunk_data(i, "start state does not match the receipt");
            const bool last = i + 1 == res.chunks.size();
            if (data->transactions.empty()
                || (!last && data->transactions.size() != res.chunks[i + 1].start_index - c.start_index))
                throw missing_chunk_data(i, "transaction count does not match the chunk boundaries");
            const auto &end = last ? res.final_state : res.chunks[i + 1].start_state;
            const auto next_tau0 = last ? no_next_chunk : res.chunks[i + 1].first_tx_gas;
            auto check = verify_chunk(data->start_state, data->transactions, c.first_tx_gas, end, next_tau0,
                                      c.consumption, g);
            if (!check.ok())
                return make_fcc(self, receipt, assignment, i, check.verdict, std::move(check.interim_commitments));
            zs.push_back(spock_create(check.zeta, self.id));
        }
        return make_approval(res, assignment, std::move(zs), self);
    }

    bool approval_well_formed(const result_approval &a, const execution_result &result, double eta)
    {
        const auto &vid = a.verifier.signer;
        if (vid.r != role::verification)
            return false;
        if (a.attestation.result_hash != result_hash(result))
            return false;
        if (!verify(vid.key, attestation_payload(a.attestation.result_hash), a.attestation.sig))
            return false;
        if (!verify(vid.key, approval_payload(a), a.verifier.sig))
            return false;
        if (a.proof.spocks.size() != a.proof.chunk_indices.size())
            return false;
        if (!verify_selection_proof(result, vid.key, a.proof.selection_proof, a.proof.chunk_indices, eta))
            return false;
        for (const auto &z: a.proof.spocks)
            if (!spock_verify(z, vid))
                return false;
        return true;
    }

    bool approval_valid(const result_approval &a, const execution_receipt &receipt, double eta)
    {
        if (!approval_well_formed(a, receipt.result, eta))
            return false;
        if (receipt.spocks.size() != receipt.result.chunks.size())
            return false;
        for (size_t j = 0; j < a.proof.chunk_indices.size(); ++j) {
            const auto i = a.proof.chunk_indices[j];
            if (!spock_consistent(a.proof.spocks[j], a.verifier.signer, receipt.spocks[i], receipt.executor.signer))
                return false;
        }
        return true;
    }
}

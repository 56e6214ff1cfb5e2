#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "segiso/geo_knn.hpp"
#include "segiso/partisan.hpp"
#include "segiso/types.hpp"

namespace segiso {

struct IsolationOutcome {
    std::optional<IsolationScore> score;
    std::optional<SkipReason> skip;
};

// Ingroup share over a neighborhood. Probabilistic variant averages each
// neighbor's posterior mass on the ego's party (mass 1 for registered
// co-partisans); discrete variant counts neighbors whose argmax class
// matches. The ego's own posterior only selects the ingroup party.
// Independents are skipped as egos but contribute as neighbors.
IsolationOutcome offline_isolation(const PartisanPosterior& ego_posterior,
                                   std::span<const PartisanPosterior> neighbor_posteriors,
                                   Variant variant);

struct SkipCounts {
    std::map<SkipReason, std::size_t> by_reason;
    std::size_t truncated_k = 0;  // populations smaller than k+1

    void add(SkipReason reason) { ++by_reason[reason]; }
    std::size_t total() const;
};

struct OfflineBatchResult {
    std::vector<IsolationScore> scores;  // ascending ego_id
    SkipCounts skips;
};

// One score per requested ego that has coordinates and discretizes to a
// major party. Indexes are keyed by state; egos whose state lacks an index
// are counted under not_in_index.
OfflineBatchResult offline_isolation_batch(
    std::span<const VoterRecord> voters, std::span<const PartisanPosterior> posteriors,
    std::span<const std::size_t> ego_indices,
    const std::map<std::string, SpatialIndex>& indexes_by_state, std::size_t k,
    Variant variant);

}  // namespace segiso

#include "segiso/offline_isolation.hpp"

#include <algorithm>
#include <unordered_map>

#include "segiso/errors.hpp"
#include "segiso/parallel.hpp"

namespace segiso {

std::size_t SkipCounts::total() const {
    std::size_t n = 0;
    for (const auto& [reason, count] : by_reason) n += count;
    return n;
}

IsolationOutcome offline_isolation(const PartisanPosterior& ego_posterior,
                                   std::span<const PartisanPosterior> neighbor_posteriors,
                                   Variant variant) {
    if (neighbor_posteriors.empty()) {
        throw_error(Errc::insufficient_data, "offline_isolation: empty neighbor list");
    }
    const Party ego_party = discretize(ego_posterior);
    if (ego_party == Party::ind) {
        return IsolationOutcome{std::nullopt, SkipReason::ego_independent};
    }

    double sum = 0.0;
    if (variant == Variant::probabilistic) {
        for (const PartisanPosterior& neighbor : neighbor_posteriors) {
            sum += neighbor.prob(ego_party);
        }
    } else {
        for (const PartisanPosterior& neighbor : neighbor_posteriors) {
            if (discretize(neighbor) == ego_party) sum += 1.0;
        }
    }

    IsolationScore score;
    score.value = sum / static_cast<double>(neighbor_posteriors.size());
    score.n_used = neighbor_posteriors.size();
    score.channel = Channel::offline;
    score.variant = variant;
    return IsolationOutcome{score, std::nullopt};
}

OfflineBatchResult offline_isolation_batch(
    std::span<const VoterRecord> voters, std::span<const PartisanPosterior> posteriors,
    std::span<const std::size_t> ego_indices,
    const std::map<std::string, SpatialIndex>& indexes_by_state, std::size_t k,
    Variant variant) {
    if (voters.size() != posteriors.size()) {
        throw_error(Errc::invalid_argument, "offline batch: roster/posterior size mismatch");
    }
    if (k < 1) throw_error(Errc::invalid_argument, "offline batch: k must be >= 1");

    std::unordered_map<VoterId, std::size_t> voter_row;
    voter_row.reserve(voters.size());
    for (std::size_t i = 0; i < voters.size(); ++i) voter_row.emplace(voters[i].id, i);

    struct Slot {
        std::optional<IsolationScore> score;
        std::optional<SkipReason> skip;
        bool truncated = false;
    };
    std::vector<Slot> slots(ego_indices.size());

    parallel_for(ego_indices.size(), [&](std::size_t begin, std::size_t end) {
        std::vector<PartisanPosterior> neighborhood;
        for (std::size_t s = begin; s < end; ++s) {
            Slot& slot = slots[s];
            const VoterRecord& ego = voters[ego_indices[s]];
            const PartisanPosterior& ego_posterior = posteriors[ego_indices[s]];
            if (discretize(ego_posterior) == Party::ind) {
                slot.skip = SkipReason::ego_independent;
                continue;
            }
            if (!ego.location) {
                slot.skip = SkipReason::no_coordinates;
                continue;
            }
            auto index_it = indexes_by_state.find(ego.state);
            if (index_it == indexes_by_state.end() || !index_it->second.contains(ego.id)) {
                slot.skip = SkipReason::not_in_index;
                continue;
            }
            const NeighborList neighbors = index_it->second.knn(ego.id, k);
            if (neighbors.neighbors.empty()) {
                slot.skip = SkipReason::not_in_index;  // singleton state population
                continue;
            }
            slot.truncated = neighbors.k_returned < neighbors.k_requested;

            neighborhood.clear();
            neighborhood.reserve(neighbors.neighbors.size());
            for (const Neighbor& n : neighbors.neighbors) {
                neighborhood.push_back(posteriors[voter_row.at(n.id)]);
            }
            IsolationOutcome outcome = offline_isolation(ego_posterior, neighborhood, variant);
            if (outcome.score) {
                outcome.score->ego_id = ego.id;
                slot.score = outcome.score;
            } else {
                slot.skip = outcome.skip;
            }
        }
    });

    OfflineBatchResult result;
    result.scores.reserve(ego_indices.size());
    for (const Slot& slot : slots) {
        if (slot.score) result.scores.push_back(*slot.score);
        if (slot.skip) result.skips.add(*slot.skip);
        if (slot.truncated) ++result.skips.truncated_k;
    }
    std::sort(result.scores.begin(), result.scores.end(),
              [](const IsolationScore& a, const IsolationScore& b) { return a.ego_id < b.ego_id; });
    return result;
}

}  // namespace segiso

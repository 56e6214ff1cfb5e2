#include "segiso/online_isolation.hpp"

#include "segiso/errors.hpp"

namespace segiso {

IsolationOutcome online_isolation(Party ego_party, std::span<const Party> friend_classes,
                                  std::size_t min_scored) {
    if (ego_party == Party::ind) {
        return IsolationOutcome{std::nullopt, SkipReason::ego_independent};
    }
    if (friend_classes.size() < min_scored || friend_classes.empty()) {
        return IsolationOutcome{std::nullopt, SkipReason::below_min_scored};
    }
    std::size_t ingroup = 0;
    for (Party friend_class : friend_classes) {
        if (friend_class == ego_party) ++ingroup;
    }
    IsolationScore score;
    score.value = static_cast<double>(ingroup) / static_cast<double>(friend_classes.size());
    score.n_used = friend_classes.size();
    score.channel = Channel::online;
    score.variant = Variant::discrete;
    return IsolationOutcome{score, std::nullopt};
}

std::optional<double> scored_friend_fraction(std::size_t n_scored, std::size_t n_friends) {
    if (n_friends == 0) return std::nullopt;
    if (n_scored > n_friends) {
        throw_error(Errc::invalid_argument, "scored_friend_fraction: scored exceeds total");
    }
    return static_cast<double>(n_scored) / static_cast<double>(n_friends);
}

}  // namespace segiso

#pragma once

#include <optional>
#include <span>

#include "segiso/offline_isolation.hpp"
#include "segiso/types.hpp"

namespace segiso {

// Ingroup share among an ego's scored friends. friend_classes must already
// be restricted to friends with ideology scores; egos with fewer than
// min_scored such friends are skipped, not errored.
IsolationOutcome online_isolation(Party ego_party, std::span<const Party> friend_classes,
                                  std::size_t min_scored = 10);

// Share of an ego's friends that have an ideology score. Zero friends is
// undefined and reported as a skip.
std::optional<double> scored_friend_fraction(std::size_t n_scored, std::size_t n_friends);

}  // namespace segiso

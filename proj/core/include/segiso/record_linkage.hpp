#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "segiso/types.hpp"

namespace segiso {

// Exact-match link key. Normalization is deterministic: ASCII case-fold,
// punctuation stripped, whitespace collapsed; diacritics and nicknames are
// not resolved.
struct LinkKey {
    std::string first;
    std::string last;
    std::string city;
    std::string state;

    bool complete() const {
        return !first.empty() && !last.empty() && !city.empty() && !state.empty();
    }
    std::string joined() const;
};

std::string normalize_key_component(std::string_view text);
LinkKey make_link_key(std::string_view first, std::string_view last, std::string_view city,
                      std::string_view state);

struct LinkedPair {
    VoterId voter_id{};
    AccountId account_id{};
};

struct LinkStats {
    std::uint64_t voters_total = 0;
    std::uint64_t accounts_total = 0;
    std::uint64_t voters_missing_key_fields = 0;
    std::uint64_t accounts_missing_key_fields = 0;
    std::uint64_t voters_dropped_duplicate_key = 0;
    std::uint64_t accounts_dropped_duplicate_key = 0;
    std::uint64_t pairs = 0;
};

struct LinkResult {
    std::vector<LinkedPair> pairs;  // ascending voter_id
    LinkStats stats;
};

// One-to-one join on (first, last, city, state). Only keys unique within
// each roster participate; every ambiguous row on either side is dropped
// and counted. Output is independent of input row order.
LinkResult link(std::span<const VoterRecord> voters, std::span<const SocialAccount> accounts);

}  // namespace segiso

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace segiso {

using VoterId = std::int64_t;
using AccountId = std::int64_t;

enum class Party : std::uint8_t { dem, rep, ind };

constexpr std::string_view party_name(Party p) {
    switch (p) {
        case Party::dem: return "dem";
        case Party::rep: return "rep";
        case Party::ind: return "ind";
    }
    return "?";
}

struct GeoPoint {
    double lat{};
    double lon{};
};

// One roster row from voters.csv. Empty strings and nullopt mark missing
// fields; there are no sentinel numbers.
struct VoterRecord {
    VoterId id{};
    std::string first;
    std::string last;
    std::string city;
    std::string state;
    std::optional<GeoPoint> location;
    std::string party_label;
    std::optional<int> age;
    std::string gender;
    std::string race;
    std::string precinct_id;
};

struct SocialAccount {
    AccountId id{};
    std::string first;
    std::string last;
    std::string city;
    std::string state;
};

// Directed follow edge: src follows dst. dst may be a peer account or an
// elite; elites need not appear in the account roster.
struct FollowEdge {
    AccountId src{};
    AccountId dst{};
};

enum class Channel : std::uint8_t { offline, online };
enum class Variant : std::uint8_t { probabilistic, discrete };

constexpr std::string_view channel_name(Channel c) {
    return c == Channel::offline ? "offline" : "online";
}
constexpr std::string_view variant_name(Variant v) {
    return v == Variant::probabilistic ? "probabilistic" : "discrete";
}

// Per-individual ingroup share over neighbors (offline) or scored friends
// (online).
struct IsolationScore {
    std::int64_t ego_id{};
    double value{};
    std::size_t n_used{};
    Channel channel{};
    Variant variant{};
};

enum class SkipReason : std::uint8_t {
    ego_independent,
    no_coordinates,
    not_in_index,
    below_min_scored,
    no_friends,
    ego_unscored,
};

constexpr std::string_view skip_reason_name(SkipReason r) {
    switch (r) {
        case SkipReason::ego_independent: return "ego_independent";
        case SkipReason::no_coordinates: return "no_coordinates";
        case SkipReason::not_in_index: return "not_in_index";
        case SkipReason::below_min_scored: return "below_min_scored";
        case SkipReason::no_friends: return "no_friends";
        case SkipReason::ego_unscored: return "ego_unscored";
    }
    return "?";
}

}  // namespace segiso

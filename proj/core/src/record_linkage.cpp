#include "segiso/record_linkage.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_map>

namespace segiso {

std::string normalize_key_component(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (unsigned char c : text) {
        if (std::isspace(c)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (std::ispunct(c)) continue;
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

LinkKey make_link_key(std::string_view first, std::string_view last, std::string_view city,
                      std::string_view state) {
    return LinkKey{normalize_key_component(first), normalize_key_component(last),
                   normalize_key_component(city), normalize_key_component(state)};
}

std::string LinkKey::joined() const {
    std::string out;
    out.reserve(first.size() + last.size() + city.size() + state.size() + 3);
    out += first;
    out.push_back('\x1f');
    out += last;
    out.push_back('\x1f');
    out += city;
    out.push_back('\x1f');
    out += state;
    return out;
}

namespace {

struct KeySlot {
    std::int64_t id = 0;
    std::uint32_t count = 0;
};

}  // namespace

LinkResult link(std::span<const VoterRecord> voters, std::span<const SocialAccount> accounts) {
    LinkResult result;
    result.stats.voters_total = voters.size();
    result.stats.accounts_total = accounts.size();

    std::unordered_map<std::string, KeySlot> voter_keys;
    voter_keys.reserve(voters.size());
    for (const VoterRecord& v : voters) {
        const LinkKey key = make_link_key(v.first, v.last, v.city, v.state);
        if (!key.complete()) {
            ++result.stats.voters_missing_key_fields;
            continue;
        }
        KeySlot& slot = voter_keys[key.joined()];
        slot.id = v.id;
        ++slot.count;
    }

    std::unordered_map<std::string, KeySlot> account_keys;
    account_keys.reserve(accounts.size());
    for (const SocialAccount& a : accounts) {
        const LinkKey key = make_link_key(a.first, a.last, a.city, a.state);
        if (!key.complete()) {
            ++result.stats.accounts_missing_key_fields;
            continue;
        }
        KeySlot& slot = account_keys[key.joined()];
        slot.id = a.id;
        ++slot.count;
    }

    for (const auto& [key, slot] : voter_keys) {
        if (slot.count > 1) result.stats.voters_dropped_duplicate_key += slot.count;
    }
    for (const auto& [key, slot] : account_keys) {
        if (slot.count > 1) result.stats.accounts_dropped_duplicate_key += slot.count;
    }

    for (const auto& [key, vslot] : voter_keys) {
        if (vslot.count != 1) continue;
        auto it = account_keys.find(key);
        if (it == account_keys.end() || it->second.count != 1) continue;
        result.pairs.push_back(LinkedPair{vslot.id, it->second.id});
    }
    std::sort(result.pairs.begin(), result.pairs.end(),
              [](const LinkedPair& a, const LinkedPair& b) { return a.voter_id < b.voter_id; });
    result.stats.pairs = result.pairs.size();
    return result;
}

}  // namespace segiso

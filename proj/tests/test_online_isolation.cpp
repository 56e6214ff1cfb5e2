#include <doctest.h>

#include <cmath>
#include <vector>

#include "segiso/online_isolation.hpp"
#include "segiso/rng.hpp"

using namespace segiso;

namespace {

std::vector<Party> classes(int dem, int rep, int ind) {
    std::vector<Party> out;
    out.insert(out.end(), dem, Party::dem);
    out.insert(out.end(), rep, Party::rep);
    out.insert(out.end(), ind, Party::ind);
    return out;
}

}  // namespace

TEST_CASE("counting ingroup friends") {
    const auto friends = classes(6, 3, 1);
    const IsolationOutcome out = online_isolation(Party::dem, friends, 10);
    REQUIRE(out.score.has_value());
    CHECK(out.score->value == doctest::Approx(0.6).epsilon(1e-15));
    CHECK(out.score->n_used == 10);
    CHECK(out.score->channel == Channel::online);
}

TEST_CASE("homogeneous friend set scores 1") {
    const auto friends = classes(0, 10, 0);
    const IsolationOutcome out = online_isolation(Party::rep, friends, 10);
    REQUIRE(out.score.has_value());
    CHECK(out.score->value == 1.0);
}

TEST_CASE("below min_scored is a skip with reason") {
    const auto friends = classes(4, 3, 1);
    const IsolationOutcome out = online_isolation(Party::dem, friends, 10);
    CHECK(!out.score.has_value());
    CHECK(out.skip == SkipReason::below_min_scored);

    const IsolationOutcome ind = online_isolation(Party::ind, friends, 1);
    CHECK(ind.skip == SkipReason::ego_independent);
}

TEST_CASE("independents count in the denominator, never the numerator") {
    const auto friends = classes(5, 0, 5);
    const IsolationOutcome out = online_isolation(Party::dem, friends, 10);
    REQUIRE(out.score.has_value());
    CHECK(out.score->value == 0.5);
}

TEST_CASE("recount oracle over random egos") {
    Rng rng(83);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::size_t n = 1 + rng.below(60);
        std::vector<Party> friends;
        std::size_t dem = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double u = rng.uniform();
            const Party p = u < 0.4 ? Party::dem : (u < 0.8 ? Party::rep : Party::ind);
            if (p == Party::dem) ++dem;
            friends.push_back(p);
        }
        const IsolationOutcome out = online_isolation(Party::dem, friends, 1);
        REQUIRE(out.score.has_value());
        CHECK(out.score->value == static_cast<double>(dem) / static_cast<double>(n));
        // value * n_used recovers the integer count.
        const double recovered = out.score->value * static_cast<double>(out.score->n_used);
        CHECK(std::llround(recovered) == static_cast<long long>(dem));
        CHECK(std::abs(recovered - static_cast<double>(dem)) < 1e-9);
    }
}

TEST_CASE("raising min_scored only removes egos, never changes surviving values") {
    Rng rng(89);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = rng.below(40);
        std::vector<Party> friends;
        for (std::size_t i = 0; i < n; ++i) {
            friends.push_back(rng.bernoulli(0.5) ? Party::dem : Party::rep);
        }
        const IsolationOutcome at1 = online_isolation(Party::rep, friends, 1);
        const IsolationOutcome at5 = online_isolation(Party::rep, friends, 5);
        const IsolationOutcome at10 = online_isolation(Party::rep, friends, 10);
        if (at10.score) {
            REQUIRE(at5.score);
            REQUIRE(at1.score);
            CHECK(at10.score->value == at5.score->value);
            CHECK(at5.score->value == at1.score->value);
        } else if (at5.score) {
            REQUIRE(at1.score);
            CHECK(at5.score->value == at1.score->value);
        }
    }
}

TEST_CASE("scored friend fraction") {
    CHECK(*scored_friend_fraction(3, 10) == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(*scored_friend_fraction(0, 5) == 0.0);
    CHECK(!scored_friend_fraction(0, 0).has_value());
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <map>
#include <vector>

#include "nsb/lottery.hpp"
#include "nsb/rng.hpp"

using namespace nsb;

TEST_CASE("scripted lottery is a table lookup") {
    ScriptedLottery lot({{1, 3}}, {1, 2});
    CHECK(lot.winner(1, 3));
    CHECK_FALSE(lot.winner(1, 4));
    CHECK_FALSE(lot.winner(2, 3));
    CHECK_THROWS_AS(lot.winner(9, 3), std::invalid_argument);
}

TEST_CASE("bernoulli lottery degenerate probabilities") {
    BernoulliLottery zero({{1, 0.0}}, 42);
    BernoulliLottery one({{1, 1.0}}, 42);
    for (Slot sl = 0; sl < 1000; ++sl) {
        CHECK_FALSE(zero.winner(1, sl));
        CHECK(one.winner(1, sl));
    }
    CHECK_THROWS_AS(zero.winner(5, 0), std::invalid_argument);
}

TEST_CASE("bernoulli empirical win rate within the 3-sigma binomial band") {
    // q = 0.1 over 1e5 slots: sigma = sqrt(p(1-p)/n) ~ 0.00095, band ~ 0.003.
    BernoulliLottery lot({{1, 0.1}}, 2024);
    long long wins = 0;
    const long long n = 100000;
    for (Slot sl = 0; sl < n; ++sl) wins += lot.winner(1, sl) ? 1 : 0;
    double rate = static_cast<double>(wins) / static_cast<double>(n);
    CHECK(rate > 0.094);
    CHECK(rate < 0.106);
}

TEST_CASE("bernoulli draws are random functions: order and repetition free") {
    BernoulliLottery lot({{1, 0.3}, {2, 0.7}}, 99);
    std::vector<std::pair<PartyId, Slot>> queries;
    for (PartyId p : {1u, 2u})
        for (Slot sl = 0; sl < 200; ++sl) queries.emplace_back(p, sl);
    std::map<std::pair<PartyId, Slot>, bool> first;
    for (const auto& q : queries) first[q] = lot.winner(q.first, q.second);
    Rng rng(5);
    rng.shuffle(queries);
    for (const auto& q : queries) {  // shuffled replay, with repeats
        CHECK(lot.winner(q.first, q.second) == first[q]);
        CHECK(lot.winner(q.first, q.second) == first[q]);
    }
}

TEST_CASE("bernoulli draws differ across seeds and parties") {
    BernoulliLottery a({{1, 0.5}, {2, 0.5}}, 1);
    BernoulliLottery b({{1, 0.5}, {2, 0.5}}, 2);
    int diff_seed = 0, diff_party = 0;
    for (Slot sl = 0; sl < 500; ++sl) {
        diff_seed += a.winner(1, sl) != b.winner(1, sl);
        diff_party += a.winner(1, sl) != a.winner(2, sl);
    }
    CHECK(diff_seed > 50);
    CHECK(diff_party > 50);
}

TEST_CASE("classify_slot per the lucky/super/adversarial definitions") {
    std::vector<PartyId> parties{1, 2, 3};
    HonestyMap honesty({{1, true}, {2, true}, {3, false}});

    auto classify_with = [&](std::set<std::pair<PartyId, Slot>> wins) {
        ScriptedLottery lot(std::move(wins), {1, 2, 3});
        return classify_slot(5, lot, honesty, parties);
    };

    SlotClass c = classify_with({{1, 5}});  // one honest winner
    CHECK(c.lucky);
    CHECK(c.super);
    CHECK_FALSE(c.adversarial);

    c = classify_with({{1, 5}, {2, 5}});  // two honest winners
    CHECK(c.lucky);
    CHECK_FALSE(c.super);
    CHECK_FALSE(c.adversarial);

    c = classify_with({{1, 5}, {3, 5}});  // one honest, one dishonest
    CHECK(c.lucky);
    CHECK(c.super);
    CHECK(c.adversarial);

    c = classify_with({{3, 5}});  // dishonest only
    CHECK_FALSE(c.lucky);
    CHECK_FALSE(c.super);
    CHECK(c.adversarial);

    c = classify_with({});  // nobody
    CHECK_FALSE(c.lucky);
    CHECK_FALSE(c.super);
    CHECK_FALSE(c.adversarial);
}

TEST_CASE("super implies lucky on random draws") {
    std::vector<PartyId> parties{1, 2, 3, 4};
    HonestyMap honesty({{1, true}, {2, true}, {3, true}, {4, false}});
    BernoulliLottery lot({{1, 0.4}, {2, 0.4}, {3, 0.4}, {4, 0.4}}, 77);
    for (Slot sl = 0; sl < 2000; ++sl) {
        SlotClass c = classify_slot(sl, lot, honesty, parties);
        if (c.super) CHECK(c.lucky);
    }
}

TEST_CASE("honest_advantage counts lucky minus adversarial over closed intervals") {
    std::vector<PartyId> parties{1, 2};
    HonestyMap honesty({{1, true}, {2, false}});
    // Honest wins at 1..5 (5 lucky); adversary wins at 4, 6 (2 adversarial).
    ScriptedLottery lot({{1, 1}, {1, 2}, {1, 3}, {1, 4}, {1, 5}, {2, 4}, {2, 6}}, {1, 2});

    CHECK(honest_advantage(1, 6, lot, honesty, parties) == 3);
    CHECK(honest_advantage(6, 6, lot, honesty, parties) == -1);  // single-slot interval
    CHECK(honest_advantage(1, 1, lot, honesty, parties) == 1);
    CHECK(honest_advantage(7, 9, lot, honesty, parties) == 0);
}

TEST_CASE("honest_advantage is additive over interval concatenation") {
    std::vector<PartyId> parties{1, 2, 3};
    HonestyMap honesty({{1, true}, {2, true}, {3, false}});
    BernoulliLottery lot({{1, 0.3}, {2, 0.2}, {3, 0.25}}, 31);
    for (Slot mid = 1; mid < 50; mid += 7) {
        long long whole = honest_advantage(0, 49, lot, honesty, parties);
        long long left = honest_advantage(0, mid - 1, lot, honesty, parties);
        long long right = honest_advantage(mid, 49, lot, honesty, parties);
        CHECK(whole == left + right);
    }
}

TEST_CASE("scripted and bernoulli lotteries with identical win tables classify identically") {
    std::vector<PartyId> parties{1, 2};
    HonestyMap honesty({{1, true}, {2, false}});
    BernoulliLottery bern({{1, 0.5}, {2, 0.5}}, 123);
    std::set<std::pair<PartyId, Slot>> wins;
    for (PartyId p : parties)
        for (Slot sl = 0; sl < 100; ++sl)
            if (bern.winner(p, sl)) wins.insert({p, sl});
    ScriptedLottery script(wins, {1, 2});
    for (Slot sl = 0; sl < 100; ++sl) {
        SlotClass a = classify_slot(sl, bern, honesty, parties);
        SlotClass b = classify_slot(sl, script, honesty, parties);
        CHECK(a.lucky == b.lucky);
        CHECK(a.super == b.super);
        CHECK(a.adversarial == b.adversarial);
    }
}

TEST_CASE("honesty map: genesis baker honest, unknown parties rejected") {
    HonestyMap m({{1, true}, {2, false}});
    CHECK(m.honest(kGenesisBaker));
    CHECK(m.honest(1));
    CHECK_FALSE(m.honest(2));
    CHECK_THROWS_AS(m.honest(3), std::invalid_argument);
    CHECK(m.known(kGenesisBaker));
    CHECK_FALSE(m.known(3));
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "nsb/bounds.hpp"
#include "nsb/lottery.hpp"
#include "nsb/rng.hpp"

using namespace nsb;

TEST_CASE("slot probabilities: closed forms on reference inputs") {
    SlotProbs z = slot_probs({0.0, 0.0}, {0.0});
    CHECK(z.p_ls == 0.0);
    CHECK(z.p_ss == 0.0);
    CHECK(z.p_as == 0.0);

    SlotProbs p = slot_probs({0.1, 0.1}, {0.1});
    CHECK(p.p_ls == doctest::Approx(0.19).epsilon(1e-12));
    CHECK(p.p_ss == doctest::Approx(0.18).epsilon(1e-12));
    CHECK(p.p_as == doctest::Approx(0.1).epsilon(1e-12));

    SlotProbs sure = slot_probs({1.0}, {});
    CHECK(sure.p_ls == 1.0);
    CHECK(sure.p_ss == 1.0);
    CHECK(sure.p_as == 0.0);

    CHECK_THROWS(slot_probs({1.5}, {}));
    CHECK_THROWS(slot_probs({0.5}, {-0.1}));
}

TEST_CASE("slot probabilities: p_SS <= p_LS always, both in [0, 1]") {
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        std::vector<double> hq, aq;
        for (std::uint64_t n = rng.below(5); n-- > 0;) hq.push_back(rng.uniform());
        for (std::uint64_t n = rng.below(4); n-- > 0;) aq.push_back(rng.uniform());
        SlotProbs p = slot_probs(hq, aq);
        CHECK(p.p_ss <= p.p_ls + 1e-15);
        CHECK(p.p_ls >= 0.0);
        CHECK(p.p_ls <= 1.0);
        CHECK(p.p_as >= 0.0);
        CHECK(p.p_as <= 1.0);
    }
}

TEST_CASE("slot probabilities agree with Monte-Carlo slot classification") {
    // Ties the analytic forms to the simulator's actual lottery: 100k slots,
    // 3-sigma binomial bands.
    std::vector<PartyId> parties{1, 2, 3};
    HonestyMap honesty({{1, true}, {2, true}, {3, false}});
    BernoulliLottery lot({{1, 0.1}, {2, 0.1}, {3, 0.1}}, 555);
    SlotProbs p = slot_probs({0.1, 0.1}, {0.1});

    const long long n = 100000;
    long long ls = 0, ss = 0, as = 0;
    for (Slot sl = 0; sl < n; ++sl) {
        SlotClass c = classify_slot(sl, lot, honesty, parties);
        ls += c.lucky;
        ss += c.super;
        as += c.adversarial;
    }
    auto band = [n](double prob) { return 3.0 * std::sqrt(prob * (1 - prob) / n); };
    CHECK(std::abs(static_cast<double>(ls) / n - p.p_ls) < band(p.p_ls));
    CHECK(std::abs(static_cast<double>(ss) / n - p.p_ss) < band(p.p_ss));
    CHECK(std::abs(static_cast<double>(as) / n - p.p_as) < band(p.p_as));
}

TEST_CASE("chernoff bounds: reference values and domain checks") {
    CHECK(chernoff_lower(10, 0.0) == 1.0);
    CHECK(chernoff_upper(10, 0.0) == 1.0);
    CHECK(chernoff_lower(8, 0.5) == doctest::Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(chernoff_lower(8, 0.5) == doctest::Approx(0.367879).epsilon(1e-5));
    CHECK(chernoff_upper(6, 1.0) == doctest::Approx(std::exp(-2.0)).epsilon(1e-6));

    CHECK_THROWS(chernoff_lower(-1.0, 0.5));
    CHECK_THROWS(chernoff_lower(1.0, 1.5));
    CHECK_THROWS(chernoff_upper(1.0, -0.1));
}

TEST_CASE("chernoff bounds dominate empirical tails") {
    // Sum of 500 Bernoulli(0.1) draws, 20k trials per delta.
    const int per_trial = 500;
    const int trials = 20000;
    const double q = 0.1;
    const double mu = per_trial * q;
    Rng rng(777);
    for (double delta : {0.3, 0.5, 0.8}) {
        int low = 0, high = 0;
        for (int t = 0; t < trials; ++t) {
            int sum = 0;
            for (int i = 0; i < per_trial; ++i) sum += rng.bernoulli(q);
            low += sum <= (1.0 - delta) * mu;
            high += sum >= (1.0 + delta) * mu;
        }
        CHECK(static_cast<double>(low) / trials <= chernoff_lower(mu, delta));
        CHECK(static_cast<double>(high) / trials <= chernoff_upper(mu, delta));
    }
}

TEST_CASE("epsilon condition for common prefix") {
    SlotProbs probs{0.0, 0.0, 0.1};
    EpsilonCondition c = cp_epsilon_condition(probs, 0.1, 0.1);
    CHECK(c.required == doctest::Approx(0.0444444).epsilon(1e-5));

    SlotProbs none{0.5, 0.4, 0.0};  // no adversarial stake
    c = cp_epsilon_condition(none, 0.1, 0.1);
    CHECK(c.required == 0.0);
    CHECK(c.satisfied);

    SlotProbs paper{0.19, 0.18, 0.1};  // the worked example: not satisfiable
    c = cp_epsilon_condition(paper, 0.1, 0.1);
    CHECK(c.actual == doctest::Approx(-0.02).epsilon(1e-12));
    CHECK_FALSE(c.satisfied);

    CHECK_THROWS(cp_epsilon_condition(probs, 1.0, 0.1));
}

TEST_CASE("common-prefix union bound: shape, monotonicity, clamping") {
    SlotProbs probs = slot_probs({0.2, 0.2, 0.2}, {0.05});
    REQUIRE(cp_epsilon_condition(probs, 0.1, 0.1).satisfied);

    // k = sl_now: exactly one term.
    double single = cp_failure_bound(400, 400, probs, 0.1, 0.1);
    double expect = std::exp(-0.01 * 400 * probs.p_ss / 2.0) +
                    std::exp(-0.01 * 400 * probs.p_as / 3.0);
    CHECK(single == doctest::Approx(std::min(1.0, expect)).epsilon(1e-12));

    // Larger k at fixed sl_now shrinks the bound (suffix-sum monotonicity).
    double prev = 2.0;
    for (std::uint64_t k : {50u, 100u, 200u, 400u}) {
        double b = cp_failure_bound(k, 1000, probs, 0.1, 0.1);
        CHECK(b <= prev);
        CHECK(b >= 0.0);
        CHECK(b <= 1.0);
        prev = b;
    }
    // Small k over a long horizon saturates the clamp.
    CHECK(cp_failure_bound(1, 100000, probs, 0.01, 0.01) == 1.0);

    CHECK_THROWS(cp_failure_bound(500, 400, probs, 0.1, 0.1));  // k > sl_now
    SlotProbs bad{0.19, 0.18, 0.1};
    CHECK_THROWS(cp_failure_bound(10, 100, bad, 0.1, 0.1));  // vacuous bound
}

TEST_CASE("chain-quality union bound mirrors the common-prefix one with lucky slots") {
    SlotProbs probs = slot_probs({0.2, 0.2, 0.2}, {0.05});
    EpsilonCondition c = cq_epsilon_condition(probs, 0.1, 0.1);
    CHECK(c.actual == doctest::Approx(probs.p_ls - probs.p_as).epsilon(1e-12));
    REQUIRE(c.satisfied);

    double single = cq_failure_bound(300, 300, probs, 0.1, 0.1);
    double expect = std::exp(-0.01 * 300 * probs.p_ls / 2.0) +
                    std::exp(-0.01 * 300 * probs.p_as / 3.0);
    CHECK(single == doctest::Approx(std::min(1.0, expect)).epsilon(1e-12));

    double wide = cq_failure_bound(50, 1000, probs, 0.1, 0.1);
    double narrow = cq_failure_bound(200, 1000, probs, 0.1, 0.1);
    CHECK(narrow <= wide);
}

TEST_CASE("growth bound: reference values") {
    GrowthBound z = cg_growth_bound(0, 0.2, 0.19);
    CHECK(z.min_growth == 0);
    CHECK(z.failure_prob == 1.0);

    GrowthBound g = cg_growth_bound(1000, 0.2, 0.19);
    CHECK(g.min_growth == 152);
    CHECK(g.failure_prob == doctest::Approx(std::exp(-3.8)).epsilon(1e-9));
    CHECK(g.failure_prob == doctest::Approx(0.02237).epsilon(1e-3));
}

TEST_CASE("growth bound dominates simulated honest-only growth shortfalls") {
    // 40 honest-only seeds: observed growth over r slots should fall below
    // min_growth no more often than failure_prob predicts (with slack for
    // the small sample).
    const std::uint64_t r = 400;
    const double delta = 0.5;
    SlotProbs p = slot_probs({0.1, 0.1, 0.1}, {});
    GrowthBound g = cg_growth_bound(r, delta, p.p_ls);

    int shortfalls = 0;
    const int seeds = 40;
    std::vector<PartyId> parties{1, 2, 3};
    HonestyMap honesty({{1, true}, {2, true}, {3, true}});
    for (int s = 0; s < seeds; ++s) {
        BernoulliLottery lot({{1, 0.1}, {2, 0.1}, {3, 0.1}}, 9000 + s);
        long long lucky = 0;
        for (Slot sl = 0; sl < r; ++sl)
            lucky += classify_slot(sl, lot, honesty, parties).lucky;
        shortfalls += lucky < static_cast<long long>(g.min_growth);
    }
    CHECK(static_cast<double>(shortfalls) / seeds <= g.failure_prob + 0.1);
}

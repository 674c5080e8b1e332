#include "nsb/bounds.hpp"

#include <cmath>
#include <stdexcept>

namespace nsb {

namespace {

void check_prob(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("probability out of [0, 1]");
}

void check_delta(double d) {
    if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("delta must be in [0, 1]");
}

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

// Shared union-bound kernel: sum over r in [k, sl_now] of
//   exp(-d^2 r p1 / 2) + exp(-d'^2 r p2 / 3).
double union_bound(std::uint64_t k, std::uint64_t sl_now, double p1, double p2, double delta,
                   double delta2, const EpsilonCondition& cond) {
    if (!cond.satisfied)
        throw std::invalid_argument(
            "epsilon condition unsatisfied: the union bound is vacuous for these parameters "
            "(need actual slack > required slack)");
    if (k > sl_now) throw std::invalid_argument("k must be <= sl_now");
    double sum = 0.0;
    for (std::uint64_t r = k; r <= sl_now; ++r) {
        double rr = static_cast<double>(r);
        sum += std::exp(-delta * delta * rr * p1 / 2.0) +
               std::exp(-delta2 * delta2 * rr * p2 / 3.0);
        if (sum >= 1.0) return 1.0;  // already clamped; remaining terms only add
    }
    return clamp01(sum);
}

}  // namespace

SlotProbs slot_probs(const std::vector<double>& honest_q, const std::vector<double>& adv_q) {
    for (double q : honest_q) check_prob(q);
    for (double q : adv_q) check_prob(q);

    double none_honest = 1.0;
    for (double q : honest_q) none_honest *= 1.0 - q;

    double exactly_one = 0.0;
    for (std::size_t i = 0; i < honest_q.size(); ++i) {
        double term = honest_q[i];
        for (std::size_t j = 0; j < honest_q.size(); ++j)
            if (j != i) term *= 1.0 - honest_q[j];
        exactly_one += term;
    }

    double none_adv = 1.0;
    for (double q : adv_q) none_adv *= 1.0 - q;

    return {1.0 - none_honest, exactly_one, 1.0 - none_adv};
}

double chernoff_lower(double mu, double delta) {
    if (mu < 0.0) throw std::invalid_argument("mu must be >= 0");
    check_delta(delta);
    return std::exp(-delta * delta * mu / 2.0);
}

double chernoff_upper(double mu, double delta) {
    if (mu < 0.0) throw std::invalid_argument("mu must be >= 0");
    check_delta(delta);
    return std::exp(-delta * delta * mu / 3.0);
}

EpsilonCondition cp_epsilon_condition(const SlotProbs& probs, double delta, double delta2) {
    check_delta(delta2);
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must be in [0, 1)");
    EpsilonCondition c;
    c.required = ((1.0 + delta2) / (1.0 - delta) - 1.0) * 2.0 * probs.p_as;
    c.actual = probs.p_ss - 2.0 * probs.p_as;
    c.satisfied = c.actual > c.required;
    return c;
}

double cp_failure_bound(std::uint64_t k, std::uint64_t sl_now, const SlotProbs& probs,
                        double delta, double delta2) {
    return union_bound(k, sl_now, probs.p_ss, probs.p_as, delta, delta2,
                       cp_epsilon_condition(probs, delta, delta2));
}

EpsilonCondition cq_epsilon_condition(const SlotProbs& probs, double delta, double delta2) {
    check_delta(delta2);
    if (!(delta >= 0.0 && delta < 1.0))
        throw std::invalid_argument("delta must be in [0, 1)");
    EpsilonCondition c;
    c.required = ((1.0 + delta2) / (1.0 - delta) - 1.0) * probs.p_as;
    c.actual = probs.p_ls - probs.p_as;
    c.satisfied = c.actual > c.required;
    return c;
}

double cq_failure_bound(std::uint64_t k, std::uint64_t sl_now, const SlotProbs& probs,
                        double delta, double delta2) {
    return union_bound(k, sl_now, probs.p_ls, probs.p_as, delta, delta2,
                       cq_epsilon_condition(probs, delta, delta2));
}

GrowthBound cg_growth_bound(std::uint64_t r, double delta, double p_ls) {
    check_delta(delta);
    check_prob(p_ls);
    double mu = static_cast<double>(r) * p_ls;
    GrowthBound g;
    g.min_growth = static_cast<std::uint64_t>(std::ceil((1.0 - delta) * mu));
    g.failure_prob = chernoff_lower(mu, delta);
    return g;
}

}  // namespace nsb

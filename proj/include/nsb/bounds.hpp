#pragma once

#include <cstdint>
#include <vector>

namespace nsb {

// Per-slot success probabilities of the three slot classifications under
// independent Bernoulli winner draws.
struct SlotProbs {
    double p_ls = 0.0;  // lucky: >= 1 honest winner
    double p_ss = 0.0;  // super: exactly 1 honest winner
    double p_as = 0.0;  // adversarial: >= 1 dishonest winner
};

// Closed forms:
//   p_LS = 1 - prod_h (1 - q_h)
//   p_SS = sum_h q_h * prod_{h' != h} (1 - q_h')
//   p_AS = 1 - prod_a (1 - q_a)
// Throws on probabilities outside [0, 1].
SlotProbs slot_probs(const std::vector<double>& honest_q, const std::vector<double>& adv_q);

// Tail bounds for a sum of independent indicator variables with mean mu:
//   Pr[sum <= (1 - delta) mu] <= exp(-delta^2 mu / 2)
//   Pr[sum >= (1 + delta) mu] <= exp(-delta^2 mu / 3)
// Domain: delta in [0, 1], mu >= 0; throws otherwise.
double chernoff_lower(double mu, double delta);
double chernoff_upper(double mu, double delta);

struct EpsilonCondition {
    double required = 0.0;  // ((1 + delta') / (1 - delta) - 1) * 2 * p_AS
    double actual = 0.0;    // p_SS - 2 * p_AS
    bool satisfied = false; // actual > required
};

// The slack condition under which the union bound below is non-vacuous.
// Domain: delta in [0, 1), delta' in [0, 1].
EpsilonCondition cp_epsilon_condition(const SlotProbs& probs, double delta, double delta2);

// Union bound over interval lengths r in [k, sl_now] (inclusive on both ends,
// the conservative reading) of
//   exp(-delta^2 r p_SS / 2) + exp(-delta'^2 r p_AS / 3),
// clamped to [0, 1]. Throws when the epsilon condition fails (the bound would
// be vacuous) or k > sl_now.
double cp_failure_bound(std::uint64_t k, std::uint64_t sl_now, const SlotProbs& probs,
                        double delta, double delta2);

// Same union bound with lucky slots in place of super slots and a plain
// (instead of doubled) adversarial count; needs p_LS > p_AS + epsilon, i.e.
// honest majority only.
EpsilonCondition cq_epsilon_condition(const SlotProbs& probs, double delta, double delta2);
double cq_failure_bound(std::uint64_t k, std::uint64_t sl_now, const SlotProbs& probs,
                        double delta, double delta2);

struct GrowthBound {
    std::uint64_t min_growth = 0;  // ceil((1 - delta) * r * p_LS)
    double failure_prob = 1.0;     // chernoff_lower(r * p_LS, delta)
};

GrowthBound cg_growth_bound(std::uint64_t r, double delta, double p_ls);

}  // namespace nsb

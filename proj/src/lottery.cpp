#include "nsb/lottery.hpp"

#include "nsb/rng.hpp"

namespace nsb {

BernoulliLottery::BernoulliLottery(std::map<PartyId, double> win_prob, std::uint64_t seed)
    : win_prob_(std::move(win_prob)), seed_(seed) {
    for (const auto& [p, q] : win_prob_) {
        (void)p;
        if (q < 0.0 || q > 1.0) throw std::invalid_argument("win probability out of [0,1]");
    }
}

bool BernoulliLottery::winner(PartyId p, Slot sl) const {
    auto it = win_prob_.find(p);
    if (it == win_prob_.end()) throw std::invalid_argument("unknown party id in lottery");
    return u01(mix64(seed_, p, sl)) < it->second;
}

ScriptedLottery::ScriptedLottery(std::set<std::pair<PartyId, Slot>> wins,
                                 std::set<PartyId> parties)
    : wins_(std::move(wins)), parties_(std::move(parties)) {
    for (const auto& [p, sl] : wins_) {
        (void)sl;
        if (parties_.count(p) == 0)
            throw std::invalid_argument("scripted win for unknown party id");
    }
}

bool ScriptedLottery::winner(PartyId p, Slot sl) const {
    if (parties_.count(p) == 0) throw std::invalid_argument("unknown party id in lottery");
    return wins_.count({p, sl}) > 0;
}

SlotClass classify_slot(Slot sl, const Lottery& lottery, const HonestyMap& honesty,
                        const std::vector<PartyId>& parties) {
    int honest_winners = 0;
    bool dishonest_winner = false;
    for (PartyId p : parties) {
        if (!lottery.winner(p, sl)) continue;
        if (honesty.honest(p))
            ++honest_winners;
        else
            dishonest_winner = true;
    }
    SlotClass cls;
    cls.lucky = honest_winners >= 1;
    cls.super = honest_winners == 1;
    cls.adversarial = dishonest_winner;
    return cls;
}

long long honest_advantage(Slot lo, Slot hi, const Lottery& lottery,
                           const HonestyMap& honesty, const std::vector<PartyId>& parties) {
    if (lo > hi) throw std::invalid_argument("honest_advantage: lo > hi");
    long long adv = 0;
    for (Slot sl = lo;; ++sl) {
        SlotClass cls = classify_slot(sl, lottery, honesty, parties);
        if (cls.lucky) ++adv;
        if (cls.adversarial) --adv;
        if (sl == hi) break;
    }
    return adv;
}

}  // namespace nsb

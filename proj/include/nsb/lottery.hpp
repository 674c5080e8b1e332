#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nsb/types.hpp"

namespace nsb {

// Abstract winner predicate. Implementations must behave as random
// *functions*: repeated queries with the same arguments return the same
// value, in any order. Anyone may query any (party, slot) pair, including
// future slots; the model does not restrict lookahead.
class Lottery {
public:
    virtual ~Lottery() = default;
    virtual bool winner(PartyId p, Slot sl) const = 0;
};

// Per-(party, slot) independent Bernoulli draws derived statelessly from
// hash(seed, party, slot), so the random-function contract holds without a
// cache.
class BernoulliLottery final : public Lottery {
public:
    BernoulliLottery(std::map<PartyId, double> win_prob, std::uint64_t seed);

    bool winner(PartyId p, Slot sl) const override;

private:
    std::map<PartyId, double> win_prob_;
    std::uint64_t seed_;
};

// Explicit table of (party, slot) wins.
class ScriptedLottery final : public Lottery {
public:
    explicit ScriptedLottery(std::set<std::pair<PartyId, Slot>> wins,
                             std::set<PartyId> parties);

    bool winner(PartyId p, Slot sl) const override;

private:
    std::set<std::pair<PartyId, Slot>> wins_;
    std::set<PartyId> parties_;
};

// Static corruption map, fixed at configuration time. The genesis baker
// (id 0) is honest in every scenario.
class HonestyMap {
public:
    HonestyMap() = default;
    explicit HonestyMap(std::map<PartyId, bool> honest) : honest_(std::move(honest)) {}

    bool honest(PartyId p) const {
        if (p == kGenesisBaker) return true;
        auto it = honest_.find(p);
        if (it == honest_.end()) throw std::invalid_argument("unknown party id");
        return it->second;
    }

    bool known(PartyId p) const { return p == kGenesisBaker || honest_.count(p) > 0; }

private:
    std::map<PartyId, bool> honest_;
};

struct SlotClass {
    bool lucky = false;        // >= 1 honest winner
    bool super = false;        // exactly 1 honest winner
    bool adversarial = false;  // >= 1 dishonest winner
};

SlotClass classify_slot(Slot sl, const Lottery& lottery, const HonestyMap& honesty,
                        const std::vector<PartyId>& parties);

// (#lucky slots) - (#adversarial slots) over the closed interval [lo, hi].
// May be negative.
long long honest_advantage(Slot lo, Slot hi, const Lottery& lottery,
                           const HonestyMap& honesty, const std::vector<PartyId>& parties);

}  // namespace nsb

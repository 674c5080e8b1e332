#pragma once

#include <memory>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nsb/blocktree.hpp"
#include "nsb/lottery.hpp"
#include "nsb/message.hpp"

namespace nsb {

// Read-only view of the global state handed to the adversary on every
// activation. The adversary is rushing: it sees the full send history and
// all in-flight messages with their delays, and may query the lottery for
// any party and slot, including future ones.
struct AdversaryContext {
    Slot slot = 0;
    Slot horizon = 0;
    const Messages* new_msgs = nullptr;            // delivered to corrupted parties now
    const std::vector<MsgTuple>* msg_pool = nullptr;
    const Messages* history = nullptr;
    const Lottery* lottery = nullptr;
    const HonestyMap* honesty = nullptr;
    const std::vector<PartyId>* exec_order = nullptr;
};

using AdversarySends = std::vector<std::pair<Message, DelayMap>>;

// One strategy instance acts for all corrupted parties jointly; the driver
// invokes it once per Receive and once per Bake transition. Outputs are
// flooded through the adversarial flooding functionality (which also feeds
// the forging monitor).
class AdversaryStrategy {
public:
    virtual ~AdversaryStrategy() = default;

    virtual AdversarySends on_rcv(const AdversaryContext& ctx) = 0;
    virtual AdversarySends on_bake(const AdversaryContext& ctx) = 0;

    // Hook for the "adversarial" scheduler policy; default keeps the order.
    virtual std::vector<PartyId> choose_exec_order(const AdversaryContext&,
                                                   std::vector<PartyId> current) {
        return current;
    }

    virtual std::string name() const = 0;
};

struct StrategyParams {
    int release_lead = 0;                  // withhold
    std::set<PartyId> partition;           // split
};

// Built-in strategies: "noop", "withhold", "equivocate", "split", and the
// test-only "forge" negative control that deliberately violates
// forging-freedom. All are deterministic given the scenario.
std::unique_ptr<AdversaryStrategy> make_strategy(const std::string& name,
                                                 const StrategyParams& params,
                                                 ChainContext chain_ctx);

}  // namespace nsb

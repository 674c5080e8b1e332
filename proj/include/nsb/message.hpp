#pragma once

#include <map>
#include <stdexcept>
#include <vector>

#include "nsb/types.hpp"

namespace nsb {

// The only message kind on the wire.
struct Message {
    Block block;

    friend bool operator==(const Message&, const Message&) = default;
};

// In-flight message addressed to one recipient. cd counts down on Increment;
// delivery happens at cd == 0 during Receive. Inserted at 1 (honest flood) or
// 1..2 (adversarial flood).
struct MsgTuple {
    Message msg;
    PartyId rcv = 0;
    int cd = 0;
};

// Per-recipient delay choice for adversarial sends; range is exactly {1, 2}.
class DelayMap {
public:
    DelayMap() = default;

    static DelayMap uniform(int delay) {
        DelayMap m;
        m.default_ = checked(delay);
        return m;
    }

    void set(PartyId p, int delay) { overrides_[p] = checked(delay); }

    int delay(PartyId p) const {
        auto it = overrides_.find(p);
        return it == overrides_.end() ? default_ : it->second;
    }

private:
    static int checked(int d) {
        if (d != 1 && d != 2) throw std::invalid_argument("delay must be 1 or 2");
        return d;
    }

    int default_ = 1;
    std::map<PartyId, int> overrides_;
};

using Messages = std::vector<Message>;

}  // namespace nsb

#pragma once

#include <functional>
#include <memory>
#include <string>

#include "nsb/blocktree.hpp"
#include "nsb/message.hpp"
#include "nsb/types.hpp"

namespace nsb {

// Chooses the payload an honest baker puts in a block. Deterministic and
// total. "empty" leaves payloads empty; "slot-tagged" encodes (slot, party)
// so otherwise identical blocks differ.
using TxSelector = std::function<Payload(Slot, PartyId)>;

TxSelector make_tx_selector(const std::string& type);

// Honest party state: identity plus a block tree of the configured
// implementation.
struct LocalState {
    PartyId id = 0;
    std::unique_ptr<BlockTree> tree;

    LocalState() = default;
    LocalState(PartyId id_, std::unique_ptr<BlockTree> tree_)
        : id(id_), tree(std::move(tree_)) {}
    LocalState(const LocalState& o) : id(o.id), tree(o.tree ? o.tree->clone() : nullptr) {}
    LocalState& operator=(const LocalState& o) {
        id = o.id;
        tree = o.tree ? o.tree->clone() : nullptr;
        return *this;
    }
    LocalState(LocalState&&) = default;
    LocalState& operator=(LocalState&&) = default;
};

// Extends the tree with every received block, in message order. Emits
// nothing. No pre-filtering: validity is enforced inside best_chain only.
// The optional filter reproduces the informal protocol description that
// drops blocks failing the winner check on receipt (off by default).
void honest_rcv(const Messages& msgs, Slot sl, LocalState& st,
                const WinnerFn& winner, bool filter_invalid = false);

// If the party wins sl: extend the best chain at cutoff sl - 1, record the
// new block in the own tree and return it for flooding. A same-slot head
// would break the strict slot decrease, hence the cutoff.
Messages honest_bake(Slot sl, const Payload& txs, LocalState& st, const WinnerFn& winner);

}  // namespace nsb

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

#include "nsb/config.hpp"
#include "nsb/lottery.hpp"
#include "nsb/types.hpp"

namespace nsb {

// Per-party view summary taken at a Ready point: head hash and length of the
// party's best chain. The blocks themselves are reconstructed on demand from
// the trace-wide block store, which keeps memory linear in the number of
// distinct blocks instead of (parties x slots x chain length).
struct SnapshotEntry {
    Hash head = 0;
    std::uint32_t length = 0;
};

// Result of an online monitor. first_slot and the witness blocks are
// meaningful only when violated.
struct MonitorFlag {
    bool violated = false;
    Slot first_slot = 0;
    std::string detail;
    Block witness_a, witness_b;
};

// One flooded message, in global send order.
struct HistoryRecord {
    Block block;
    Slot sent_slot = 0;
    bool adversarial = false;  // sent through the adversarial flooding functionality
};

struct Trace {
    ScenarioConfig cfg;
    std::vector<PartyId> honest_parties;  // ascending id order

    // snapshots[sl][i]: view of honest_parties[i] at Ready with clock == sl,
    // for sl in 0..horizon inclusive.
    std::vector<std::vector<SnapshotEntry>> snapshots;

    // slot_class[sl] for sl in 0..horizon.
    std::vector<SlotClass> slot_class;

    MonitorFlag collision;              // two distinct history blocks, same hash
    MonitorFlag forging;                // honest-bid block first flooded adversarially
    MonitorFlag knowledge_propagation;  // union-of-views containment at Delivered

    std::vector<HistoryRecord> history;

    // First-wins block store: genesis at index 0, then every distinct flooded
    // block in first-send order. store_index maps a hash to the first stored
    // block carrying it (ambiguous only if the collision monitor fired).
    std::vector<Block> store;
    std::unordered_map<Hash, std::uint32_t> store_index;

    // Head-first hash sequence of the chain behind a snapshot, reconstructed
    // through the store.
    std::vector<Hash> chain_hashes(const SnapshotEntry& s) const;
    Chain chain_blocks(const SnapshotEntry& s) const;
};

// Line-delimited export, one JSON object per (slot, honest party):
// {slot, party, best_chain_hashes, slot_class, monitor_flags}.
void export_trace_jsonl(const Trace& t, std::ostream& os);

// Line-delimited block store export: {hash, pred, slot, bid, txs_digest}.
void export_store_jsonl(const Trace& t, std::ostream& os);

// Graphviz rendering of the block store forest; honest blocks are boxes,
// adversarially flooded ones are shaded octagons.
void export_dot(const Trace& t, std::ostream& os);

}  // namespace nsb

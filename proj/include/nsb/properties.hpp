#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsb/trace.hpp"

namespace nsb {

enum class VerdictKind { Holds, PreconditionFailed, Violated };

struct Verdict {
    VerdictKind kind = VerdictKind::Holds;
    std::string detail;  // precondition reason or violation witness description
    // For the common-prefix checkers: which disjunct of the theorem held
    // (1 = prefix, 2 = bad slot interval exists); 0 when not applicable.
    int disjunct = 0;

    bool holds() const { return kind == VerdictKind::Holds; }
    bool violated() const { return kind == VerdictKind::Violated; }

    static Verdict pass(int disjunct = 0) { return {VerdictKind::Holds, "", disjunct}; }
    static Verdict precondition(std::string why) {
        return {VerdictKind::PreconditionFailed, std::move(why), 0};
    }
    static Verdict violation(std::string witness, int disjunct = 0) {
        return {VerdictKind::Violated, std::move(witness), disjunct};
    }
};

const char* to_string(VerdictKind k);

// Precomputed query structures over one trace: slot-class prefix sums, the
// block-store forest with binary lifting (ancestor tests, slot-bounded
// ancestor lookup, chain positions), and sparse tables for the common-prefix
// interval scan. Everything is read-only after construction, so checkers may
// share one index across threads.
class TraceIndex {
public:
    explicit TraceIndex(const Trace& t);

    const Trace& trace() const { return *t_; }
    Slot horizon() const { return static_cast<Slot>(t_->slot_class.size()) - 1; }

    // Slot-class counts over the closed interval [lo, hi]; 0 when hi < lo.
    long long lucky_count(Slot lo, Slot hi) const;
    long long super_count(Slot lo, Slot hi) const;
    long long adv_count(Slot lo, Slot hi) const;
    long long advantage(Slot lo, Slot hi) const;  // lucky - adversarial
    // h(x) = (#lucky slots < x) - (#adversarial slots < x); advantage(a, b) =
    // h(b + 1) - h(a). x is clamped to [0, horizon + 1].
    long long advantage_prefix(Slot x) const;

    // Store-forest queries. Nodes are block-store indices.
    std::uint32_t node_of(Hash h) const;  // throws if unknown
    // Deepest ancestor-or-self of v with slot <= sl (exists: genesis is slot 0).
    std::uint32_t ancestor_at_slot(std::uint32_t v, Slot sl) const;
    bool is_ancestor(std::uint32_t anc, std::uint32_t v) const;  // reflexive
    // Chain position |cfb|: depth from genesis, or 0 for unresolvable blocks.
    std::size_t position(std::uint32_t v) const { return depth_[v]; }

    // g(x) = (#super slots < x) - 2 (#adversarial slots < x) - the prefix
    // function behind the common-prefix bad event. Helpers for the interval
    // scan; ranges are clamped to the valid domain.
    long long g_prefix_max(Slot x) const;                 // max_{0 <= y <= x} g(y)
    long long g_min_shifted(Slot lo, Slot hi) const;      // min_{lo <= s <= hi} g(s + 1)
    long long d_min(Slot lo, Slot hi) const;              // min_{lo <= s <= hi} g(s+1) - gmax(s)

    std::size_t snapshot_index(PartyId p) const;  // index into honest_parties; throws
    const SnapshotEntry& snapshot(Slot sl, PartyId p) const;

private:
    const Trace* t_;
    std::vector<long long> lucky_ps_, super_ps_, adv_ps_;  // size horizon + 2
    std::vector<long long> g_, gmax_;                      // size horizon + 2
    std::vector<std::vector<long long>> g1_min_;           // sparse table over g(x)
    std::vector<std::vector<long long>> d_min_table_;      // sparse table over d(x)
    std::vector<std::uint32_t> parent_;  // store forest; self-parent marks a root
    std::vector<std::size_t> depth_;     // 0 = not connected to genesis
    std::vector<std::uint32_t> tin_, tout_;
    std::vector<std::vector<std::uint32_t>> up_;  // binary lifting over parent_
};

// Precondition monitors, recomputed from the recorded history (independently
// of the online monitors that ran during simulation).
Verdict check_collision_free(const Trace& t);
Verdict check_forging_free(const Trace& t);

// Containment of every honest Ready view in every honest Delivered view of
// the same slot. This one cannot be reconstructed from head snapshots alone,
// so it reports the online monitor's result.
Verdict check_knowledge_propagation(const Trace& t);

// Over the final history: no super block shares its chain position with any
// other honest block.
Verdict check_super_positions(const TraceIndex& idx);

// Growth: |snapshot(p1, sl1)| + w <= |snapshot(p2, sl2)| with w the number of
// lucky slots in [sl1 + 1, sl2 - 1 - growth_right_margin]. The margin (from
// the trace's checker params) accounts for the one-slot flooding delay: a
// block baked in slot s is in every honest snapshot only from slot s + 2 on.
Verdict check_chain_growth(const TraceIndex& idx, Slot sl1, PartyId p1, Slot sl2, PartyId p2);

// Quality of the window [i, j] (head-first indices, B_i the newer block) of
// snapshot(p, sl): #honest blocks in the window >= w*, where w* is the
// minimum honest advantage over all periods [a, b] within [0, sl - 1 -
// quality_margin] with b - a >= span + quality_period_slack, floored at 0.
Verdict check_chain_quality(const TraceIndex& idx, Slot sl, PartyId p, std::size_t i,
                            std::size_t j);

// All windows of snapshot(p, sl) at once (shared precomputation); worst
// verdict wins.
Verdict check_chain_quality_all(const TraceIndex& idx, Slot sl, PartyId p);

// Timed common prefix for one pair-state: either
//   (1) prune(min(k, sl1 - 2), snapshot(p1, sl1)) is a prefix of
//       snapshot(p2, sl2), or
//   (2) some interval [sl', sl''] with sl' <= k and
//       sl1 - cp_window_extension <= sl'' <= sl2 has
//       #super < 2 #adversarial + cp_super_slack.
// The verdict reports which disjunct held. The cutoff is capped at sl1 - 2
// because a block baked in slot sl1 - 1 cannot have reached any other party
// by the Ready point of slot sl1. The window extension mirrors the same
// snapshot/propagation slack on the bad-event side: divergence observed at
// (sl1, sl2) can be rooted slightly left of sl1.
Verdict check_common_prefix(const TraceIndex& idx, Slot sl1, PartyId p1, Slot sl2, PartyId p2,
                            Slot k);

struct CommonPrefixSweep {
    Verdict verdict;                     // worst across all cells
    std::uint64_t cells = 0;
    std::uint64_t second_disjunct_cells = 0;  // held only through disjunct 2
    std::uint64_t violated_cells = 0;
    // Largest k whose first disjunct holds on every cell (the empirical
    // rollback bound); pruning keeps fewer blocks as k shrinks, so the good
    // set is downward closed and this is well defined. horizon + 1 when every
    // k works.
    Slot max_k_all_prefix = 0;
};

// Sweeps all ordered honest pairs and all sl1 <= sl2 on the stride grid.
CommonPrefixSweep check_common_prefix_all(const TraceIndex& idx, Slot k, Slot stride);

}  // namespace nsb

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <unordered_map>
#include <vector>

#include "nsb/chain.hpp"
#include "nsb/hash.hpp"
#include "nsb/types.hpp"

namespace nsb {

// Everything a tree needs to judge validity of chains.
struct ChainContext {
    BlockHasher hasher;
    WinnerFn winner;
};

struct BestTip {
    Hash head = 0;
    std::size_t length = 0;
};

// Abstract block tree: the party-local store of received blocks from which
// the best chain is derived. Conforming implementations satisfy, for every
// reachable tree value t:
//   Instantiated   all_blocks(init) = [genesis]
//   Extendable     all_blocks(extend(t, b)) = all_blocks(t) ++ [b]  (member eq.)
//   Valid          valid_chain(best_chain(sl, t))
//   Optimal        no valid chain over {b in t | slot b <= sl} is longer
//   Self-contained best_chain(sl, t) is drawn from {b in t | slot b <= sl}
// Any block may be inserted, including invalid, future-slot or unlinkable
// ones. Duplicate insertions are stored once (the axioms only speak about
// member equality). Ties among equal-length longest chains break toward the
// lexicographically smallest head hash, so independent implementations are
// byte-comparable.
class BlockTree {
public:
    virtual ~BlockTree() = default;

    virtual void extend(const Block& b) = 0;
    virtual std::vector<Block> all_blocks() const = 0;
    virtual Chain best_chain(Slot sl) const = 0;

    // Head and length of best_chain(sl) without materializing the blocks.
    virtual BestTip best_tip(Slot sl) const = 0;

    virtual std::unique_ptr<BlockTree> clone() const = 0;
    virtual std::string name() const = 0;
};

// Naive implementation: keeps the flat pool of extended blocks and walks
// pred pointers from every candidate head on demand. O(n^2) per query; fine
// at small scale and simple enough to trust.
class ReferenceTree final : public BlockTree {
public:
    explicit ReferenceTree(ChainContext ctx);

    void extend(const Block& b) override;
    std::vector<Block> all_blocks() const override;
    Chain best_chain(Slot sl) const override;
    BestTip best_tip(Slot sl) const override;
    std::unique_ptr<BlockTree> clone() const override;
    std::string name() const override { return "reference"; }

private:
    ChainContext ctx_;
    std::vector<Block> pool_;  // genesis at index 0, insertion order, deduplicated
    std::unordered_multimap<Hash, std::size_t> index_;
};

// Amortized implementation: hash-indexed nodes with cached chain positions, a
// pending set for blocks that arrive before their predecessor, and a slot ->
// (depth, head) frontier answering best-tip queries in O(log n).
class IndexedTree final : public BlockTree {
public:
    explicit IndexedTree(ChainContext ctx);

    void extend(const Block& b) override;
    std::vector<Block> all_blocks() const override;
    Chain best_chain(Slot sl) const override;
    BestTip best_tip(Slot sl) const override;
    std::unique_ptr<BlockTree> clone() const override;
    std::string name() const override { return "indexed"; }

    // All heads of maximal-length valid chains at the cutoff, sorted by hash.
    // Used by the equivocation strategies.
    std::vector<Block> best_tips_all(Slot sl) const;

    // True once two distinct blocks with the same hash have been inserted;
    // pred resolution is then ambiguous and follows first-in-pool order.
    bool collision_suspect() const { return collision_suspect_; }

private:
    struct Node {
        Block block;
        Hash hash = 0;
        std::size_t depth = 0;    // chain length through this block; 0 = off-chain
        std::uint32_t parent = 0; // meaningful iff depth > 1
    };

    struct FrontierEntry {
        std::size_t depth;
        Hash head;
        std::uint32_t node;
    };

    void link(std::uint32_t idx);
    void frontier_update(Slot s, std::size_t depth, Hash head, std::uint32_t node);
    const FrontierEntry& frontier_at(Slot sl) const;

    ChainContext ctx_;
    std::vector<Node> nodes_;  // insertion order, genesis at 0
    std::unordered_map<Hash, std::uint32_t> by_hash_;  // first insertion wins
    std::unordered_multimap<Hash, std::uint32_t> nodes_by_hash_;  // dedup aid
    std::unordered_multimap<Hash, std::uint32_t> children_;       // pred hash -> node
    std::map<Slot, FrontierEntry> frontier_;
    bool collision_suspect_ = false;
};

// Test double with the future-slot filter removed: best_chain ignores the
// cutoff. Deliberately non-conforming (fails Optimal/Self-contained on
// future-slot pools); kept selectable so the conformance harness has a
// negative control.
class BrokenNoSlotFilterTree final : public BlockTree {
public:
    explicit BrokenNoSlotFilterTree(ChainContext ctx) : inner_(std::move(ctx)) {}

    void extend(const Block& b) override { inner_.extend(b); }
    std::vector<Block> all_blocks() const override { return inner_.all_blocks(); }
    Chain best_chain(Slot) const override;
    BestTip best_tip(Slot) const override;
    std::unique_ptr<BlockTree> clone() const override {
        return std::make_unique<BrokenNoSlotFilterTree>(*this);
    }
    std::string name() const override { return "broken-noslotfilter"; }

private:
    IndexedTree inner_;
};

// Implementation selection by name: "reference" | "indexed" |
// "broken-noslotfilter" (negative control).
std::unique_ptr<BlockTree> make_tree(const std::string& impl, ChainContext ctx);

}  // namespace nsb

#include "nsb/blocktree.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace nsb {

// ---------------------------------------------------------------------------
// ReferenceTree

ReferenceTree::ReferenceTree(ChainContext ctx) : ctx_(std::move(ctx)) {
    Block g = genesis_block();
    index_.emplace(ctx_.hasher(g), pool_.size());
    pool_.push_back(g);
}

void ReferenceTree::extend(const Block& b) {
    Hash h = ctx_.hasher(b);
    auto [lo, hi] = index_.equal_range(h);
    for (auto it = lo; it != hi; ++it)
        if (pool_[it->second] == b) return;  // set semantics
    index_.emplace(h, pool_.size());
    pool_.push_back(b);
}

std::vector<Block> ReferenceTree::all_blocks() const { return pool_; }

Chain ReferenceTree::best_chain(Slot sl) const {
    // Walk pred pointers from every candidate head; first block in pool
    // order resolves an ambiguous hash, exactly like cfb.
    std::unordered_map<Hash, std::size_t> resolve;
    resolve.reserve(pool_.size());
    for (std::size_t i = 0; i < pool_.size(); ++i)
        resolve.emplace(ctx_.hasher(pool_[i]), i);

    const Block* best_head = nullptr;
    std::size_t best_len = 0;
    Hash best_hash = 0;
    for (const Block& cand : pool_) {
        if (cand.slot > sl) continue;
        // Manual cfb walk with validity checks folded in.
        std::size_t len = 1;
        const Block* cur = &cand;
        bool ok = true;
        while (!is_genesis(*cur)) {
            if (!ctx_.winner(cur->bid, cur->slot)) { ok = false; break; }
            auto it = resolve.find(cur->pred);
            if (it == resolve.end()) { ok = false; break; }
            const Block* next = &pool_[it->second];
            if (cur->slot <= next->slot) { ok = false; break; }
            cur = next;
            if (++len > pool_.size() + 1) { ok = false; break; }  // cycle
        }
        if (!ok) continue;
        Hash h = ctx_.hasher(cand);
        if (len > best_len || (len == best_len && h < best_hash)) {
            best_len = len;
            best_hash = h;
            best_head = &cand;
        }
    }
    // The genesis-only chain is always a valid candidate, so best_head is set.
    Chain out;
    out.reserve(best_len);
    const Block* cur = best_head;
    while (true) {
        out.push_back(*cur);
        if (is_genesis(*cur)) break;
        cur = &pool_[resolve.at(cur->pred)];
    }
    return out;
}

BestTip ReferenceTree::best_tip(Slot sl) const {
    Chain c = best_chain(sl);
    return BestTip{ctx_.hasher(c.front()), c.size()};
}

std::unique_ptr<BlockTree> ReferenceTree::clone() const {
    return std::make_unique<ReferenceTree>(*this);
}

// ---------------------------------------------------------------------------
// IndexedTree

IndexedTree::IndexedTree(ChainContext ctx) : ctx_(std::move(ctx)) {
    Block g = genesis_block();
    Node node;
    node.block = g;
    node.hash = ctx_.hasher(g);
    node.depth = 1;
    nodes_.push_back(node);
    by_hash_.emplace(node.hash, 0);
    nodes_by_hash_.emplace(node.hash, 0);
    frontier_update(0, 1, node.hash, 0);
}

void IndexedTree::extend(const Block& b) {
    Hash h = ctx_.hasher(b);
    auto [lo, hi] = nodes_by_hash_.equal_range(h);
    bool hash_seen = lo != hi;
    for (auto it = lo; it != hi; ++it)
        if (nodes_[it->second].block == b) return;  // set semantics
    if (hash_seen) collision_suspect_ = true;

    auto idx = static_cast<std::uint32_t>(nodes_.size());
    Node node;
    node.block = b;
    node.hash = h;
    nodes_.push_back(node);
    nodes_by_hash_.emplace(h, idx);
    children_.emplace(b.pred, idx);
    by_hash_.emplace(h, idx);  // no-op if the hash is taken: first wins

    link(idx);
}

void IndexedTree::link(std::uint32_t idx) {
    // Try to connect idx to a valid ancestry; on success, reconnect any
    // pending descendants that were waiting for it.
    std::vector<std::uint32_t> work{idx};
    while (!work.empty()) {
        std::uint32_t cur = work.back();
        work.pop_back();
        Node& n = nodes_[cur];
        if (n.depth != 0) {
            // Already linked (only possible for the work-list seed).
        } else {
            auto pit = by_hash_.find(n.block.pred);
            if (pit == by_hash_.end()) continue;
            const Node& parent = nodes_[pit->second];
            if (parent.depth == 0) continue;                       // pending ancestry
            if (n.block.slot <= parent.block.slot) continue;       // slot order broken
            if (!ctx_.winner(n.block.bid, n.block.slot)) continue; // lottery check
            n.depth = parent.depth + 1;
            n.parent = pit->second;
            frontier_update(n.block.slot, n.depth, n.hash, cur);
        }
        // Descendants resolve pred through by_hash_, so only the canonical
        // node for this hash can unblock them.
        if (by_hash_.at(n.hash) != cur) continue;
        auto [lo, hi] = children_.equal_range(n.hash);
        for (auto it = lo; it != hi; ++it)
            if (nodes_[it->second].depth == 0) work.push_back(it->second);
    }
}

void IndexedTree::frontier_update(Slot s, std::size_t depth, Hash head, std::uint32_t node) {
    auto it = frontier_.upper_bound(s);
    if (it != frontier_.begin()) {
        const FrontierEntry& cur = std::prev(it)->second;
        bool better = depth > cur.depth || (depth == cur.depth && head < cur.head);
        if (!better) return;
    }
    frontier_[s] = FrontierEntry{depth, head, node};
    for (it = frontier_.upper_bound(s); it != frontier_.end();) {
        const FrontierEntry& e = it->second;
        if (e.depth < depth || (e.depth == depth && e.head >= head))
            it = frontier_.erase(it);
        else
            break;
    }
}

const IndexedTree::FrontierEntry& IndexedTree::frontier_at(Slot sl) const {
    auto it = frontier_.upper_bound(sl);
    // The genesis entry at slot 0 is always present.
    return std::prev(it)->second;
}

std::vector<Block> IndexedTree::all_blocks() const {
    std::vector<Block> out;
    out.reserve(nodes_.size());
    for (const Node& n : nodes_) out.push_back(n.block);
    return out;
}

BestTip IndexedTree::best_tip(Slot sl) const {
    const FrontierEntry& e = frontier_at(sl);
    return BestTip{e.head, e.depth};
}

Chain IndexedTree::best_chain(Slot sl) const {
    const FrontierEntry& e = frontier_at(sl);
    Chain out;
    out.reserve(e.depth);
    std::uint32_t cur = e.node;
    while (true) {
        const Node& n = nodes_[cur];
        out.push_back(n.block);
        if (n.depth == 1) break;
        cur = n.parent;
    }
    return out;
}

std::vector<Block> IndexedTree::best_tips_all(Slot sl) const {
    std::size_t best = frontier_at(sl).depth;
    std::vector<std::pair<Hash, const Block*>> tips;
    for (const Node& n : nodes_)
        if (n.depth == best && n.block.slot <= sl) tips.emplace_back(n.hash, &n.block);
    std::sort(tips.begin(), tips.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<Block> out;
    out.reserve(tips.size());
    for (const auto& [h, b] : tips) {
        (void)h;
        out.push_back(*b);
    }
    return out;
}

std::unique_ptr<BlockTree> IndexedTree::clone() const {
    return std::make_unique<IndexedTree>(*this);
}

// ---------------------------------------------------------------------------

Chain BrokenNoSlotFilterTree::best_chain(Slot) const {
    return inner_.best_chain(std::numeric_limits<Slot>::max());
}

BestTip BrokenNoSlotFilterTree::best_tip(Slot) const {
    return inner_.best_tip(std::numeric_limits<Slot>::max());
}

std::unique_ptr<BlockTree> make_tree(const std::string& impl, ChainContext ctx) {
    if (impl == "reference") return std::make_unique<ReferenceTree>(std::move(ctx));
    if (impl == "indexed") return std::make_unique<IndexedTree>(std::move(ctx));
    if (impl == "broken-noslotfilter")
        return std::make_unique<BrokenNoSlotFilterTree>(std::move(ctx));
    throw std::invalid_argument("unknown tree implementation: " + impl);
}

}  // namespace nsb

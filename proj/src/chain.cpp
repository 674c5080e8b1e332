#include "nsb/chain.hpp"

#include <algorithm>
#include <unordered_map>

namespace nsb {

bool valid_chain(const Chain& c, const WinnerFn& winner, const BlockHasher& hasher) {
    if (c.empty()) return false;
    if (!is_genesis(c.back())) return false;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const Block& b = c[i];
        const Block& succ = c[i + 1];
        if (!winner(b.bid, b.slot)) return false;
        if (b.pred != hasher(succ)) return false;
        if (b.slot <= succ.slot) return false;
    }
    return true;
}

Chain prune(Slot sl, const Chain& c) {
    Chain out;
    out.reserve(c.size());
    for (const Block& b : c)
        if (b.slot <= sl) out.push_back(b);
    return out;
}

bool is_prefix(const Chain& c1, const Chain& c2) {
    if (c1.size() > c2.size()) return false;
    return std::equal(c1.rbegin(), c1.rend(), c2.rbegin());
}

Chain cfb(const Block& b, const std::vector<Block>& bp, const BlockHasher& hasher) {
    // First block in pool order wins an ambiguous hash.
    std::unordered_map<Hash, const Block*> by_hash;
    by_hash.reserve(bp.size());
    for (const Block& p : bp) by_hash.emplace(hasher(p), &p);

    Chain out;
    const Block* cur = &b;
    // A walk longer than the pool plus the starting block has revisited
    // something.
    std::size_t limit = bp.size() + 1;
    while (true) {
        out.push_back(*cur);
        if (is_genesis(*cur)) return out;
        if (out.size() > limit) return {};
        auto it = by_hash.find(cur->pred);
        if (it == by_hash.end()) return {};
        cur = it->second;
    }
}

std::size_t pos(const Block& b, const std::vector<Block>& bp, const BlockHasher& hasher) {
    return cfb(b, bp, hasher).size();
}

}  // namespace nsb

#include "nsb/trace.hpp"

#include <iomanip>
#include <ostream>
#include <sstream>
#include <unordered_set>

namespace nsb {

namespace {

std::string hex(Hash h) {
    std::ostringstream os;
    os << "0x" << std::hex << h;
    return os.str();
}

// FNV-1a over the payload bytes; compact stand-in for the full payload in
// exports.
std::uint64_t payload_digest(const Payload& txs) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (std::uint8_t b : txs) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace

std::vector<Hash> Trace::chain_hashes(const SnapshotEntry& s) const {
    std::vector<Hash> out;
    out.reserve(s.length);
    Hash h = s.head;
    for (std::uint32_t i = 0; i < s.length; ++i) {
        out.push_back(h);
        auto it = store_index.find(h);
        if (it == store_index.end()) break;  // unresolvable only after a hash collision
        h = store[it->second].pred;
    }
    return out;
}

Chain Trace::chain_blocks(const SnapshotEntry& s) const {
    Chain out;
    out.reserve(s.length);
    Hash h = s.head;
    for (std::uint32_t i = 0; i < s.length; ++i) {
        auto it = store_index.find(h);
        if (it == store_index.end()) break;
        out.push_back(store[it->second]);
        h = store[it->second].pred;
    }
    return out;
}

void export_trace_jsonl(const Trace& t, std::ostream& os) {
    for (std::size_t sl = 0; sl < t.snapshots.size(); ++sl) {
        for (std::size_t i = 0; i < t.honest_parties.size(); ++i) {
            const SnapshotEntry& s = t.snapshots[sl][i];
            nlohmann::json line;
            line["slot"] = sl;
            line["party"] = t.honest_parties[i];
            auto& hashes = line["best_chain_hashes"] = nlohmann::json::array();
            for (Hash h : t.chain_hashes(s)) hashes.push_back(hex(h));
            if (sl < t.slot_class.size()) {
                const SlotClass& c = t.slot_class[sl];
                line["slot_class"] = {{"lucky", c.lucky},
                                      {"super", c.super},
                                      {"adversarial", c.adversarial}};
            }
            line["monitor_flags"] = {
                {"collision", t.collision.violated},
                {"forging", t.forging.violated},
                {"knowledge_propagation", t.knowledge_propagation.violated}};
            os << line.dump() << '\n';
        }
    }
}

void export_store_jsonl(const Trace& t, std::ostream& os) {
    // Recompute each block's hash from its store key: store_index is the
    // inverse map, so invert it once.
    std::vector<Hash> hash_of(t.store.size(), 0);
    for (const auto& [h, idx] : t.store_index) hash_of[idx] = h;
    for (std::size_t i = 0; i < t.store.size(); ++i) {
        const Block& b = t.store[i];
        nlohmann::json line;
        line["hash"] = hex(hash_of[i]);
        line["pred"] = hex(b.pred);
        line["slot"] = b.slot;
        line["bid"] = b.bid;
        line["txs_digest"] = hex(payload_digest(b.txs));
        os << line.dump() << '\n';
    }
}

void export_dot(const Trace& t, std::ostream& os) {
    std::vector<Hash> hash_of(t.store.size(), 0);
    for (const auto& [h, idx] : t.store_index) hash_of[idx] = h;

    // A store block is drawn as adversarial when any adversarial flood
    // carried it.
    std::unordered_set<std::uint32_t> adv;
    BlockHasher hasher(t.cfg.hash_width);
    for (const HistoryRecord& r : t.history) {
        if (!r.adversarial) continue;
        auto it = t.store_index.find(hasher(r.block));
        if (it != t.store_index.end() && t.store[it->second] == r.block) adv.insert(it->second);
    }

    os << "digraph blocktree {\n  rankdir=RL;\n  node [fontsize=10];\n";
    for (std::size_t i = 0; i < t.store.size(); ++i) {
        const Block& b = t.store[i];
        os << "  n" << i << " [label=\"sl " << b.slot << "\\nbid " << b.bid << "\\n"
           << hex(hash_of[i]) << "\"";
        if (i == 0)
            os << ", shape=doublecircle";
        else if (adv.count(static_cast<std::uint32_t>(i)) > 0)
            os << ", shape=octagon, style=filled, fillcolor=lightgray";
        else
            os << ", shape=box";
        os << "];\n";
    }
    for (std::size_t i = 1; i < t.store.size(); ++i) {
        auto it = t.store_index.find(t.store[i].pred);
        if (it != t.store_index.end()) os << "  n" << i << " -> n" << it->second << ";\n";
    }
    os << "}\n";
}

}  // namespace nsb

#include "nsb/properties.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include "nsb/hash.hpp"

namespace nsb {

namespace {

std::string fmt_block(const Block& b) {
    std::ostringstream os;
    os << "{pred=0x" << std::hex << b.pred << std::dec << ", slot=" << b.slot
       << ", bid=" << b.bid << ", |txs|=" << b.txs.size() << "}";
    return os.str();
}

// Sparse table for range minimum; O(n log n) build, O(1) query.
std::vector<std::vector<long long>> build_min_table(const std::vector<long long>& a) {
    std::vector<std::vector<long long>> t;
    t.push_back(a);
    for (std::size_t len = 1; 2 * len <= a.size(); len *= 2) {
        const auto& prev = t.back();
        std::vector<long long> row(a.size() - 2 * len + 1);
        for (std::size_t i = 0; i < row.size(); ++i)
            row[i] = std::min(prev[i], prev[i + len]);
        t.push_back(std::move(row));
    }
    return t;
}

long long query_min(const std::vector<std::vector<long long>>& t, std::size_t lo,
                    std::size_t hi) {
    std::size_t span = hi - lo + 1;
    std::size_t level = 0;
    while ((std::size_t{2} << level) <= span) ++level;
    return std::min(t[level][lo], t[level][hi + 1 - (std::size_t{1} << level)]);
}

bool is_honest_bid(const HonestyMap& honesty, PartyId bid) {
    return honesty.known(bid) && honesty.honest(bid);
}

}  // namespace

const char* to_string(VerdictKind k) {
    switch (k) {
        case VerdictKind::Holds: return "Holds";
        case VerdictKind::PreconditionFailed: return "PreconditionFailed";
        case VerdictKind::Violated: return "Violated";
    }
    return "?";
}

TraceIndex::TraceIndex(const Trace& t) : t_(&t) {
    if (t.slot_class.empty())
        throw std::invalid_argument("trace has no slot classification (incomplete run?)");
    Slot H = static_cast<Slot>(t.slot_class.size()) - 1;

    lucky_ps_.assign(H + 2, 0);
    super_ps_.assign(H + 2, 0);
    adv_ps_.assign(H + 2, 0);
    for (Slot sl = 0; sl <= H; ++sl) {
        lucky_ps_[sl + 1] = lucky_ps_[sl] + (t.slot_class[sl].lucky ? 1 : 0);
        super_ps_[sl + 1] = super_ps_[sl] + (t.slot_class[sl].super ? 1 : 0);
        adv_ps_[sl + 1] = adv_ps_[sl] + (t.slot_class[sl].adversarial ? 1 : 0);
    }

    g_.resize(H + 2);
    gmax_.resize(H + 2);
    for (Slot x = 0; x <= H + 1; ++x) {
        g_[x] = super_ps_[x] - 2 * adv_ps_[x];
        gmax_[x] = x == 0 ? g_[0] : std::max(gmax_[x - 1], g_[x]);
    }

    std::vector<long long> g_shifted(H + 1), d(H + 1);
    for (Slot x = 0; x <= H; ++x) {
        g_shifted[x] = g_[x + 1];
        d[x] = g_[x + 1] - gmax_[x];
    }
    g1_min_ = build_min_table(g_shifted);
    d_min_table_ = build_min_table(d);

    // Store forest.
    auto n = static_cast<std::uint32_t>(t.store.size());
    parent_.resize(n);
    std::vector<std::vector<std::uint32_t>> children(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        auto it = t.store_index.find(t.store[i].pred);
        if (i == 0 || it == t.store_index.end() || it->second == i) {
            parent_[i] = i;  // root (genesis, unresolvable pred, or self-loop)
        } else {
            parent_[i] = it->second;
            children[it->second].push_back(i);
        }
    }

    depth_.assign(n, 0);
    tin_.assign(n, 0);
    tout_.assign(n, 0);
    std::vector<bool> visited(n, false);
    std::uint32_t timer = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (parent_[root] != root || visited[root]) continue;
        // Iterative DFS; positions count from genesis only.
        depth_[root] = root == 0 ? 1 : 0;
        std::vector<std::pair<std::uint32_t, std::size_t>> stack{{root, 0}};
        visited[root] = true;
        tin_[root] = timer++;
        while (!stack.empty()) {
            auto& [v, ci] = stack.back();
            if (ci < children[v].size()) {
                std::uint32_t c = children[v][ci++];
                visited[c] = true;
                tin_[c] = timer++;
                depth_[c] = depth_[v] == 0 ? 0 : depth_[v] + 1;
                stack.emplace_back(c, 0);
            } else {
                tout_[v] = timer++;
                stack.pop_back();
            }
        }
    }
    // Nodes on parent cycles (possible only after hash collisions) were never
    // reached; give them singleton intervals so ancestor tests stay sane.
    for (std::uint32_t i = 0; i < n; ++i)
        if (!visited[i]) {
            tin_[i] = timer++;
            tout_[i] = timer++;
        }

    std::size_t levels = 1;
    while ((std::size_t{1} << levels) < std::max<std::size_t>(n, 2)) ++levels;
    up_.assign(levels, parent_);
    for (std::size_t j = 1; j < levels; ++j)
        for (std::uint32_t i = 0; i < n; ++i) up_[j][i] = up_[j - 1][up_[j - 1][i]];
}

long long TraceIndex::lucky_count(Slot lo, Slot hi) const {
    if (hi < lo) return 0;
    return lucky_ps_[std::min<std::size_t>(hi + 1, lucky_ps_.size() - 1)] - lucky_ps_[lo];
}

long long TraceIndex::super_count(Slot lo, Slot hi) const {
    if (hi < lo) return 0;
    return super_ps_[std::min<std::size_t>(hi + 1, super_ps_.size() - 1)] - super_ps_[lo];
}

long long TraceIndex::adv_count(Slot lo, Slot hi) const {
    if (hi < lo) return 0;
    return adv_ps_[std::min<std::size_t>(hi + 1, adv_ps_.size() - 1)] - adv_ps_[lo];
}

long long TraceIndex::advantage(Slot lo, Slot hi) const {
    return lucky_count(lo, hi) - adv_count(lo, hi);
}

long long TraceIndex::advantage_prefix(Slot x) const {
    std::size_t i = std::min<std::size_t>(x, lucky_ps_.size() - 1);
    return lucky_ps_[i] - adv_ps_[i];
}

std::uint32_t TraceIndex::node_of(Hash h) const {
    auto it = t_->store_index.find(h);
    if (it == t_->store_index.end())
        throw std::invalid_argument("hash not present in the trace block store");
    return it->second;
}

std::uint32_t TraceIndex::ancestor_at_slot(std::uint32_t v, Slot sl) const {
    if (t_->store[v].slot <= sl) return v;
    for (std::size_t j = up_.size(); j-- > 0;) {
        std::uint32_t u = up_[j][v];
        if (u != v && t_->store[u].slot > sl) v = u;
    }
    if (parent_[v] != v) v = parent_[v];
    return v;
}

bool TraceIndex::is_ancestor(std::uint32_t anc, std::uint32_t v) const {
    return tin_[anc] <= tin_[v] && tout_[v] <= tout_[anc];
}

long long TraceIndex::g_prefix_max(Slot x) const {
    return gmax_[std::min<std::size_t>(x, gmax_.size() - 1)];
}

long long TraceIndex::g_min_shifted(Slot lo, Slot hi) const {
    std::size_t n = g1_min_[0].size();
    std::size_t l = std::min<std::size_t>(lo, n - 1), h = std::min<std::size_t>(hi, n - 1);
    return query_min(g1_min_, l, h);
}

long long TraceIndex::d_min(Slot lo, Slot hi) const {
    std::size_t n = d_min_table_[0].size();
    std::size_t l = std::min<std::size_t>(lo, n - 1), h = std::min<std::size_t>(hi, n - 1);
    return query_min(d_min_table_, l, h);
}

std::size_t TraceIndex::snapshot_index(PartyId p) const {
    const auto& hp = t_->honest_parties;
    auto it = std::lower_bound(hp.begin(), hp.end(), p);
    if (it == hp.end() || *it != p)
        throw std::invalid_argument("party " + std::to_string(p) + " is not an honest party");
    return static_cast<std::size_t>(it - hp.begin());
}

const SnapshotEntry& TraceIndex::snapshot(Slot sl, PartyId p) const {
    if (sl >= t_->snapshots.size())
        throw std::invalid_argument("no snapshot for slot " + std::to_string(sl));
    return t_->snapshots[sl][snapshot_index(p)];
}

Verdict check_collision_free(const Trace& t) {
    BlockHasher hasher(t.cfg.hash_width);
    std::unordered_multimap<Hash, const Block*> seen;
    for (const HistoryRecord& r : t.history) {
        Hash h = hasher(r.block);
        auto [lo, hi] = seen.equal_range(h);
        bool present = false;
        for (auto it = lo; it != hi; ++it) {
            if (*it->second == r.block) {
                present = true;
            } else {
                std::ostringstream os;
                os << "slot " << r.sent_slot << ": blocks " << fmt_block(*it->second) << " and "
                   << fmt_block(r.block) << " share hash 0x" << std::hex << h;
                return Verdict::violation(os.str());
            }
        }
        if (!present) seen.emplace(h, &r.block);
    }
    return Verdict::pass();
}

Verdict check_forging_free(const Trace& t) {
    HonestyMap honesty = t.cfg.honesty_map();
    BlockHasher hasher(t.cfg.hash_width);
    std::unordered_multimap<Hash, const Block*> seen;
    for (const HistoryRecord& r : t.history) {
        Hash h = hasher(r.block);
        if (r.adversarial && is_honest_bid(honesty, r.block.bid)) {
            auto [lo, hi] = seen.equal_range(h);
            bool present = false;
            for (auto it = lo; it != hi && !present; ++it) present = *it->second == r.block;
            if (!present) {
                std::ostringstream os;
                os << "slot " << r.sent_slot
                   << ": adversarial flood of a never-sent honest-bid block "
                   << fmt_block(r.block);
                return Verdict::violation(os.str());
            }
        }
        seen.emplace(h, &r.block);
    }
    return Verdict::pass();
}

Verdict check_knowledge_propagation(const Trace& t) {
    const MonitorFlag& f = t.knowledge_propagation;
    if (!f.violated) return Verdict::pass();
    std::ostringstream os;
    os << "slot " << f.first_slot << ": " << f.detail << "; block " << fmt_block(f.witness_a);
    return Verdict::violation(os.str());
}

namespace {

Verdict preconditions(const Trace& t) {
    Verdict c = check_collision_free(t);
    if (!c.holds()) return Verdict::precondition("collision-free failed: " + c.detail);
    Verdict f = check_forging_free(t);
    if (!f.holds()) return Verdict::precondition("forging-free failed: " + f.detail);
    return Verdict::pass();
}

}  // namespace

Verdict check_super_positions(const TraceIndex& idx) {
    const Trace& t = idx.trace();
    Verdict pre = preconditions(t);
    if (!pre.holds()) return pre;

    HonestyMap honesty = t.cfg.honesty_map();
    // Bucket honest store blocks by chain position; a violation is a bucket
    // holding a super block plus any other honest block.
    std::unordered_map<std::size_t, std::vector<std::uint32_t>> buckets;
    for (std::uint32_t i = 0; i < t.store.size(); ++i)
        if (is_honest_bid(honesty, t.store[i].bid))
            buckets[idx.position(i)].push_back(i);

    for (const auto& [pos, nodes] : buckets) {
        if (nodes.size() < 2) continue;
        for (std::uint32_t n : nodes) {
            const Block& b = t.store[n];
            if (b.slot == 0 || !t.slot_class[b.slot].super) continue;
            std::uint32_t other = nodes[0] == n ? nodes[1] : nodes[0];
            std::ostringstream os;
            os << "super block " << fmt_block(b) << " shares position " << pos
               << " with honest block " << fmt_block(t.store[other]);
            return Verdict::violation(os.str());
        }
    }
    return Verdict::pass();
}

Verdict check_chain_growth(const TraceIndex& idx, Slot sl1, PartyId p1, Slot sl2, PartyId p2) {
    if (sl1 > sl2) throw std::invalid_argument("chain growth requires sl1 <= sl2");
    // Another party learns p1's newest block one slot later at the earliest,
    // so the monotone base case only applies across at least one slot.
    if (p1 != p2 && sl1 == sl2)
        return Verdict::precondition(
            "growth between distinct parties needs sl1 < sl2 (propagation delay)");
    const SnapshotEntry& s1 = idx.snapshot(sl1, p1);
    const SnapshotEntry& s2 = idx.snapshot(sl2, p2);

    Slot margin = idx.trace().cfg.checks.growth_right_margin;
    long long w = 0;
    if (sl2 >= 1 + margin && sl2 - 1 - margin >= sl1 + 1)
        w = idx.lucky_count(sl1 + 1, sl2 - 1 - margin);

    if (static_cast<long long>(s1.length) + w <= static_cast<long long>(s2.length))
        return Verdict::pass();
    std::ostringstream os;
    os << "party " << p1 << " at slot " << sl1 << " has length " << s1.length << ", plus " << w
       << " lucky slots exceeds party " << p2 << "'s length " << s2.length << " at slot "
       << sl2;
    return Verdict::violation(os.str());
}

namespace {

struct ChainView {
    std::vector<Slot> slots;       // head-first
    std::vector<long long> hp;     // honest-block prefix counts, size n + 1
};

ChainView chain_view(const TraceIndex& idx, const SnapshotEntry& s) {
    const Trace& t = idx.trace();
    HonestyMap honesty = t.cfg.honesty_map();
    ChainView v;
    v.hp.push_back(0);
    std::uint32_t node = idx.node_of(s.head);
    for (std::uint32_t i = 0; i < s.length; ++i) {
        const Block& b = t.store[node];
        v.slots.push_back(b.slot);
        v.hp.push_back(v.hp.back() + (is_honest_bid(honesty, b.bid) ? 1 : 0));
        std::uint32_t parent = idx.ancestor_at_slot(node, b.slot == 0 ? 0 : b.slot - 1);
        if (parent == node) break;
        node = parent;
    }
    return v;
}

// w* for one span value: max(0, min over closed periods [a, b] within
// [0, hi_max] with b - a >= min_diff of the honest advantage). An empty
// period family imposes no requirement (w* = 0).
long long quality_requirement(const TraceIndex& idx, long long hi_max, long long min_diff) {
    if (min_diff < 0) min_diff = 0;
    if (hi_max < 0 || min_diff > hi_max) return 0;
    long long best = 0;
    bool have = false;
    long long prefmin = 0;
    for (long long b = min_diff; b <= hi_max; ++b) {
        long long a = b - min_diff;  // newly admissible left endpoint
        long long h_a = idx.advantage_prefix(static_cast<Slot>(a));
        prefmin = (a == 0) ? h_a : std::min(prefmin, h_a);
        long long adv = idx.advantage_prefix(static_cast<Slot>(b + 1)) - prefmin;
        best = have ? std::min(best, adv) : adv;
        have = true;
    }
    return std::max(0LL, best);
}

// w* for every span at once: req[D] = max(0, min over periods with
// b - a >= D). O(hi_max^2) precompute, O(1) per window afterwards.
std::vector<long long> quality_requirements_all(const TraceIndex& idx, long long hi_max) {
    if (hi_max < 0) return {};
    // exact[D] = min over periods with b - a == D.
    std::vector<long long> exact(hi_max + 1);
    for (long long D = 0; D <= hi_max; ++D) {
        long long best = 0;
        bool have = false;
        for (long long a = 0; a + D <= hi_max; ++a) {
            long long adv = idx.advantage_prefix(static_cast<Slot>(a + D + 1)) -
                            idx.advantage_prefix(static_cast<Slot>(a));
            best = have ? std::min(best, adv) : adv;
            have = true;
        }
        exact[D] = best;
    }
    // Suffix-min turns "== D" into ">= D", then floor at 0.
    for (long long D = hi_max - 1; D >= 0; --D) exact[D] = std::min(exact[D], exact[D + 1]);
    for (auto& v : exact) v = std::max(0LL, v);
    return exact;
}

}  // namespace

Verdict check_chain_quality(const TraceIndex& idx, Slot sl, PartyId p, std::size_t i,
                            std::size_t j) {
    const Trace& t = idx.trace();
    Verdict pre = preconditions(t);
    if (!pre.holds()) return pre;

    ChainView v = chain_view(idx, idx.snapshot(sl, p));
    if (i > j || j >= v.slots.size())
        throw std::out_of_range("chain quality window indices out of range");

    long long span = static_cast<long long>(v.slots[i]) - v.slots[j];
    long long hi_max = static_cast<long long>(sl) - 1 - t.cfg.checks.quality_margin;
    long long w_star =
        quality_requirement(idx, hi_max, span + t.cfg.checks.quality_period_slack);
    long long honest = v.hp[j + 1] - v.hp[i];
    if (honest >= w_star) return Verdict::pass();

    std::ostringstream os;
    os << "window [" << i << ", " << j << "] of party " << p << "'s chain at slot " << sl
       << " (span " << span << ") has " << honest << " honest blocks, below the required "
       << w_star;
    return Verdict::violation(os.str());
}

Verdict check_chain_quality_all(const TraceIndex& idx, Slot sl, PartyId p) {
    const Trace& t = idx.trace();
    Verdict pre = preconditions(t);
    if (!pre.holds()) return pre;

    ChainView v = chain_view(idx, idx.snapshot(sl, p));
    long long hi_max = static_cast<long long>(sl) - 1 - t.cfg.checks.quality_margin;
    std::vector<long long> req = quality_requirements_all(idx, hi_max);
    long long slack = t.cfg.checks.quality_period_slack;

    std::size_t n = v.slots.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i; j < n; ++j) {
            long long d = static_cast<long long>(v.slots[i]) - v.slots[j] + slack;
            long long w_star =
                (d >= 0 && d < static_cast<long long>(req.size())) ? req[d] : 0;
            long long honest = v.hp[j + 1] - v.hp[i];
            if (honest < w_star) {
                std::ostringstream os;
                os << "window [" << i << ", " << j << "] of party " << p << "'s chain at slot "
                   << sl << " has " << honest << " honest blocks, below the required "
                   << w_star;
                return Verdict::violation(os.str());
            }
        }
    }
    return Verdict::pass();
}

namespace {

// First disjunct of timed common prefix on one pair-state, as a bare bool
// (shared by the checker and the max-k search).
bool cp_first_disjunct(const TraceIndex& idx, Slot sl1, PartyId p1, Slot sl2, PartyId p2,
                       Slot k) {
    Slot kk = sl1 >= 2 ? std::min(k, static_cast<Slot>(sl1 - 2)) : 0;
    std::uint32_t head1 = idx.node_of(idx.snapshot(sl1, p1).head);
    std::uint32_t head2 = idx.node_of(idx.snapshot(sl2, p2).head);
    return idx.is_ancestor(idx.ancestor_at_slot(head1, kk), head2);
}

// Second disjunct: exists sl' <= k, lo_sl <= sl'' <= sl2, sl' <= sl'' with
// #super[sl', sl''] < 2 #adversarial[sl', sl''] + slack, where lo_sl = sl1 -
// ext (clamped at 0). The extension covers the fact that the compared views
// are best_chain(sl - 1) snapshots and delay-2 adversarial sends reach some
// parties a slot before others, so a divergence visible at (sl1, sl2) can be
// rooted up to ext slots left of sl1. Split at k: for sl'' >= k the left
// endpoint ranges over all of [0, k]; below k it is capped at sl'' (the
// precomputed d array).
bool cp_second_disjunct(const TraceIndex& idx, Slot sl1, Slot sl2, Slot k, long long slack,
                        Slot ext) {
    Slot lo_sl = sl1 >= ext ? static_cast<Slot>(sl1 - ext) : 0;
    Slot loA = std::max(lo_sl, k);
    if (loA <= sl2 && idx.g_min_shifted(loA, sl2) - idx.g_prefix_max(k) < slack) return true;
    if (k >= 1) {
        Slot hiB = std::min(sl2, static_cast<Slot>(k - 1));
        if (lo_sl <= hiB && idx.d_min(lo_sl, hiB) < slack) return true;
    }
    return false;
}

}  // namespace

Verdict check_common_prefix(const TraceIndex& idx, Slot sl1, PartyId p1, Slot sl2, PartyId p2,
                            Slot k) {
    if (sl1 > sl2) throw std::invalid_argument("common prefix requires sl1 <= sl2");
    const Trace& t = idx.trace();
    Verdict pre = preconditions(t);
    if (!pre.holds()) return pre;

    if (cp_first_disjunct(idx, sl1, p1, sl2, p2, k)) return Verdict::pass(1);
    if (cp_second_disjunct(idx, sl1, sl2, k, t.cfg.checks.cp_super_slack,
                           t.cfg.checks.cp_window_extension))
        return Verdict::pass(2);

    std::ostringstream os;
    os << "prune(" << k << ") of party " << p1 << "'s chain at slot " << sl1
       << " is not a prefix of party " << p2 << "'s chain at slot " << sl2
       << ", and no interval [sl' <= " << k << ", sl'' in [" << sl1 << ", " << sl2
       << "]] has #super < 2 #adversarial";
    return Verdict::violation(os.str());
}

CommonPrefixSweep check_common_prefix_all(const TraceIndex& idx, Slot k, Slot stride) {
    if (stride < 1) throw std::invalid_argument("stride must be >= 1");
    const Trace& t = idx.trace();
    CommonPrefixSweep sweep;
    sweep.verdict = Verdict::pass(1);

    Verdict pre = preconditions(t);
    if (!pre.holds()) {
        sweep.verdict = pre;
        return sweep;
    }

    Slot H = idx.horizon();
    long long slack = t.cfg.checks.cp_super_slack;
    Slot ext = t.cfg.checks.cp_window_extension;
    for (PartyId p1 : t.honest_parties) {
        for (PartyId p2 : t.honest_parties) {
            for (Slot sl1 = 0; sl1 <= H; sl1 += stride) {
                for (Slot sl2 = sl1; sl2 <= H; sl2 += stride) {
                    ++sweep.cells;
                    if (cp_first_disjunct(idx, sl1, p1, sl2, p2, k)) continue;
                    if (cp_second_disjunct(idx, sl1, sl2, k, slack, ext)) {
                        ++sweep.second_disjunct_cells;
                        if (sweep.verdict.holds()) sweep.verdict = Verdict::pass(2);
                        continue;
                    }
                    ++sweep.violated_cells;
                    if (!sweep.verdict.violated())
                        sweep.verdict = check_common_prefix(idx, sl1, p1, sl2, p2, k);
                }
            }
        }
    }

    // Binary search the largest k whose first disjunct covers every cell.
    auto all_prefix = [&](Slot kk) {
        for (PartyId p1 : t.honest_parties)
            for (PartyId p2 : t.honest_parties)
                for (Slot sl1 = 0; sl1 <= H; sl1 += stride)
                    for (Slot sl2 = sl1; sl2 <= H; sl2 += stride)
                        if (!cp_first_disjunct(idx, sl1, p1, sl2, p2, kk)) return false;
        return true;
    };
    Slot lo = 0, hi = H + 1;  // lo always feasible: prune(0) keeps only genesis
    if (all_prefix(hi)) {
        sweep.max_k_all_prefix = hi;
    } else {
        while (lo + 1 < hi) {
            Slot mid = lo + (hi - lo) / 2;
            (all_prefix(mid) ? lo : hi) = mid;
        }
        sweep.max_k_all_prefix = lo;
    }
    return sweep;
}

}  // namespace nsb

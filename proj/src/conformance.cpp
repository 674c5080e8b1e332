#include "nsb/conformance.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "nsb/rng.hpp"

namespace nsb {

namespace {

std::size_t longest_from(const Block& tip, std::size_t len, const std::vector<Block>& pool,
                         Slot sl, const ChainContext& ctx) {
    std::size_t best = len;
    Hash tip_hash = ctx.hasher(tip);
    for (const Block& b : pool) {
        if (b.slot > sl || b.pred != tip_hash) continue;
        if (b.slot <= tip.slot) continue;
        if (!ctx.winner(b.bid, b.slot)) continue;
        best = std::max(best, longest_from(b, len + 1, pool, sl, ctx));
    }
    return best;
}

std::set<std::vector<std::uint8_t>> member_set(const std::vector<Block>& blocks) {
    std::set<std::vector<std::uint8_t>> out;
    for (const Block& b : blocks) out.insert(serialize_block(b));
    return out;
}

std::string describe(const Block& b) {
    std::ostringstream os;
    os << "block{slot=" << b.slot << " bid=" << b.bid << " pred=" << b.pred << "}";
    return os.str();
}

}  // namespace

std::size_t brute_force_best_length(const std::vector<Block>& pool, Slot sl,
                                    const ChainContext& ctx) {
    return longest_from(genesis_block(), 1, pool, sl, ctx);
}

ConformanceReport conformance_check(const std::string& impl, std::uint64_t seed,
                                    int n_blocks, unsigned hash_width,
                                    std::size_t optimal_limit) {
    ConformanceReport report;
    Rng rng(mix64(seed, 0x434f4e46));  // stream generator
    ChainContext ctx;
    ctx.hasher = BlockHasher(hash_width);
    std::uint64_t lottery_seed = mix64(seed, 0x4c4f54);
    ctx.winner = [lottery_seed](PartyId p, Slot sl) {
        return u01(mix64(lottery_seed, p, sl)) < 0.75;
    };

    auto tree = make_tree(impl, ctx);
    ReferenceTree oracle(ctx);

    auto fail = [&](const std::string& what) {
        if (report.pass) {
            report.pass = false;
            report.counterexample = what;
        }
    };

    // Instantiated.
    {
        auto blocks = tree->all_blocks();
        if (member_set(blocks) != member_set({genesis_block()}))
            fail("Instantiated: all_blocks(tree_init) != [genesis]");
        if (tree->best_chain(0) != Chain{genesis_block()})
            fail("best_chain(0, tree_init) != [genesis]");
    }

    std::vector<Block> pool{genesis_block()};
    Slot max_slot = 0;
    const std::vector<PartyId> parties{1, 2, 3, 4};

    auto pick_winner = [&](Slot sl) -> PartyId {
        for (int attempt = 0; attempt < 16; ++attempt) {
            PartyId p = parties[rng.below(parties.size())];
            if (ctx.winner(p, sl)) return p;
        }
        return parties[0];  // may or may not win; still a legal insertion
    };

    auto run_query = [&](Slot sl) {
        ++report.queries;
        Chain c = tree->best_chain(sl);
        if (!valid_chain(c, ctx.winner, ctx.hasher))
            fail("Valid: best_chain(" + std::to_string(sl) + ") is not a valid chain");
        auto pool_members = member_set(pool);
        for (const Block& b : c) {
            if (b.slot > sl)
                fail("Self-contained: best_chain(" + std::to_string(sl) +
                     ") contains future-slot " + describe(b));
            else if (pool_members.count(serialize_block(b)) == 0)
                fail("Self-contained: best_chain(" + std::to_string(sl) +
                     ") contains unrecorded " + describe(b));
        }
        if (pool.size() <= optimal_limit) {
            std::size_t want = brute_force_best_length(pool, sl, ctx);
            if (c.size() != want)
                fail("Optimal: |best_chain(" + std::to_string(sl) + ")| = " +
                     std::to_string(c.size()) + ", brute force finds " +
                     std::to_string(want));
        }
        Chain ref = oracle.best_chain(sl);
        if (c.size() != ref.size())
            fail("Differential: length " + std::to_string(c.size()) + " vs reference " +
                 std::to_string(ref.size()) + " at sl=" + std::to_string(sl));
        else if (c != ref)
            fail("Differential: canonical tie-break mismatch at sl=" + std::to_string(sl));
        // Monotone in the cutoff.
        BestTip later = tree->best_tip(sl + 7);
        if (later.length < c.size())
            fail("Monotonicity: |best_chain| decreased when raising the cutoff");
        return c.size();
    };

    Slot watch_sl = 0;
    std::size_t watch_len = tree->best_chain(0).size();

    for (int i = 0; i < n_blocks; ++i) {
        std::uint64_t kind = rng.below(100);
        Block b;
        if (kind < 55) {  // valid linked
            const Block& parent = pool[rng.below(pool.size())];
            b.slot = parent.slot + 1 + static_cast<Slot>(rng.below(3));
            b.pred = ctx.hasher(parent);
            b.bid = pick_winner(b.slot);
        } else if (kind < 65) {  // linked, deliberately non-winning if possible
            const Block& parent = pool[rng.below(pool.size())];
            b.slot = parent.slot + 1 + static_cast<Slot>(rng.below(3));
            b.pred = ctx.hasher(parent);
            b.bid = parties[rng.below(parties.size())];
            for (PartyId p : parties)
                if (!ctx.winner(p, b.slot)) b.bid = p;
        } else if (kind < 75) {  // unlinked
            b.slot = 1 + static_cast<Slot>(rng.below(max_slot + 4));
            b.pred = rng.next();
            b.bid = pick_winner(b.slot);
        } else if (kind < 85 && pool.size() > 1) {  // duplicate
            b = pool[1 + rng.below(pool.size() - 1)];
        } else if (kind < 95) {  // far-future linked
            const Block& parent = pool[rng.below(pool.size())];
            b.slot = max_slot + 50 + static_cast<Slot>(rng.below(100));
            b.pred = ctx.hasher(parent);
            b.bid = pick_winner(b.slot);
        } else {  // slot-order violation: same slot as parent
            const Block& parent = pool[rng.below(pool.size())];
            b.slot = parent.slot;
            b.pred = ctx.hasher(parent);
            b.bid = pick_winner(b.slot);
        }
        b.txs = {static_cast<std::uint8_t>(rng.below(256))};

        auto before = member_set(tree->all_blocks());
        tree->extend(b);
        oracle.extend(b);
        auto it = std::find(pool.begin(), pool.end(), b);
        if (it == pool.end()) pool.push_back(b);
        max_slot = std::max(max_slot, b.slot);
        ++report.extensions;

        // Extendable (up to member equality).
        before.insert(serialize_block(b));
        if (member_set(tree->all_blocks()) != before)
            fail("Extendable: all_blocks after extending with " + describe(b));

        if (i % 4 == 3) {
            Slot sl = static_cast<Slot>(rng.below(max_slot + 10));
            run_query(sl);
            // Monotone under extension at a fixed cutoff.
            std::size_t now = tree->best_tip(watch_sl).length;
            if (now < watch_len)
                fail("Monotonicity: |best_chain(" + std::to_string(watch_sl) +
                     ")| shrank under extension");
            if (rng.below(4) == 0) {
                watch_sl = sl;
                watch_len = tree->best_tip(sl).length;
            } else {
                watch_len = now;
            }
        }
        if (!report.pass) break;
    }
    run_query(0);
    run_query(max_slot + 1000);
    return report;
}

}  // namespace nsb

#include "nsb/world.hpp"

#include <sstream>
#include <stdexcept>

namespace nsb {

namespace {

[[noreturn]] void phase_error(const char* step, Progress have) {
    const char* names[] = {"Ready", "Delivered", "Baked"};
    throw std::logic_error(std::string(step) + " transition requires a different phase (at " +
                           names[static_cast<int>(have)] + ")");
}

}  // namespace

World::World(ScenarioConfig cfg)
    : cfg_(std::move(cfg)),
      honesty_(cfg_.honesty_map()),
      sched_rng_(cfg_.seed_scheduler) {
    auto errs = validate(cfg_);
    if (!errs.empty()) {
        std::ostringstream os;
        os << "invalid scenario:";
        for (const auto& e : errs) os << "\n  - " << e;
        throw std::invalid_argument(os.str());
    }

    lottery_ = cfg_.make_lottery();
    chain_ctx_ = cfg_.chain_context(*lottery_);
    tx_selector_ = make_tx_selector(cfg_.tx_selector);

    StrategyParams params;
    params.release_lead = cfg_.release_lead;
    params.partition.insert(cfg_.partition.begin(), cfg_.partition.end());
    strategy_ = make_strategy(cfg_.adversary, params, chain_ctx_);

    for (const auto& p : cfg_.parties) {
        state_.exec_order.push_back(p.id);
        if (p.honest)
            state_.state_map.emplace(p.id, LocalState(p.id, make_tree(p.tree_impl, chain_ctx_)));
    }

    trace_.cfg = cfg_;
    trace_.honest_parties = cfg_.honest_ids();
    trace_.store.push_back(genesis_block());
    trace_.store_index.emplace(chain_ctx_.hasher(genesis_block()), 0);

    // Every honest party starts out knowing (exactly) genesis.
    for (PartyId p : trace_.honest_parties) mark_known(p, genesis_block());
}

std::uint32_t World::intern(const Block& b) {
    Hash h = chain_ctx_.hasher(b);
    auto [lo, hi] = interned_idx_.equal_range(h);
    for (auto it = lo; it != hi; ++it)
        if (interned_[it->second] == b) return it->second;
    auto id = static_cast<std::uint32_t>(interned_.size());
    interned_.push_back(b);
    interned_idx_.emplace(h, id);
    return id;
}

void World::mark_known(PartyId p, const Block& b) {
    std::uint32_t id = intern(b);
    auto& bits = known_[p];
    if (bits.size() <= id) bits.resize(id + 1, false);
    if (!bits[id]) {
        bits[id] = true;
        newly_known_[p].push_back(id);
    }
}

void World::kp_collect() {
    for (PartyId p : trace_.honest_parties) {
        for (std::uint32_t id : newly_known_[p]) {
            if (in_union_.size() <= id) in_union_.resize(id + 1, false);
            if (!in_union_[id]) {
                in_union_[id] = true;
                union_pending_.push_back(id);
            }
        }
        newly_known_[p].clear();
    }
}

void World::kp_verify() {
    for (std::uint32_t id : union_pending_) {
        for (PartyId p : trace_.honest_parties) {
            const auto& bits = known_[p];
            if (id < bits.size() && bits[id]) continue;
            if (!trace_.knowledge_propagation.violated) {
                auto& f = trace_.knowledge_propagation;
                f.violated = true;
                f.first_slot = state_.clock;
                f.detail = "party " + std::to_string(p) +
                           " is missing a block known to some honest party at slot " +
                           std::to_string(state_.clock);
                f.witness_a = interned_[id];
            }
        }
    }
    union_pending_.clear();
}

void World::record(const Message& m, bool adversarial) {
    Hash h = chain_ctx_.hasher(m.block);

    bool present = false;
    auto [lo, hi] = hist_by_hash_.equal_range(h);
    for (auto it = lo; it != hi; ++it) {
        const Block& prev = trace_.history[it->second].block;
        if (prev == m.block) {
            present = true;
        } else if (!trace_.collision.violated) {
            auto& f = trace_.collision;
            f.violated = true;
            f.first_slot = state_.clock;
            f.detail = "distinct blocks share hash " + std::to_string(h);
            f.witness_a = prev;
            f.witness_b = m.block;
        }
    }
    if (!present) hist_by_hash_.emplace(h, static_cast<std::uint32_t>(trace_.history.size()));

    if (trace_.store_index.find(h) == trace_.store_index.end()) {
        trace_.store_index.emplace(h, static_cast<std::uint32_t>(trace_.store.size()));
        trace_.store.push_back(m.block);
    }

    state_.history.push_back(m);
    trace_.history.push_back({m.block, state_.clock, adversarial});
}

void World::flood(const Message& m) {
    record(m, false);
    for (PartyId p : state_.exec_order) state_.msg_buffer.push_back({m, p, 1});
}

void World::flood_adv(const AdversarySends& sends) {
    for (const auto& [m, dm] : sends) {
        // Forging monitor: an adversarial flood of a never-seen block carrying
        // an honest baker id means the signature abstraction was broken.
        bool honest_bid = honesty_.known(m.block.bid) && honesty_.honest(m.block.bid);
        if (honest_bid) {
            bool seen = false;
            Hash h = chain_ctx_.hasher(m.block);
            auto [lo, hi] = hist_by_hash_.equal_range(h);
            for (auto it = lo; it != hi && !seen; ++it)
                seen = trace_.history[it->second].block == m.block;
            if (!seen && !trace_.forging.violated) {
                auto& f = trace_.forging;
                f.violated = true;
                f.first_slot = state_.clock;
                f.detail = "adversary flooded a fresh block with honest baker id " +
                           std::to_string(m.block.bid);
                f.witness_a = m.block;
            }
        }
        record(m, true);
        for (PartyId p : state_.exec_order) state_.msg_buffer.push_back({m, p, dm.delay(p)});
    }
}

AdversaryContext World::adv_context(const Messages& delivered) const {
    AdversaryContext ctx;
    ctx.slot = state_.clock;
    ctx.horizon = cfg_.horizon;
    ctx.new_msgs = &delivered;
    ctx.msg_pool = &state_.msg_buffer;
    ctx.history = &state_.history;
    ctx.lottery = lottery_.get();
    ctx.honesty = &honesty_;
    ctx.exec_order = &state_.exec_order;
    return ctx;
}

void World::step(TransitionKind t) {
    switch (t) {
        case TransitionKind::Receive: {
            if (state_.progress != Progress::Ready) phase_error("Receive", state_.progress);

            // Split due messages per recipient, preserving buffer order.
            std::map<PartyId, Messages> due;
            Messages adv_due;
            std::vector<MsgTuple> remaining;
            remaining.reserve(state_.msg_buffer.size());
            for (auto& tup : state_.msg_buffer) {
                if (tup.cd != 0) {
                    remaining.push_back(std::move(tup));
                } else if (state_.state_map.count(tup.rcv) > 0) {
                    due[tup.rcv].push_back(std::move(tup.msg));
                } else {
                    adv_due.push_back(std::move(tup.msg));
                }
            }
            state_.msg_buffer = std::move(remaining);

            bool adv_done = false;
            for (PartyId p : state_.exec_order) {
                auto st = state_.state_map.find(p);
                if (st != state_.state_map.end()) {
                    const Messages& msgs = due[p];
                    honest_rcv(msgs, state_.clock, st->second, chain_ctx_.winner,
                               cfg_.receive_filter);
                    for (const Message& m : msgs)
                        if (!cfg_.receive_filter || chain_ctx_.winner(m.block.bid, m.block.slot))
                            mark_known(p, m.block);
                } else if (!adv_done) {
                    // The monolithic adversary acts once, at the first
                    // corrupted position of the order.
                    adv_done = true;
                    flood_adv(strategy_->on_rcv(adv_context(adv_due)));
                }
            }
            state_.progress = Progress::Delivered;
            kp_verify();
            break;
        }
        case TransitionKind::Bake: {
            if (state_.progress != Progress::Delivered) phase_error("Bake", state_.progress);
            Messages none;
            bool adv_done = false;
            for (PartyId p : state_.exec_order) {
                auto st = state_.state_map.find(p);
                if (st != state_.state_map.end()) {
                    Messages out = honest_bake(state_.clock, tx_selector_(state_.clock, p),
                                               st->second, chain_ctx_.winner);
                    for (const Message& m : out) {
                        mark_known(p, m.block);
                        flood(m);
                    }
                } else if (!adv_done) {
                    adv_done = true;
                    flood_adv(strategy_->on_bake(adv_context(none)));
                }
            }
            state_.progress = Progress::Baked;
            break;
        }
        case TransitionKind::Increment: {
            if (state_.progress != Progress::Baked) phase_error("Increment", state_.progress);
            for (auto& tup : state_.msg_buffer) {
                if (tup.cd < 1) throw std::logic_error("undelivered message with cd < 1");
                --tup.cd;
            }
            ++state_.clock;
            state_.progress = Progress::Ready;
            break;
        }
        case TransitionKind::PermuteExec: {
            if (cfg_.scheduler == "random") {
                sched_rng_.shuffle(state_.exec_order);
            } else if (cfg_.scheduler == "adversarial") {
                Messages none;
                state_.exec_order =
                    strategy_->choose_exec_order(adv_context(none), state_.exec_order);
            }
            break;
        }
        case TransitionKind::PermuteBuffer: {
            if (cfg_.scheduler == "random") sched_rng_.shuffle(state_.msg_buffer);
            break;
        }
    }
}

void World::snapshot() {
    std::vector<SnapshotEntry> row;
    row.reserve(trace_.honest_parties.size());
    // The snapshot view is best_chain(sl - 1): baking at slot sl extends the
    // chain over strictly earlier blocks, so this is the chain the party
    // would build on. Slot 0 degenerates to the genesis-only cutoff.
    Slot cutoff = state_.clock == 0 ? 0 : state_.clock - 1;
    for (PartyId p : trace_.honest_parties) {
        BestTip tip = state_.state_map.at(p).tree->best_tip(cutoff);
        row.push_back({tip.head, static_cast<std::uint32_t>(tip.length)});
    }
    trace_.snapshots.push_back(std::move(row));
}

Trace World::run() {
    for (;;) {
        kp_collect();
        snapshot();
        if (state_.clock == cfg_.horizon) break;
        step(TransitionKind::PermuteExec);
        step(TransitionKind::PermuteBuffer);
        step(TransitionKind::Receive);
        step(TransitionKind::PermuteExec);
        step(TransitionKind::PermuteBuffer);
        step(TransitionKind::Bake);
        step(TransitionKind::PermuteExec);
        step(TransitionKind::PermuteBuffer);
        step(TransitionKind::Increment);
    }

    trace_.slot_class.clear();
    auto ids = cfg_.party_ids();
    for (Slot sl = 0; sl <= cfg_.horizon; ++sl)
        trace_.slot_class.push_back(classify_slot(sl, *lottery_, honesty_, ids));

    Trace out = std::move(trace_);
    trace_ = Trace{};
    return out;
}

}  // namespace nsb

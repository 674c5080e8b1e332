#include "nsb/adversary.hpp"

#include <stdexcept>

namespace nsb {

namespace {

// Shared plumbing: a private IndexedTree kept in sync with the send history,
// giving the strategy the union of everything any party could know.
class TrackingStrategy : public AdversaryStrategy {
protected:
    explicit TrackingStrategy(ChainContext ctx)
        : chain_ctx_(ctx), tree_(std::move(ctx)) {}

    void sync(const AdversaryContext& ctx) {
        const Messages& h = *ctx.history;
        for (; synced_ < h.size(); ++synced_) tree_.extend(h[synced_].block);
    }

    std::vector<PartyId> corrupted_winners(const AdversaryContext& ctx, Slot sl) const {
        std::vector<PartyId> out;
        for (PartyId p : *ctx.exec_order)
            if (!ctx.honesty->honest(p) && ctx.lottery->winner(p, sl)) out.push_back(p);
        return out;
    }

    ChainContext chain_ctx_;
    IndexedTree tree_;
    std::size_t synced_ = 0;
};

class NoopStrategy final : public AdversaryStrategy {
public:
    AdversarySends on_rcv(const AdversaryContext&) override { return {}; }
    AdversarySends on_bake(const AdversaryContext&) override { return {}; }
    std::string name() const override { return "noop"; }
};

// Private-chain attack. Corrupted winners extend a withheld fork; the fork is
// flooded once it leads the public best chain by more than release_lead and
// no corrupted win is known for the next slot (lookahead), or when the run
// is about to end. A fork that falls behind the public chain is abandoned
// and restarted from the public tip at the next corrupted win.
class WithholdStrategy final : public TrackingStrategy {
public:
    WithholdStrategy(ChainContext ctx, int release_lead)
        : TrackingStrategy(std::move(ctx)), release_lead_(release_lead) {
        if (release_lead < 0) throw std::invalid_argument("release_lead must be >= 0");
    }

    AdversarySends on_rcv(const AdversaryContext& ctx) override {
        sync(ctx);
        return maybe_release(ctx);
    }

    AdversarySends on_bake(const AdversaryContext& ctx) override {
        sync(ctx);
        auto winners = corrupted_winners(ctx, ctx.slot);
        if (!winners.empty() && ctx.slot > 0) {
            std::size_t public_len = tree_.best_tip(ctx.slot).length;
            if (!fork_.empty() && fork_len_ <= public_len) fork_.clear();
            if (fork_.empty()) {
                BestTip base = tree_.best_tip(ctx.slot - 1);
                fork_tip_ = base.head;
                fork_len_ = base.length;
            }
            // Only one fork block per slot can keep the slot sequence strict.
            Block b;
            b.pred = fork_tip_;
            b.slot = ctx.slot;
            b.bid = winners.front();
            fork_.push_back(b);
            fork_tip_ = chain_ctx_.hasher(b);
            ++fork_len_;
        }
        return maybe_release(ctx);
    }

    std::string name() const override { return "withhold"; }

private:
    AdversarySends maybe_release(const AdversaryContext& ctx) {
        if (fork_.empty()) return {};
        std::size_t public_len = tree_.best_tip(ctx.slot).length;
        bool ahead = fork_len_ > public_len + static_cast<std::size_t>(release_lead_);
        bool will_win_next = !corrupted_winners(ctx, ctx.slot + 1).empty();
        bool ending = ctx.slot + 2 >= ctx.horizon;
        if (!(ending || (ahead && !will_win_next))) return {};
        AdversarySends out;
        for (const Block& b : fork_) out.emplace_back(Message{b}, DelayMap::uniform(1));
        fork_.clear();
        return out;
    }

    int release_lead_;
    std::vector<Block> fork_;  // oldest first, withheld, not yet in history
    Hash fork_tip_ = 0;
    std::size_t fork_len_ = 0;
};

// For every corrupted winning slot, bakes one block per distinct best-chain
// tip it observes (same slot and bid, different pred) and floods each. Uses
// no lookahead.
class EquivocateStrategy : public TrackingStrategy {
public:
    explicit EquivocateStrategy(ChainContext ctx) : TrackingStrategy(std::move(ctx)) {}

    AdversarySends on_rcv(const AdversaryContext& ctx) override {
        sync(ctx);
        return {};
    }

    AdversarySends on_bake(const AdversaryContext& ctx) override {
        sync(ctx);
        if (ctx.slot == 0) return {};
        auto winners = corrupted_winners(ctx, ctx.slot);
        if (winners.empty()) return {};
        AdversarySends out;
        for (const Block& tip : tree_.best_tips_all(ctx.slot - 1)) {
            Block b;
            b.pred = chain_ctx_.hasher(tip);
            b.slot = ctx.slot;
            b.bid = winners.front();
            out.emplace_back(Message{b}, delays(ctx));
        }
        return out;
    }

    std::string name() const override { return "equivocate"; }

protected:
    virtual DelayMap delays(const AdversaryContext&) { return DelayMap::uniform(1); }
};

// Equivocation with per-recipient delays: the chosen partition of honest
// parties sees the blocks one slot earlier than the rest, maximizing view
// divergence.
class SplitDeliveryStrategy final : public EquivocateStrategy {
public:
    SplitDeliveryStrategy(ChainContext ctx, std::set<PartyId> partition)
        : EquivocateStrategy(std::move(ctx)), partition_(std::move(partition)) {}

    std::string name() const override { return "split"; }

protected:
    DelayMap delays(const AdversaryContext& ctx) override {
        DelayMap m = DelayMap::uniform(2);
        for (PartyId p : *ctx.exec_order)
            if (partition_.count(p) > 0 || !ctx.honesty->honest(p)) m.set(p, 1);
        return m;
    }

private:
    std::set<PartyId> partition_;
};

// Negative control: emits a fresh block carrying an honest baker id, which a
// forging-free execution can never contain. Trips check_forging_free by
// construction.
class ForgeStrategy final : public TrackingStrategy {
public:
    explicit ForgeStrategy(ChainContext ctx) : TrackingStrategy(std::move(ctx)) {}

    AdversarySends on_rcv(const AdversaryContext& ctx) override {
        sync(ctx);
        return {};
    }

    AdversarySends on_bake(const AdversaryContext& ctx) override {
        sync(ctx);
        if (done_ || ctx.slot == 0) return {};
        PartyId victim = 0;
        bool found = false;
        for (PartyId p : *ctx.exec_order)
            if (ctx.honesty->honest(p)) {
                victim = p;
                found = true;
                break;
            }
        if (!found) return {};
        done_ = true;
        Block b;
        b.pred = chain_ctx_.hasher(genesis_block());
        b.slot = ctx.slot;
        b.txs = {0xFF, 0xF0, 0x06};  // marker payload no honest baker produces
        b.bid = victim;
        return {{Message{b}, DelayMap::uniform(1)}};
    }

    std::string name() const override { return "forge"; }

private:
    bool done_ = false;
};

}  // namespace

std::unique_ptr<AdversaryStrategy> make_strategy(const std::string& name,
                                                 const StrategyParams& params,
                                                 ChainContext chain_ctx) {
    if (name == "noop") return std::make_unique<NoopStrategy>();
    if (name == "withhold")
        return std::make_unique<WithholdStrategy>(std::move(chain_ctx), params.release_lead);
    if (name == "equivocate")
        return std::make_unique<EquivocateStrategy>(std::move(chain_ctx));
    if (name == "split")
        return std::make_unique<SplitDeliveryStrategy>(std::move(chain_ctx), params.partition);
    if (name == "forge") return std::make_unique<ForgeStrategy>(std::move(chain_ctx));
    throw std::invalid_argument("unknown adversary strategy: " + name);
}

}  // namespace nsb

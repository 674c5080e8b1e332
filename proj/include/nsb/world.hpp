#pragma once

#include <map>
#include <memory>
#include <vector>

#include "nsb/adversary.hpp"
#include "nsb/config.hpp"
#include "nsb/party.hpp"
#include "nsb/rng.hpp"
#include "nsb/trace.hpp"

namespace nsb {

// Lock-step round phases. One slot is the cycle
//   Ready --Receive--> Delivered --Bake--> Baked --Increment--> Ready
// with permutation steps allowed at any point in between.
enum class Progress { Ready, Delivered, Baked };

enum class TransitionKind { Receive, Bake, Increment, PermuteExec, PermuteBuffer };

struct GlobalState {
    Slot clock = 0;
    Progress progress = Progress::Ready;
    std::vector<MsgTuple> msg_buffer;         // in-flight, insertion (or permuted) order
    std::map<PartyId, LocalState> state_map;  // honest parties only
    Messages history;                         // every flooded message, send order
    std::vector<PartyId> exec_order;          // all parties, honest and corrupted
};

// The synchronous executor. Owns the global state, the adversary instance,
// and the online monitors; step() applies one atomic transition and throws
// std::logic_error on a phase mismatch. run() drives a full scenario and
// returns the trace.
class World {
public:
    explicit World(ScenarioConfig cfg);

    void step(TransitionKind t);
    Trace run();

    const GlobalState& state() const { return state_; }
    const Trace& trace() const { return trace_; }
    Slot horizon() const { return cfg_.horizon; }

    // Takes the per-party best-tip snapshot for the current clock value.
    // run() calls this at every Ready point; exposed for custom drivers.
    void snapshot();

private:
    void flood(const Message& m);                       // honest flood, delay 1
    void flood_adv(const AdversarySends& sends);        // adversarial flood + forging monitor
    void record(const Message& m, bool adversarial);    // history + store + collision monitor
    void apply_permutations();
    AdversaryContext adv_context(const Messages& delivered) const;

    // Knowledge-propagation bookkeeping: blocks are interned to dense ids;
    // known_[p] marks what party p's tree holds.
    std::uint32_t intern(const Block& b);
    void mark_known(PartyId p, const Block& b);
    void kp_collect();  // at Ready: fold new knowledge into the honest union
    void kp_verify();   // at Delivered: union must be contained in every view

    ScenarioConfig cfg_;
    std::unique_ptr<Lottery> lottery_;
    HonestyMap honesty_;
    ChainContext chain_ctx_;
    TxSelector tx_selector_;
    std::unique_ptr<AdversaryStrategy> strategy_;
    Rng sched_rng_;

    GlobalState state_;
    Trace trace_;

    // Monitors.
    std::unordered_multimap<Hash, std::uint32_t> hist_by_hash_;  // hash -> history index
    std::vector<Block> interned_;
    std::unordered_multimap<Hash, std::uint32_t> interned_idx_;
    std::map<PartyId, std::vector<bool>> known_;
    std::map<PartyId, std::vector<std::uint32_t>> newly_known_;
    std::vector<bool> in_union_;
    std::vector<std::uint32_t> union_pending_;  // entered the union, not yet verified
};

}  // namespace nsb

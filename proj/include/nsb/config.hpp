#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "nsb/adversary.hpp"
#include "nsb/blocktree.hpp"
#include "nsb/lottery.hpp"

namespace nsb {

struct PartyConfig {
    PartyId id = 0;
    bool honest = true;
    double q = 0.0;                    // Bernoulli win probability
    std::string tree_impl = "indexed"; // per-party implementation choice
};

// Constants for the theorem checkers. All slot intervals in this project are
// closed; margins carve propagation slack off the window edges.
struct CheckerParams {
    std::vector<Slot> k_values{10, 20, 40};
    Slot stride = 1;
    // Chain growth counts lucky slots in [sl1 + 1, sl2 - 1 - growth_right_margin].
    Slot growth_right_margin = 1;
    // Chain quality minimizes the advantage over periods within [0, sl - 1 -
    // quality_margin] spanning at least (span + 1 + quality_period_slack)
    // slots, i.e. closed intervals [a, b] with b - a >= span +
    // quality_period_slack.
    Slot quality_margin = 0;
    Slot quality_period_slack = 0;
    // Common prefix declares the bad event at #super < 2 * #adversarial + slack.
    long long cp_super_slack = 0;
    // The bad-event window's right endpoint ranges over [sl1 -
    // cp_window_extension, sl2]: the compared snapshots are best_chain(sl - 1)
    // views and adversarial delay-2 sends reach some parties a slot earlier,
    // so divergence can live up to two slots left of sl1.
    Slot cp_window_extension = 2;
};

struct ScenarioConfig {
    int version = 1;
    std::vector<PartyConfig> parties;
    std::string lottery_type = "bernoulli";  // "bernoulli" | "scripted"
    std::vector<std::pair<PartyId, Slot>> scripted_wins;
    std::string tx_selector = "empty";       // "empty" | "slot-tagged"
    std::string adversary = "noop";          // strategy name
    int release_lead = 0;
    std::vector<PartyId> partition;
    std::string scheduler = "fixed";         // "fixed" | "random" | "adversarial"
    Slot horizon = 100;
    unsigned hash_width = 64;
    std::uint64_t seed_lottery = 1;
    std::uint64_t seed_scheduler = 2;
    std::uint64_t seed_strategy = 3;
    bool receive_filter = false;  // drop non-winning blocks on receipt (informal variant)
    CheckerParams checks;

    std::vector<PartyId> party_ids() const;
    std::vector<PartyId> honest_ids() const;
    HonestyMap honesty_map() const;
    std::unique_ptr<Lottery> make_lottery() const;
    ChainContext chain_context(const Lottery& lottery) const;
};

// All violations, not just the first; empty means valid.
std::vector<std::string> validate(const ScenarioConfig& cfg);

ScenarioConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ScenarioConfig& cfg);
ScenarioConfig parse_config(const std::string& path);  // throws with all violations listed

}  // namespace nsb

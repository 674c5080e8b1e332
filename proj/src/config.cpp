#include "nsb/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

namespace nsb {

std::vector<PartyId> ScenarioConfig::party_ids() const {
    std::vector<PartyId> out;
    for (const auto& p : parties) out.push_back(p.id);
    return out;
}

std::vector<PartyId> ScenarioConfig::honest_ids() const {
    std::vector<PartyId> out;
    for (const auto& p : parties)
        if (p.honest) out.push_back(p.id);
    std::sort(out.begin(), out.end());
    return out;
}

HonestyMap ScenarioConfig::honesty_map() const {
    std::map<PartyId, bool> m;
    for (const auto& p : parties) m[p.id] = p.honest;
    return HonestyMap(std::move(m));
}

std::unique_ptr<Lottery> ScenarioConfig::make_lottery() const {
    if (lottery_type == "bernoulli") {
        std::map<PartyId, double> q;
        for (const auto& p : parties) q[p.id] = p.q;
        return std::make_unique<BernoulliLottery>(std::move(q), seed_lottery);
    }
    if (lottery_type == "scripted") {
        std::set<std::pair<PartyId, Slot>> wins(scripted_wins.begin(), scripted_wins.end());
        std::set<PartyId> ids;
        for (const auto& p : parties) ids.insert(p.id);
        return std::make_unique<ScriptedLottery>(std::move(wins), std::move(ids));
    }
    throw std::invalid_argument("unknown lottery type: " + lottery_type);
}

ChainContext ScenarioConfig::chain_context(const Lottery& lottery) const {
    ChainContext ctx{BlockHasher(hash_width), {}};
    ctx.winner = [&lottery](PartyId p, Slot sl) { return lottery.winner(p, sl); };
    return ctx;
}

std::vector<std::string> validate(const ScenarioConfig& cfg) {
    std::vector<std::string> errs;
    auto err = [&errs](const std::string& m) { errs.push_back(m); };

    if (cfg.version != 1) err("unsupported config version (expected 1)");
    if (cfg.parties.empty()) err("at least one party is required");

    std::set<PartyId> seen;
    bool any_honest = false;
    static const std::set<std::string> kTrees{"reference", "indexed", "broken-noslotfilter"};
    for (const auto& p : cfg.parties) {
        if (p.id == kGenesisBaker)
            err("party id 0 is reserved for the genesis baker");
        else if (!seen.insert(p.id).second)
            err("duplicate party id " + std::to_string(p.id));
        if (!(p.q >= 0.0 && p.q <= 1.0))
            err("party " + std::to_string(p.id) + ": q must be in [0, 1]");
        if (kTrees.count(p.tree_impl) == 0)
            err("party " + std::to_string(p.id) + ": unknown tree implementation '" +
                p.tree_impl + "'");
        any_honest = any_honest || p.honest;
    }
    if (!cfg.parties.empty() && !any_honest) err("at least one honest party is required");

    if (cfg.lottery_type != "bernoulli" && cfg.lottery_type != "scripted")
        err("unknown lottery type '" + cfg.lottery_type + "'");
    if (cfg.lottery_type != "scripted" && !cfg.scripted_wins.empty())
        err("scripted wins given but lottery type is not 'scripted'");
    for (const auto& [p, sl] : cfg.scripted_wins) {
        if (seen.count(p) == 0)
            err("scripted win references unknown party " + std::to_string(p));
        if (sl == 0) err("scripted win at slot 0 is meaningless (genesis slot)");
    }

    if (cfg.tx_selector != "empty" && cfg.tx_selector != "slot-tagged")
        err("unknown tx selector '" + cfg.tx_selector + "'");

    static const std::set<std::string> kStrategies{"noop", "withhold", "equivocate", "split",
                                                   "forge"};
    if (kStrategies.count(cfg.adversary) == 0)
        err("unknown adversary strategy '" + cfg.adversary + "'");
    if (cfg.release_lead < 0) err("release_lead must be >= 0");
    for (PartyId p : cfg.partition)
        if (seen.count(p) == 0)
            err("partition references unknown party " + std::to_string(p));

    if (cfg.scheduler != "fixed" && cfg.scheduler != "random" && cfg.scheduler != "adversarial")
        err("unknown scheduler policy '" + cfg.scheduler + "'");
    if (cfg.horizon < 1) err("horizon must be >= 1");
    if (cfg.hash_width < 1 || cfg.hash_width > 64) err("hash_width must be in 1..64");

    if (cfg.checks.k_values.empty()) err("checks.k must list at least one depth");
    for (Slot k : cfg.checks.k_values)
        if (k < 1) err("checks.k entries must be >= 1");
    if (cfg.checks.stride < 1) err("checks.stride must be >= 1");

    return errs;
}

ScenarioConfig config_from_json(const nlohmann::json& j) {
    ScenarioConfig cfg;
    cfg.version = j.value("version", 1);
    for (const auto& pj : j.value("parties", nlohmann::json::array())) {
        PartyConfig p;
        p.id = pj.at("id").get<PartyId>();
        p.honest = pj.value("honest", true);
        p.q = pj.value("q", 0.0);
        p.tree_impl = pj.value("tree", std::string("indexed"));
        cfg.parties.push_back(std::move(p));
    }
    if (j.contains("lottery")) {
        const auto& lj = j.at("lottery");
        cfg.lottery_type = lj.value("type", std::string("bernoulli"));
        for (const auto& w : lj.value("wins", nlohmann::json::array()))
            cfg.scripted_wins.emplace_back(w.at(0).get<PartyId>(), w.at(1).get<Slot>());
    }
    cfg.tx_selector = j.value("tx_selector", std::string("empty"));
    if (j.contains("adversary")) {
        const auto& aj = j.at("adversary");
        cfg.adversary = aj.value("name", std::string("noop"));
        cfg.release_lead = aj.value("release_lead", 0);
        for (const auto& p : aj.value("partition", nlohmann::json::array()))
            cfg.partition.push_back(p.get<PartyId>());
    }
    cfg.scheduler = j.value("scheduler", std::string("fixed"));
    cfg.horizon = j.value("horizon", Slot{100});
    cfg.hash_width = j.value("hash_width", 64u);
    if (j.contains("seeds")) {
        const auto& sj = j.at("seeds");
        cfg.seed_lottery = sj.value("lottery", std::uint64_t{1});
        cfg.seed_scheduler = sj.value("scheduler", std::uint64_t{2});
        cfg.seed_strategy = sj.value("strategy", std::uint64_t{3});
    }
    cfg.receive_filter = j.value("receive_filter", false);
    if (j.contains("checks")) {
        const auto& cj = j.at("checks");
        if (cj.contains("k")) cfg.checks.k_values = cj.at("k").get<std::vector<Slot>>();
        cfg.checks.stride = cj.value("stride", Slot{1});
        cfg.checks.growth_right_margin = cj.value("growth_right_margin", Slot{1});
        cfg.checks.quality_margin = cj.value("quality_margin", Slot{0});
        cfg.checks.quality_period_slack = cj.value("quality_period_slack", Slot{0});
        cfg.checks.cp_super_slack = cj.value("cp_super_slack", 0LL);
        cfg.checks.cp_window_extension = cj.value("cp_window_extension", Slot{2});
    }
    return cfg;
}

nlohmann::json config_to_json(const ScenarioConfig& cfg) {
    nlohmann::json j;
    j["version"] = cfg.version;
    j["parties"] = nlohmann::json::array();
    for (const auto& p : cfg.parties)
        j["parties"].push_back(
            {{"id", p.id}, {"honest", p.honest}, {"q", p.q}, {"tree", p.tree_impl}});
    j["lottery"] = {{"type", cfg.lottery_type}};
    if (!cfg.scripted_wins.empty()) {
        auto& wins = j["lottery"]["wins"] = nlohmann::json::array();
        for (const auto& [p, sl] : cfg.scripted_wins) wins.push_back({p, sl});
    }
    j["tx_selector"] = cfg.tx_selector;
    j["adversary"] = {{"name", cfg.adversary},
                      {"release_lead", cfg.release_lead},
                      {"partition", cfg.partition}};
    j["scheduler"] = cfg.scheduler;
    j["horizon"] = cfg.horizon;
    j["hash_width"] = cfg.hash_width;
    j["seeds"] = {{"lottery", cfg.seed_lottery},
                  {"scheduler", cfg.seed_scheduler},
                  {"strategy", cfg.seed_strategy}};
    j["receive_filter"] = cfg.receive_filter;
    j["checks"] = {{"k", cfg.checks.k_values},
                   {"stride", cfg.checks.stride},
                   {"growth_right_margin", cfg.checks.growth_right_margin},
                   {"quality_margin", cfg.checks.quality_margin},
                   {"quality_period_slack", cfg.checks.quality_period_slack},
                   {"cp_super_slack", cfg.checks.cp_super_slack},
                   {"cp_window_extension", cfg.checks.cp_window_extension}};
    return j;
}

ScenarioConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    ScenarioConfig cfg = config_from_json(j);
    auto errs = validate(cfg);
    if (!errs.empty()) {
        std::ostringstream os;
        os << "invalid config " << path << ":";
        for (const auto& e : errs) os << "\n  - " << e;
        throw std::runtime_error(os.str());
    }
    return cfg;
}

}  // namespace nsb

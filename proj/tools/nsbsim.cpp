#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "nsb/bounds.hpp"
#include "nsb/conformance.hpp"
#include "nsb/properties.hpp"
#include "nsb/world.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A master seed (flag or NSBSIM_MASTER_SEED) rederives all three seed
// streams so batch runs stay reproducible from one number.
void apply_master_seed(nsb::ScenarioConfig& cfg, std::uint64_t master) {
    cfg.seed_lottery = nsb::mix64(master, 1);
    cfg.seed_scheduler = nsb::mix64(master, 2);
    cfg.seed_strategy = nsb::mix64(master, 3);
}

std::optional<std::uint64_t> env_master_seed() {
    const char* v = std::getenv("NSBSIM_MASTER_SEED");
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::strtoull(v, nullptr, 0);
}

json verdict_json(const nsb::Verdict& v) {
    json j;
    j["verdict"] = nsb::to_string(v.kind);
    if (!v.detail.empty()) j["witness"] = v.detail;
    if (v.disjunct != 0) j["disjunct"] = v.disjunct;
    return j;
}

json run_report(const nsb::Trace& t) {
    json rep;
    rep["config"] = nsb::config_to_json(t.cfg);
    rep["monitors"] = {
        {"collision", t.collision.violated},
        {"forging", t.forging.violated},
        {"knowledge_propagation", t.knowledge_propagation.violated},
    };
    json lengths = json::object();
    const auto& last = t.snapshots.back();
    for (std::size_t i = 0; i < t.honest_parties.size(); ++i)
        lengths[std::to_string(t.honest_parties[i])] = last[i].length;
    rep["final_lengths"] = std::move(lengths);
    long long lucky = 0, super = 0, adversarial = 0;
    for (const auto& c : t.slot_class) {
        lucky += c.lucky;
        super += c.super;
        adversarial += c.adversarial;
    }
    rep["slot_counts"] = {{"lucky", lucky}, {"super", super}, {"adversarial", adversarial}};
    rep["history_blocks"] = t.history.size();
    rep["distinct_blocks"] = t.store.size();
    return rep;
}

struct CheckSelection {
    bool collision = true, forging = true, kp = true, super_pos = true;
    bool growth = true, quality = true, cp = true;
};

CheckSelection parse_checks(const std::vector<std::string>& names) {
    if (names.empty()) return {};
    CheckSelection s;
    s = {false, false, false, false, false, false, false};
    for (const auto& n : names) {
        if (n == "collision") s.collision = true;
        else if (n == "forging") s.forging = true;
        else if (n == "kp") s.kp = true;
        else if (n == "super") s.super_pos = true;
        else if (n == "growth") s.growth = true;
        else if (n == "quality") s.quality = true;
        else if (n == "cp") s.cp = true;
        else if (n == "all") s = {};
        else throw CLI::ValidationError("--checks", "unknown checker '" + n + "'");
    }
    return s;
}

// Applies the selected checkers; returns the structured records and whether
// any verdict was Violated.
std::pair<json, bool> apply_checks(const nsb::Trace& t, const CheckSelection& sel,
                                   const std::vector<nsb::Slot>& ks, nsb::Slot stride) {
    json records = json::array();
    bool violated = false;
    auto add = [&](const std::string& checker, json params, const nsb::Verdict& v) {
        json r = verdict_json(v);
        r["checker"] = checker;
        if (!params.empty()) r["params"] = std::move(params);
        violated = violated || v.violated();
        records.push_back(std::move(r));
    };

    nsb::TraceIndex idx(t);
    nsb::Slot H = idx.horizon();

    if (sel.collision) add("collision_free", {}, nsb::check_collision_free(t));
    if (sel.forging) add("forging_free", {}, nsb::check_forging_free(t));
    if (sel.kp) add("knowledge_propagation", {}, nsb::check_knowledge_propagation(t));
    if (sel.super_pos) add("super_positions", {}, nsb::check_super_positions(idx));

    if (sel.growth) {
        nsb::Verdict worst = nsb::Verdict::pass();
        std::uint64_t cells = 0;
        for (nsb::PartyId p1 : t.honest_parties)
            for (nsb::PartyId p2 : t.honest_parties)
                for (nsb::Slot sl1 = 0; sl1 <= H; sl1 += stride)
                    for (nsb::Slot sl2 = sl1; sl2 <= H; sl2 += stride) {
                        if (p1 != p2 && sl1 == sl2) continue;  // theorem needs sl1 < sl2
                        ++cells;
                        nsb::Verdict v = nsb::check_chain_growth(idx, sl1, p1, sl2, p2);
                        if (!v.holds() && worst.holds()) worst = v;
                        if (worst.violated()) break;
                    }
        add("chain_growth", {{"stride", stride}, {"cells", cells}}, worst);
    }

    if (sel.quality) {
        nsb::Verdict worst = nsb::Verdict::pass();
        for (nsb::PartyId p : t.honest_parties) {
            nsb::Verdict v = nsb::check_chain_quality_all(idx, H, p);
            if (!v.holds() && worst.holds()) worst = v;
        }
        add("chain_quality", {{"slot", H}}, worst);
    }

    if (sel.cp) {
        for (nsb::Slot k : ks) {
            nsb::CommonPrefixSweep s = nsb::check_common_prefix_all(idx, k, stride);
            add("common_prefix_all",
                {{"k", k},
                 {"stride", stride},
                 {"cells", s.cells},
                 {"second_disjunct_cells", s.second_disjunct_cells},
                 {"violated_cells", s.violated_cells},
                 {"max_k_all_prefix", s.max_k_all_prefix}},
                s.verdict);
        }
    }

    return {std::move(records), violated};
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << text;
}

std::string trace_text(const nsb::Trace& t) {
    std::ostringstream os;
    nsb::export_trace_jsonl(t, os);
    return os.str();
}

int cmd_run(const std::string& cfg_path, const std::string& out_dir, bool dot,
            std::optional<std::uint64_t> master) {
    nsb::ScenarioConfig cfg = nsb::parse_config(cfg_path);
    if (master) apply_master_seed(cfg, *master);
    nsb::Trace t = nsb::World(cfg).run();

    fs::create_directories(out_dir);
    write_text(fs::path(out_dir) / "trace.jsonl", trace_text(t));
    {
        std::ostringstream os;
        nsb::export_store_jsonl(t, os);
        write_text(fs::path(out_dir) / "store.jsonl", os.str());
    }
    write_text(fs::path(out_dir) / "report.json", run_report(t).dump(2) + "\n");
    if (dot) {
        std::ostringstream os;
        nsb::export_dot(t, os);
        write_text(fs::path(out_dir) / "tree.dot", os.str());
    }
    return 0;
}

int cmd_check(const std::string& cfg_path, const std::vector<std::string>& checks,
              std::vector<nsb::Slot> ks, std::optional<nsb::Slot> stride,
              const std::string& out_dir, unsigned seeds, unsigned jobs, bool sequential,
              std::optional<std::uint64_t> master) {
    nsb::ScenarioConfig base = nsb::parse_config(cfg_path);
    if (master) apply_master_seed(base, *master);
    CheckSelection sel = parse_checks(checks);
    if (ks.empty()) ks = base.checks.k_values;
    nsb::Slot str = stride.value_or(base.checks.stride);

    struct SeedResult {
        json report;
        std::string trace;
        bool violated = false;
    };
    std::vector<SeedResult> results(seeds);

    auto run_seed = [&](unsigned i) {
        nsb::ScenarioConfig cfg = base;
        if (seeds > 1) {
            // Derive per-seed streams from the base lottery seed.
            cfg.seed_lottery = nsb::mix64(base.seed_lottery, i, 1);
            cfg.seed_scheduler = nsb::mix64(base.seed_scheduler, i, 2);
            cfg.seed_strategy = nsb::mix64(base.seed_strategy, i, 3);
        }
        nsb::Trace t = nsb::World(cfg).run();
        auto [records, violated] = apply_checks(t, sel, ks, str);
        json rep = run_report(t);
        rep["seed_index"] = i;
        rep["checks"] = std::move(records);
        results[i] = {std::move(rep), out_dir.empty() ? std::string() : trace_text(t),
                      violated};
    };

    if (sequential || seeds == 1 || jobs <= 1) {
        for (unsigned i = 0; i < seeds; ++i) run_seed(i);
    } else {
        std::atomic<unsigned> next{0};
        std::vector<std::thread> pool;
        for (unsigned w = 0; w < std::min(jobs, seeds); ++w)
            pool.emplace_back([&] {
                for (unsigned i = next.fetch_add(1); i < seeds; i = next.fetch_add(1))
                    run_seed(i);
            });
        for (auto& th : pool) th.join();
    }

    bool any_violated = false;
    json aggregate;
    aggregate["seeds"] = seeds;
    json per_checker = json::object();
    std::uint64_t second_disjunct_cells = 0;
    unsigned second_disjunct_seeds = 0;
    if (!out_dir.empty()) fs::create_directories(out_dir);
    for (unsigned i = 0; i < seeds; ++i) {
        any_violated = any_violated || results[i].violated;
        std::uint64_t seed_sd = 0;
        for (const auto& rec : results[i].report["checks"]) {
            std::string name = rec["checker"];
            auto& cell = per_checker[name];
            if (cell.is_null()) cell = {{"violated", 0}, {"precondition_failed", 0}};
            std::string verdict = rec["verdict"];
            if (verdict == "Violated") cell["violated"] = cell["violated"].get<int>() + 1;
            if (verdict == "PreconditionFailed")
                cell["precondition_failed"] = cell["precondition_failed"].get<int>() + 1;
            if (rec.contains("params") && rec["params"].contains("second_disjunct_cells"))
                seed_sd += rec["params"]["second_disjunct_cells"].get<std::uint64_t>();
        }
        second_disjunct_cells += seed_sd;
        if (seed_sd > 0) ++second_disjunct_seeds;
        if (!out_dir.empty()) {
            fs::path dir = seeds > 1
                               ? fs::path(out_dir) / ("seed_" + std::to_string(i))
                               : fs::path(out_dir);
            fs::create_directories(dir);
            write_text(dir / "report.json", results[i].report.dump(2) + "\n");
            write_text(dir / "trace.jsonl", results[i].trace);
        }
    }
    aggregate["violations_per_checker"] = std::move(per_checker);
    aggregate["any_violated"] = any_violated;
    aggregate["cp_second_disjunct_cells"] = second_disjunct_cells;
    aggregate["cp_second_disjunct_seeds"] = second_disjunct_seeds;
    if (!out_dir.empty() && seeds > 1)
        write_text(fs::path(out_dir) / "aggregate.json", aggregate.dump(2) + "\n");

    if (seeds == 1)
        std::cout << results[0].report.dump(2) << std::endl;
    else
        std::cout << aggregate.dump(2) << std::endl;
    return any_violated ? 1 : 0;
}

int cmd_bounds(const std::vector<double>& q_honest, const std::vector<double>& q_adv,
               double delta, double delta2, const std::string& k_range,
               std::uint64_t sl_now) {
    nsb::SlotProbs probs = nsb::slot_probs(q_honest, q_adv);
    std::cout << "p_LS = " << probs.p_ls << "  p_SS = " << probs.p_ss
              << "  p_AS = " << probs.p_as << "\n";

    nsb::EpsilonCondition cp = nsb::cp_epsilon_condition(probs, delta, delta2);
    nsb::EpsilonCondition cq = nsb::cq_epsilon_condition(probs, delta, delta2);
    std::cout << "common-prefix slack: required " << cp.required << ", actual " << cp.actual
              << (cp.satisfied ? " (satisfied)" : " (NOT satisfied - bounds vacuous)") << "\n";
    std::cout << "chain-quality slack: required " << cq.required << ", actual " << cq.actual
              << (cq.satisfied ? " (satisfied)" : " (NOT satisfied - bounds vacuous)") << "\n";

    std::uint64_t k_lo = 10, k_hi = 60;
    if (!k_range.empty()) {
        auto colon = k_range.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("--k-range", "expected A:B");
        k_lo = std::stoull(k_range.substr(0, colon));
        k_hi = std::stoull(k_range.substr(colon + 1));
    }
    std::cout << "k     growth_min(r=k)  growth_fail     cp_fail         cq_fail\n";
    for (std::uint64_t k = k_lo; k <= k_hi; k += 10) {
        nsb::GrowthBound g = nsb::cg_growth_bound(k, delta, probs.p_ls);
        std::cout << k << "\t" << g.min_growth << "\t" << g.failure_prob << "\t";
        if (cp.satisfied)
            std::cout << nsb::cp_failure_bound(k, sl_now, probs, delta, delta2);
        else
            std::cout << "n/a";
        std::cout << "\t";
        if (cq.satisfied)
            std::cout << nsb::cq_failure_bound(k, sl_now, probs, delta, delta2);
        else
            std::cout << "n/a";
        std::cout << "\n";
    }
    return 0;
}

int cmd_conformance(const std::string& impl, unsigned n, std::uint64_t seed, unsigned repeats) {
    std::vector<std::string> impls;
    if (impl == "all")
        impls = {"reference", "indexed"};
    else
        impls = {impl};
    bool ok = true;
    for (const auto& name : impls) {
        for (unsigned r = 0; r < repeats; ++r) {
            nsb::ConformanceReport rep =
                nsb::conformance_check(name, nsb::mix64(seed, r), n);
            if (!rep.pass) {
                ok = false;
                std::cout << name << " seed#" << r << ": FAIL - " << rep.counterexample
                          << "\n";
            }
        }
        if (ok) std::cout << name << ": pass (" << repeats << " stream(s), " << n
                          << " blocks each)\n";
    }
    return ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proof-of-stake longest-chain protocol simulator and property checker"};
    app.require_subcommand(1);

    std::optional<std::uint64_t> master = env_master_seed();
    std::uint64_t master_flag = 0;

    auto* run = app.add_subcommand("run", "Simulate a scenario and write trace artifacts");
    std::string run_cfg, run_out = ".";
    bool run_dot = false;
    run->add_option("config", run_cfg, "scenario config file")->required();
    run->add_option("--out", run_out, "output directory");
    run->add_flag("--dot", run_dot, "also write a Graphviz rendering of the block store");
    run->add_option("--master-seed", master_flag, "override all seed streams");

    auto* check = app.add_subcommand("check", "Simulate and apply the property checkers");
    std::string check_cfg, check_out;
    std::vector<std::string> check_list;
    std::vector<nsb::Slot> check_k;
    std::optional<nsb::Slot> check_stride;
    unsigned check_seeds = 1, check_jobs = std::thread::hardware_concurrency();
    bool check_sequential = false;
    check->add_option("config", check_cfg, "scenario config file")->required();
    check->add_option("--checks", check_list,
                      "subset: collision,forging,kp,super,growth,quality,cp,all")
        ->delimiter(',');
    check->add_option("--k", check_k, "common-prefix depths")->delimiter(',');
    check->add_option("--stride", check_stride, "pair-state sweep stride");
    check->add_option("--out", check_out, "output directory for reports/traces");
    check->add_option("--seeds", check_seeds, "batch mode: number of derived seeds");
    check->add_option("--jobs", check_jobs, "batch parallelism");
    check->add_flag("--sequential", check_sequential, "disable batch parallelism");
    check->add_option("--master-seed", master_flag, "override all seed streams");

    auto* bounds = app.add_subcommand("bounds", "Probability-bound calculator");
    std::vector<double> bq_honest{0.1, 0.1}, bq_adv{0.1};
    double b_delta = 0.1, b_delta2 = 0.1;
    std::string b_krange;
    std::uint64_t b_slnow = 1000;
    bounds->add_option("--q", bq_honest, "honest win probabilities")->delimiter(',');
    bounds->add_option("--q-adv", bq_adv, "adversarial win probabilities")->delimiter(',');
    bounds->add_option("--delta", b_delta, "lower-tail delta");
    bounds->add_option("--delta2", b_delta2, "upper-tail delta'");
    bounds->add_option("--k-range", b_krange, "A:B range of k values (step 10)");
    bounds->add_option("--sl-now", b_slnow, "current slot for the union bound");

    auto* conf = app.add_subcommand("conformance", "Block-tree implementation conformance");
    std::string c_impl = "all";
    unsigned c_n = 200, c_repeats = 50;
    std::uint64_t c_seed = 42;
    conf->add_option("--impl", c_impl, "reference | indexed | broken-noslotfilter | all");
    conf->add_option("--n", c_n, "blocks per randomized stream");
    conf->add_option("--seed", c_seed, "base seed");
    conf->add_option("--repeats", c_repeats, "number of randomized streams");

    CLI11_PARSE(app, argc, argv);

    if (run->count("--master-seed") > 0 || check->count("--master-seed") > 0)
        master = master_flag;

    try {
        if (run->parsed()) return cmd_run(run_cfg, run_out, run_dot, master);
        if (check->parsed())
            return cmd_check(check_cfg, check_list, check_k, check_stride, check_out,
                             check_seeds, check_jobs, check_sequential, master);
        if (bounds->parsed())
            return cmd_bounds(bq_honest, bq_adv, b_delta, b_delta2, b_krange, b_slnow);
        if (conf->parsed()) return cmd_conformance(c_impl, c_n, c_seed, c_repeats);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 2;
    }
    return 0;
}

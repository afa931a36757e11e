// mudt: trace synthesis, labeling, reservation simulation and diagnostics.

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mudt/config.hpp"
#include "mudt/oracle.hpp"
#include "mudt/simulation.hpp"

namespace {

struct Options {
    std::string config;
    std::string trace;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
};

mudt::SimConfig resolve(const Options& o) {
    mudt::SimConfig cfg = o.config.empty() ? mudt::SimConfig{} : mudt::load_config(o.config);
    if (!o.trace.empty()) cfg.trace_path = o.trace;
    if (o.seed) cfg.seed = *o.seed;
    if (o.epsilon) cfg.radio.epsilon = *o.epsilon;
    cfg.validate();
    return cfg;
}

nlohmann::json summary_json(const mudt::SimulationResult& r) {
    const auto& m = r.summary;
    return {{"method", m.method},
            {"slots", m.slots},
            {"total_rbs", m.total_rbs},
            {"total_over_provision_rbs", m.total_over_provision_rbs},
            {"violation_rate", m.violation_rate},
            {"empirical_reliability", m.empirical_reliability},
            {"mean_abs_count_error", m.mean_abs_count_error},
            {"burst_slots", m.burst_slots},
            {"burst_mean_abs_count_error", m.burst_mean_abs_count_error},
            {"detailed_slots", m.detailed_slots},
            {"simplified_slots", m.simplified_slots},
            {"frame_sensitivity", r.measured.sensitivity()},
            {"frame_specificity", r.measured.specificity()}};
}

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open output file: " + path.string());
    return out;
}

void add_common(CLI::App* cmd, Options& o, bool trace, bool seed, bool epsilon) {
    cmd->add_option("--config", o.config, "flat key=value config file")->check(CLI::ExistingFile);
    if (trace) cmd->add_option("--trace", o.trace, "JSON-lines trace to replay")->check(CLI::ExistingFile);
    if (seed) cmd->add_option("--seed", o.seed, "overrides sim.seed");
    if (epsilon) cmd->add_option("--epsilon", o.epsilon, "overrides radio.epsilon");
}

int cmd_generate(const Options& o, bool unlabeled) {
    const auto cfg = resolve(o);
    mudt::GeneratorConfig gen = cfg.generator;
    gen.seed = cfg.seed;
    auto trace = mudt::generate_trace(gen);
    if (!unlabeled) trace = mudt::label_key_frames(trace, cfg.labeling, cfg.frames_per_slot);
    mudt::save_trace(o.out, trace);
    std::cerr << "wrote " << trace.frames.size() << " frames (" << trace.burst_slots.size() << " burst slots) to "
              << o.out << '\n';
    return 0;
}

int cmd_label(const Options& o) {
    const auto cfg = resolve(o);
    const auto trace = mudt::load_trace(o.trace);
    mudt::save_trace(o.out, mudt::label_key_frames(trace, cfg.labeling, cfg.frames_per_slot));
    return 0;
}

mudt::PreparedTrace prepare(const mudt::SimConfig& cfg) {
    auto prepared = mudt::prepare_trace(cfg);
    if (prepared.dropped_frames > 0)
        std::cerr << "mudt: warning: dropped " << prepared.dropped_frames << " trailing frame(s) of an incomplete slot\n";
    return prepared;
}

int cmd_simulate(const Options& o, const std::string& save_model) {
    const auto cfg = resolve(o);
    const auto result = mudt::run_simulation(cfg, prepare(cfg));
    if (o.out.empty()) {
        mudt::emit_csv(std::cout, result.records);
    } else {
        mudt::emit_csv(std::filesystem::path(o.out), result.records);
        std::cout << summary_json(result).dump(2) << '\n';
    }
    if (!save_model.empty()) open_out(save_model) << mudt::models_to_json(result.models) << '\n';
    return 0;
}

int cmd_compare(const Options& o) {
    const auto cfg = resolve(o);
    const auto results = mudt::compare_baselines(cfg, prepare(cfg));
    if (!o.out.empty()) std::filesystem::create_directories(o.out);
    nlohmann::json all = nlohmann::json::array();
    for (const auto& r : results) {
        all.push_back(summary_json(r));
        if (!o.out.empty())
            mudt::emit_csv(std::filesystem::path(o.out) / (mudt::to_string(r.method) + ".csv"), r.records);
    }
    std::cout << all.dump(2) << '\n';
    return 0;
}

int cmd_verify(const Options& o) {
    const auto checks = mudt::oracle::run_reservation_checks(o.seed.value_or(2024));
    bool ok = true;
    for (const auto& c : checks) {
        std::cout << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
        ok = ok && c.passed;
    }
    return ok ? 0 : 1;
}

int cmd_inspect(const Options& o, const std::string& graph_path) {
    const auto cfg = resolve(o);
    const auto result = mudt::run_simulation(cfg, prepare(cfg));
    const auto snapshot = mudt::profile_snapshot(result.profile);
    if (o.out.empty())
        std::cout << snapshot << '\n';
    else
        open_out(o.out) << snapshot << '\n';
    if (!graph_path.empty()) {
        auto g = open_out(graph_path);
        mudt::write_graph_csv(g, result.map);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Key-frame uplink reservation with a user digital twin"};
    app.require_subcommand(1);

    Options gen_o, label_o, sim_o, cmp_o, verify_o, inspect_o;
    bool unlabeled = false;
    std::string save_model, graph_path;

    auto* gen = app.add_subcommand("generate", "synthesise a bursty frame trace (JSON lines)");
    add_common(gen, gen_o, false, true, false);
    gen->add_option("--out", gen_o.out, "output trace path")->required();
    gen->add_flag("--unlabeled", unlabeled, "skip key-frame labeling");

    auto* label = app.add_subcommand("label", "label key frames of a trace");
    add_common(label, label_o, false, false, false);
    label->add_option("--trace", label_o.trace, "input trace")->required()->check(CLI::ExistingFile);
    label->add_option("--out", label_o.out, "output trace path")->required();

    auto* sim = app.add_subcommand("simulate", "run the reservation loop and emit per-slot CSV");
    add_common(sim, sim_o, true, true, true);
    sim->add_option("--out", sim_o.out, "CSV path (default: stdout)");
    sim->add_option("--save-model", save_model, "write fitted model parameters as JSON");

    auto* cmp = app.add_subcommand("compare", "run M-UDT and both baselines on the same trace");
    add_common(cmp, cmp_o, true, true, true);
    cmp->add_option("--out", cmp_o.out, "directory for per-method CSVs");

    auto* verify = app.add_subcommand("verify", "run the reservation oracle suites");
    verify->add_option("--seed", verify_o.seed, "Monte Carlo seed");

    auto* inspect = app.add_subcommand("inspect", "dump the user profile after a run");
    add_common(inspect, inspect_o, true, true, true);
    inspect->add_option("--out", inspect_o.out, "snapshot path (default: stdout)");
    inspect->add_option("--graph", graph_path, "also write the final map graph as CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        std::cerr << "mudt: error: " << e.what() << "\nRun with --help for more information.\n";
        return 2;
    }

    try {
        if (*gen) return cmd_generate(gen_o, unlabeled);
        if (*label) return cmd_label(label_o);
        if (*sim) return cmd_simulate(sim_o, save_model);
        if (*cmp) return cmd_compare(cmp_o);
        if (*verify) return cmd_verify(verify_o);
        if (*inspect) return cmd_inspect(inspect_o, graph_path);
    } catch (const std::exception& e) {
        std::cerr << "mudt: error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

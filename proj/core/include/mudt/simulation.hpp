#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mudt/config.hpp"
#include "mudt/records.hpp"
#include "mudt/twin.hpp"

namespace mudt {

enum class Method { mudt, poisson, recurrent };

std::string to_string(Method m);

/// Per-frame confusion counts of a predictor over the scored slots.
struct ConfusionCounts {
    long long tp = 0;
    long long fn = 0;
    long long tn = 0;
    long long fp = 0;

    void add(const std::vector<bool>& truth, const std::vector<bool>& pred);
    [[nodiscard]] double sensitivity() const;
    [[nodiscard]] double specificity() const;
    [[nodiscard]] double base_rate() const;
};

inline ModelParams unfitted(ModelKind kind) {
    ModelParams p;
    p.kind = kind;
    return p;
}

struct ModelBundle {
    ModelParams detailed = unfitted(ModelKind::detailed);
    ModelParams simplified = unfitted(ModelKind::simplified);
    ModelParams recurrent = unfitted(ModelKind::recurrent);
};

/// Flat JSON: `<model>.<field>` -> list of numbers, for fitted models only.
std::string models_to_json(const ModelBundle& models);
ModelBundle models_from_json(const std::string& text);

/// Labeled trace cut into slots, shared by every method of a comparison.
struct PreparedTrace {
    FrameTrace trace;
    std::vector<TraceSlot> slots;
    std::vector<bool> burst;  ///< per slot
    std::size_t dropped_frames = 0;
};

/// Loads `sim.trace` (labeling it when unlabeled or `sim.relabel`) or
/// synthesises and labels a trace from the generator settings.
PreparedTrace prepare_trace(const SimConfig& cfg);

struct SimulationResult {
    Method method = Method::mudt;
    std::vector<SlotRecord> records;  ///< slots after warm-up
    SummaryMetrics summary;           ///< zero-slot summary when `records` is empty
    ConfusionCounts measured;         ///< per-frame accuracy over `records`
    UserProfile profile;              ///< final profile (M-UDT only)
    WeightedFrameGraph map;           ///< final key-frame map (M-UDT only)
    ModelBundle models;
};

/// The M-UDT loop. Each slot: switching step, prediction, provisioning,
/// then truth reveal, statistics and experience update, periodic refit.
/// The decision for slot t never reads slot t's key labels.
SimulationResult run_simulation(const SimConfig& cfg);
SimulationResult run_simulation(const SimConfig& cfg, const PreparedTrace& prepared);

/// Poisson-regression or recurrent-count benchmark on the same trace.
SimulationResult run_baseline(const SimConfig& cfg, const PreparedTrace& prepared, Method method);

/// M-UDT, Poisson and recurrent runs on one prepared trace, in that order.
std::vector<SimulationResult> compare_baselines(const SimConfig& cfg);
std::vector<SimulationResult> compare_baselines(const SimConfig& cfg, const PreparedTrace& prepared);

}  // namespace mudt

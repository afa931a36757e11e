#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "mudt/mapgraph.hpp"
#include "mudt/predictors.hpp"
#include "mudt/reservation.hpp"
#include "mudt/trace.hpp"
#include "mudt/twin.hpp"

namespace mudt {

struct TwinConfig {
    SwitchConfig switching;
    int window = 5;
    ConfusionStats initial_stats;
    std::size_t capacity = 2000;
    std::size_t recent_pairs = 32;
    int refit_every = 50;
    int warmup = 20;
    /// When set, provisioning uses `pinned` instead of the moving averages
    /// (the averages are still tracked in the profile).
    bool pin_stats = false;
    ConfusionStats pinned;
};

struct BaselineConfig {
    std::size_t poisson_window = 0;  ///< 0 = whole history
};

/// Everything a simulation run needs. Every field is reachable from a flat
/// `section.key = value` file, see `apply_setting`.
struct SimConfig {
    std::uint64_t seed = 1;
    int frames_per_slot = 10;
    std::string trace_path;       ///< empty: synthesise from `generator`
    bool relabel = false;         ///< relabel a loaded trace that already has keys
    std::string model_load_path;  ///< optional warm-start parameters

    GeneratorConfig generator;
    LabelingConfig labeling{0.6, 0.1, 32};
    CullConfig map{32, 0.9};
    RadioConfig radio;
    RBSpec rb;
    TwinConfig twin;
    TrainOptions training;
    int refit_epochs = 100;  ///< epochs for warm-started periodic refits
    BaselineConfig baseline;

    /// Checks ranges and cross-field consistency (F must agree everywhere).
    void validate() const;
};

/// Sets one dotted key, e.g. `radio.epsilon`. Throws std::invalid_argument
/// for unknown keys or unparsable values.
void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value);

/// `key = value` lines; blank lines and `#` comments are ignored. Errors
/// carry the line number.
SimConfig parse_config(std::istream& in, SimConfig base = {});
SimConfig load_config(const std::filesystem::path& path);

/// All recognised keys, in a stable order.
std::vector<std::string> config_keys();

/// Serialises every key; `parse_config(format_config(c))` reproduces `c`.
std::string format_config(const SimConfig& cfg);

}  // namespace mudt

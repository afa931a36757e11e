#include "mudt/config.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>
#include <stdexcept>

namespace mudt {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v) {
    T out{};
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw std::invalid_argument("invalid value '" + v + "' for " + key);
    return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw std::invalid_argument("invalid boolean '" + v + "' for " + key);
}

std::string show(double v) {
    std::array<char, 32> buf{};
    auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), end);
}
template <class I>
std::string show_int(I v) {
    return std::to_string(v);
}
std::string show(bool v) { return v ? "true" : "false"; }

struct Entry {
    const char* key;
    std::function<void(SimConfig&, const std::string& key, const std::string& value)> set;
    std::function<std::string(const SimConfig&)> get;
};

#define MUDT_DOUBLE(KEY, FIELD)                                                                          \
    Entry {                                                                                              \
        KEY, [](SimConfig& c, const std::string& k, const std::string& v) { c.FIELD = parse_number<double>(k, v); }, \
            [](const SimConfig& c) { return show(c.FIELD); }                                             \
    }
#define MUDT_INT(KEY, FIELD, TYPE)                                                                       \
    Entry {                                                                                              \
        KEY, [](SimConfig& c, const std::string& k, const std::string& v) { c.FIELD = parse_number<TYPE>(k, v); }, \
            [](const SimConfig& c) { return show_int(c.FIELD); }                                         \
    }
#define MUDT_BOOL(KEY, FIELD)                                                                            \
    Entry {                                                                                              \
        KEY, [](SimConfig& c, const std::string& k, const std::string& v) { c.FIELD = parse_bool(k, v); }, \
            [](const SimConfig& c) { return show(c.FIELD); }                                             \
    }
#define MUDT_STRING(KEY, FIELD)                                                                          \
    Entry {                                                                                              \
        KEY, [](SimConfig& c, const std::string&, const std::string& v) { c.FIELD = v; },                \
            [](const SimConfig& c) { return c.FIELD; }                                                   \
    }

const std::vector<Entry>& entries() {
    static const std::vector<Entry> table = {
        MUDT_INT("sim.seed", seed, std::uint64_t),
        Entry{"sim.frames_per_slot",
              [](SimConfig& c, const std::string& k, const std::string& v) {
                  const int F = parse_number<int>(k, v);
                  c.frames_per_slot = c.generator.frames_per_slot = c.radio.frames_per_slot = F;
              },
              [](const SimConfig& c) { return show_int(c.frames_per_slot); }},
        MUDT_STRING("sim.trace", trace_path),
        MUDT_BOOL("sim.relabel", relabel),
        MUDT_STRING("model.load", model_load_path),

        MUDT_INT("generator.world_fp_count", generator.world_fp_count, int),
        MUDT_DOUBLE("generator.view_radius", generator.view_radius),
        MUDT_DOUBLE("generator.step_sigma", generator.step_sigma),
        MUDT_DOUBLE("generator.burst_prob", generator.burst_prob),
        MUDT_DOUBLE("generator.burst_jump", generator.burst_jump),
        MUDT_INT("generator.burst_length", generator.burst_length, int),
        MUDT_INT("generator.frames_per_slot", generator.frames_per_slot, int),
        MUDT_INT("generator.slot_count", generator.slot_count, int),

        MUDT_DOUBLE("labeling.theta_new", labeling.theta_new),
        MUDT_DOUBLE("labeling.theta_overlap", labeling.theta_overlap),
        MUDT_INT("labeling.key_window", labeling.key_window, std::size_t),

        MUDT_INT("map.max_map_size", map.max_map_size, std::size_t),
        MUDT_DOUBLE("map.redundancy_threshold", map.redundancy_threshold),

        MUDT_DOUBLE("radio.alpha", radio.alpha_bits),
        MUDT_DOUBLE("radio.t_r", radio.t_r),
        MUDT_DOUBLE("radio.gamma_db", radio.gamma_db),
        MUDT_DOUBLE("radio.epsilon", radio.epsilon),
        MUDT_INT("radio.frames_per_slot", radio.frames_per_slot, int),
        MUDT_DOUBLE("radio.slot_duration", radio.slot_duration),
        MUDT_DOUBLE("rb.bandwidth_hz", rb.rb_bandwidth_hz),
        MUDT_DOUBLE("rb.duration_s", rb.rb_duration_s),

        MUDT_INT("twin.delta", twin.switching.delta, int),
        MUDT_INT("twin.M", twin.switching.M, int),
        MUDT_INT("twin.T_w", twin.window, int),
        MUDT_DOUBLE("twin.beta", twin.initial_stats.beta),
        MUDT_DOUBLE("twin.init_p", twin.initial_stats.p),
        MUDT_DOUBLE("twin.init_q", twin.initial_stats.q),
        MUDT_DOUBLE("twin.init_lambda", twin.initial_stats.lambda),
        MUDT_INT("twin.capacity", twin.capacity, std::size_t),
        MUDT_INT("twin.recent_pairs", twin.recent_pairs, std::size_t),
        MUDT_INT("twin.refit_every", twin.refit_every, int),
        MUDT_INT("twin.warmup", twin.warmup, int),
        MUDT_BOOL("twin.pin_stats", twin.pin_stats),
        MUDT_DOUBLE("twin.pinned_p", twin.pinned.p),
        MUDT_DOUBLE("twin.pinned_q", twin.pinned.q),
        MUDT_DOUBLE("twin.pinned_lambda", twin.pinned.lambda),

        MUDT_INT("predictor.epochs", training.epochs, int),
        MUDT_INT("predictor.refit_epochs", refit_epochs, int),
        MUDT_DOUBLE("predictor.lr", training.lr),
        MUDT_INT("predictor.hidden", training.hidden, int),
        MUDT_INT("predictor.seed", training.seed, std::uint64_t),

        MUDT_INT("baseline.poisson_window", baseline.poisson_window, std::size_t),
    };
    return table;
}

#undef MUDT_DOUBLE
#undef MUDT_INT
#undef MUDT_BOOL
#undef MUDT_STRING

}  // namespace

void SimConfig::validate() const {
    if (frames_per_slot < 1) throw std::invalid_argument("sim.frames_per_slot must be >= 1");
    if (generator.frames_per_slot != frames_per_slot || radio.frames_per_slot != frames_per_slot)
        throw std::invalid_argument("frames_per_slot disagrees between sim, generator and radio settings");
    generator.validate();
    labeling.validate();
    map.validate();
    radio.validate();
    rb.validate();
    twin.switching.validate();
    twin.initial_stats.validate();
    if (twin.pin_stats) {
        ConfusionStats pinned = twin.pinned;
        pinned.beta = twin.initial_stats.beta;
        pinned.validate();
    }
    if (twin.window < 1) throw std::invalid_argument("twin.T_w must be >= 1");
    if (twin.capacity < 1) throw std::invalid_argument("twin.capacity must be >= 1");
    if (twin.refit_every < 1) throw std::invalid_argument("twin.refit_every must be >= 1");
    if (twin.warmup < 0) throw std::invalid_argument("twin.warmup must be >= 0");
    if (training.epochs < 0 || refit_epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (!(training.lr > 0.0)) throw std::invalid_argument("predictor.lr must be > 0");
    if (training.hidden < 1) throw std::invalid_argument("predictor.hidden must be >= 1");
}

void apply_setting(SimConfig& cfg, const std::string& key, const std::string& value) {
    for (const auto& e : entries())
        if (key == e.key) {
            e.set(cfg, key, value);
            return;
        }
    throw std::invalid_argument("unknown config key '" + key + "'");
}

SimConfig parse_config(std::istream& in, SimConfig base) {
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": expected key=value");
        try {
            apply_setting(base, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument("config line " + std::to_string(line_no) + ": " + e.what());
        }
    }
    return base;
}

SimConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path.string());
    return parse_config(in);
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& e : entries()) keys.emplace_back(e.key);
    return keys;
}

std::string format_config(const SimConfig& cfg) {
    std::ostringstream out;
    for (const auto& e : entries()) out << e.key << " = " << e.get(cfg) << '\n';
    return out.str();
}

}  // namespace mudt

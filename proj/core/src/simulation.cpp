#include "mudt/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mudt {

std::string to_string(Method m) {
    switch (m) {
        case Method::mudt: return "mudt";
        case Method::poisson: return "poisson";
        case Method::recurrent: return "recurrent";
    }
    return "unknown";
}

void ConfusionCounts::add(const std::vector<bool>& truth, const std::vector<bool>& pred) {
    if (truth.size() != pred.size()) throw std::invalid_argument("mask length mismatch");
    for (std::size_t f = 0; f < truth.size(); ++f) {
        if (truth[f])
            ++(pred[f] ? tp : fn);
        else
            ++(pred[f] ? fp : tn);
    }
}

double ConfusionCounts::sensitivity() const { return tp + fn ? static_cast<double>(tp) / (tp + fn) : 1.0; }
double ConfusionCounts::specificity() const { return tn + fp ? static_cast<double>(tn) / (tn + fp) : 1.0; }
double ConfusionCounts::base_rate() const {
    const long long all = tp + fn + tn + fp;
    return all ? static_cast<double>(tp + fn) / static_cast<double>(all) : 0.0;
}

// ---------------------------------------------------------------------------

std::string models_to_json(const ModelBundle& models) {
    nlohmann::json out = nlohmann::json::object();
    auto put = [&](const char* name, const ModelParams& p) {
        if (!p.fitted()) return;
        const auto fields = nlohmann::json::parse(to_json(p));
        for (const auto& [k, v] : fields.items()) out[std::string(name) + "." + k] = v;
    };
    put("detailed", models.detailed);
    put("simplified", models.simplified);
    put("recurrent", models.recurrent);
    return out.dump();
}

ModelBundle models_from_json(const std::string& text) {
    const auto in = nlohmann::json::parse(text);
    if (!in.is_object()) throw std::invalid_argument("model file must hold a JSON object");
    ModelBundle b;
    auto take = [&](const std::string& name, ModelParams& dst) {
        nlohmann::json sub = nlohmann::json::object();
        for (const auto& [k, v] : in.items())
            if (k.rfind(name + ".", 0) == 0) sub[k.substr(name.size() + 1)] = v;
        if (!sub.empty()) dst = model_params_from_json(sub.dump());
    };
    take("detailed", b.detailed);
    take("simplified", b.simplified);
    take("recurrent", b.recurrent);
    return b;
}

// ---------------------------------------------------------------------------

PreparedTrace prepare_trace(const SimConfig& cfg) {
    cfg.validate();
    const int F = cfg.frames_per_slot;
    PreparedTrace out;
    if (!cfg.trace_path.empty()) {
        out.trace = load_trace(cfg.trace_path, F);
        if (!out.trace.labeled() || cfg.relabel) out.trace = label_key_frames(out.trace, cfg.labeling, F);
    } else {
        GeneratorConfig gen = cfg.generator;
        gen.seed = cfg.seed;
        out.trace = label_key_frames(generate_trace(gen), cfg.labeling, F);
    }
    out.slots = slotify(out.trace, F, &out.dropped_frames);
    if (out.slots.empty()) throw std::invalid_argument("trace is shorter than one slot of F frames");
    out.burst.assign(out.slots.size(), false);
    for (auto t : out.trace.burst_slots)
        if (t < out.burst.size()) out.burst[t] = true;
    return out;
}

namespace {

SlotRecord make_record(const SimConfig& cfg, const TraceSlot& slot, int a_hat, double predicted, int h, int n_star,
                       const ConfusionStats& stats, bool burst) {
    SlotRecord r;
    r.t = slot.t;
    r.k_true = slot.key_count;
    r.a_hat = a_hat;
    r.h = h;
    r.n_star = n_star;
    r.b_star_hz = reserve_bandwidth(n_star, cfg.radio);
    r.rb_count = quantize_rbs(r.b_star_hz, cfg.rb);
    r.violated = r.k_true > n_star;
    r.over_provision_frames = std::max(0, n_star - r.k_true);
    const int needed_rbs = quantize_rbs(reserve_bandwidth(r.k_true, cfg.radio), cfg.rb);
    r.over_provision_rbs = std::max(0, r.rb_count - needed_rbs);
    r.p = stats.p;
    r.q = stats.q;
    r.lambda = stats.lambda;
    r.predicted_count = predicted;
    r.burst = burst;
    return r;
}

bool refit_due(const SimConfig& cfg, std::size_t t) {
    const auto warmup = static_cast<std::size_t>(cfg.twin.warmup);
    const auto every = static_cast<std::size_t>(cfg.twin.refit_every);
    if (t == 0) return false;
    if (t < warmup) return false;
    return t == warmup || (t - warmup) % every == 0;
}

ModelBundle initial_models(const SimConfig& cfg) {
    if (cfg.model_load_path.empty()) return {};
    std::ifstream in(cfg.model_load_path);
    if (!in) throw std::runtime_error("cannot open model file: " + cfg.model_load_path);
    std::stringstream ss;
    ss << in.rdbuf();
    return models_from_json(ss.str());
}

TrainOptions refit_options(const SimConfig& cfg, bool warm) {
    TrainOptions o = cfg.training;
    if (warm) o.epochs = cfg.refit_epochs;
    return o;
}

SimulationResult finish(Method method, std::vector<SlotRecord> records) {
    SimulationResult r;
    r.method = method;
    r.records = std::move(records);
    if (!r.records.empty())
        r.summary = compute_metrics(r.records, to_string(method));
    else
        r.summary.method = to_string(method);
    return r;
}

}  // namespace

SimulationResult run_simulation(const SimConfig& cfg) { return run_simulation(cfg, prepare_trace(cfg)); }

SimulationResult run_simulation(const SimConfig& cfg, const PreparedTrace& prepared) {
    cfg.validate();
    const int F = cfg.frames_per_slot;

    UserProfile profile;
    profile.user.experience = ExperienceStore(cfg.twin.capacity);
    profile.user.recent_capacity = cfg.twin.recent_pairs;
    profile.configuration.switching = cfg.twin.switching;
    profile.configuration.window = cfg.twin.window;
    profile.configuration.labeling = cfg.labeling;
    profile.management.stats = cfg.twin.initial_stats;

    ModelBundle models = initial_models(cfg);
    WeightedFrameGraph map;
    ConfusionCounts measured;
    std::vector<SlotRecord> records;
    const auto& history = profile.user.key_count_history;

    for (const auto& slot : prepared.slots) {
        const std::size_t t = slot.t;
        auto& sw = profile.configuration.switch_state;
        if (t > 0) sw = msf_step(sw, history[t - 1], t >= 2 ? history[t - 2] : 0, cfg.twin.switching);

        if (refit_due(cfg, t) && !profile.user.experience.empty()) {
            const auto& store = profile.user.experience;
            const bool warm_d = models.detailed.fitted();
            const bool warm_s = models.simplified.fitted();
            models.detailed = fit_detailed(store, refit_options(cfg, warm_d), warm_d ? &models.detailed : nullptr).params;
            models.simplified = fit_simplified(store, cfg.twin.window, refit_options(cfg, warm_s),
                                               warm_s ? &models.simplified : nullptr)
                                    .params;
        }

        // Decision: uses the map and frame features of slot t, never its labels.
        DetailedState s_d = make_detailed_state(map, slot.frames);
        SimplifiedState s_s = make_simplified_state(history, cfg.twin.window, F);
        const bool in_warmup = t < static_cast<std::size_t>(cfg.twin.warmup);
        const bool use_detailed = sw.h == 1 && !in_warmup && models.detailed.fitted();

        PredictedAction pred;
        double predicted_count = 0.0;
        if (use_detailed) {
            pred = predict_detailed(models.detailed, s_d);
            predicted_count = pred.count;
        } else if (models.simplified.fitted()) {
            predicted_count = F * simplified_score(models.simplified, s_s);
            pred = action_from_count(static_cast<int>(std::lround(predicted_count)), F);
        } else {
            pred = action_from_count(history.empty() ? 0 : history.back(), F);
            predicted_count = pred.count;
        }

        const ConfusionStats& decision_stats = cfg.twin.pin_stats ? cfg.twin.pinned : profile.management.stats;
        const auto n = find_n_star(F, pred.count, decision_stats, cfg.radio.epsilon);

        // Reveal.
        if (!in_warmup) {
            records.push_back(make_record(cfg, slot, pred.count, predicted_count, use_detailed ? 1 : 0, n.n_star,
                                          decision_stats, prepared.burst[t]));
            measured.add(slot.key_mask, pred.mask);
        }
        profile.management.stats = update_confusion(profile.management.stats, slot.key_mask, pred.mask);
        record_experience(profile, t, std::move(s_d), std::move(s_s), slot.key_mask, pred);

        std::vector<Frame> keys;
        for (std::size_t f = 0; f < slot.frames.size(); ++f)
            if (slot.key_mask[f]) keys.push_back(slot.frames[f]);
        map = update_map(map, keys, cfg.map).map;
    }

    auto result = finish(Method::mudt, std::move(records));
    result.measured = measured;
    result.profile = std::move(profile);
    result.map = std::move(map);
    result.models = std::move(models);
    return result;
}

SimulationResult run_baseline(const SimConfig& cfg, const PreparedTrace& prepared, Method method) {
    if (method == Method::mudt) return run_simulation(cfg, prepared);
    cfg.validate();
    const int F = cfg.frames_per_slot;
    const ConfusionStats no_stats{0.0, 0.0, 0.0, cfg.twin.initial_stats.beta};

    std::vector<int> history;
    ExperienceStore store(cfg.twin.capacity);
    ModelBundle models = initial_models(cfg);
    std::vector<SlotRecord> records;
    ConfusionCounts measured;

    for (const auto& slot : prepared.slots) {
        const std::size_t t = slot.t;
        int n_star = F;
        double predicted = 0.0;

        if (method == Method::poisson) {
            if (!history.empty()) {
                const std::size_t w = cfg.baseline.poisson_window;
                const auto first = (w == 0 || history.size() <= w) ? history.begin()
                                                                     : history.end() - static_cast<std::ptrdiff_t>(w);
                const std::span<const int> window(&*first, static_cast<std::size_t>(history.end() - first));
                n_star = poisson_reserve(window, cfg.radio.epsilon);
                predicted = std::accumulate(window.begin(), window.end(), 0.0) / static_cast<double>(window.size());
            }
        } else {
            if (refit_due(cfg, t) && !store.empty()) {
                const bool warm = models.recurrent.fitted();
                models.recurrent =
                    fit_recurrent(store, cfg.twin.window, refit_options(cfg, warm), warm ? &models.recurrent : nullptr)
                        .params;
            }
            predicted = models.recurrent.fitted() ? recurrent_baseline_predict(history, F, models.recurrent)
                                                  : (history.empty() ? 0.0 : history.back());
            n_star = std::clamp(static_cast<int>(std::lround(predicted)), 0, F);
        }

        const int a_hat = std::clamp(static_cast<int>(std::lround(predicted)), 0, F);
        if (t >= static_cast<std::size_t>(cfg.twin.warmup)) {
            records.push_back(make_record(cfg, slot, a_hat, predicted, -1, n_star, no_stats, prepared.burst[t]));
            measured.add(slot.key_mask, action_from_count(a_hat, F).mask);
        }

        if (method == Method::recurrent)
            store.push(Experience{t, {}, make_simplified_state(history, cfg.twin.window, F), slot.key_mask});
        history.push_back(slot.key_count);
    }

    auto result = finish(method, std::move(records));
    result.measured = measured;
    result.models = std::move(models);
    return result;
}

std::vector<SimulationResult> compare_baselines(const SimConfig& cfg) {
    return compare_baselines(cfg, prepare_trace(cfg));
}

std::vector<SimulationResult> compare_baselines(const SimConfig& cfg, const PreparedTrace& prepared) {
    std::vector<SimulationResult> out;
    for (Method m : {Method::mudt, Method::poisson, Method::recurrent}) out.push_back(run_baseline(cfg, prepared, m));
    return out;
}

}  // namespace mudt

#include "mudt/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <json.hpp>

#include "optim.hpp"

namespace mudt {

using detail::sigmoid;

PredictedAction action_from_scores(std::vector<double> scores) {
    PredictedAction a;
    a.mask.resize(scores.size());
    for (std::size_t f = 0; f < scores.size(); ++f) {
        a.mask[f] = scores[f] >= 0.5;
        a.count += a.mask[f] ? 1 : 0;
    }
    a.scores = std::move(scores);
    return a;
}

PredictedAction action_from_count(int count, int frames_per_slot) {
    if (frames_per_slot <= 0) throw std::invalid_argument("frames_per_slot must be positive");
    count = std::clamp(count, 0, frames_per_slot);
    std::vector<double> scores(static_cast<std::size_t>(frames_per_slot), 0.0);
    std::fill(scores.end() - count, scores.end(), 1.0);
    return action_from_scores(std::move(scores));
}

DetailedState make_detailed_state(const WeightedFrameGraph& map, std::span<const Frame> slot_frames) {
    DetailedState s;
    s.map_graph = map;
    s.slot_graph = build_graph(slot_frames);
    s.cross_weights.resize(slot_frames.size());
    for (std::size_t f = 0; f < slot_frames.size(); ++f) {
        auto& row = s.cross_weights[f];
        row.reserve(map.size());
        for (const auto& node : map.nodes()) row.push_back(jaccard(slot_frames[f].fps, node.fps));
    }
    return s;
}

SimplifiedState make_simplified_state(std::span<const int> history, int window, int frames_per_slot) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    SimplifiedState s;
    s.frames_per_slot = frames_per_slot;
    s.counts.assign(static_cast<std::size_t>(window), 0);
    const std::size_t take = std::min(history.size(), s.counts.size());
    std::copy(history.end() - static_cast<std::ptrdiff_t>(take), history.end(), s.counts.end() - static_cast<std::ptrdiff_t>(take));
    return s;
}

ExperienceStore::ExperienceStore(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("experience capacity must be >= 1");
}

void ExperienceStore::push(Experience record) {
    if (!records_.empty() && record.t <= records_.back().t)
        throw std::invalid_argument("experience records must be pushed in chronological order");
    records_.push_back(std::move(record));
    while (records_.size() > capacity_) records_.pop_front();
}

// ---------------------------------------------------------------------------
// Parameters

void ModelParams::validate() const {
    auto finite = [](const std::vector<double>& v) {
        return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
    };
    if (!finite(weights) || !finite(feature_mean) || !finite(feature_scale))
        throw std::invalid_argument("model parameters must be finite");
    if (feature_mean.size() != feature_scale.size())
        throw std::invalid_argument("feature_mean and feature_scale differ in length");
}

std::string to_json(const ModelParams& params) {
    nlohmann::json j;
    j["kind"] = {static_cast<int>(params.kind)};
    j["weights"] = params.weights;
    j["feature_mean"] = params.feature_mean;
    j["feature_scale"] = params.feature_scale;
    j["window"] = {params.window};
    j["hidden"] = {params.hidden};
    return j.dump();
}

ModelParams model_params_from_json(const std::string& text) {
    const auto j = nlohmann::json::parse(text);
    auto list = [&](const char* name) {
        if (!j.contains(name) || !j.at(name).is_array())
            throw std::invalid_argument(std::string("model JSON lacks list \"") + name + "\"");
        return j.at(name).get<std::vector<double>>();
    };
    auto scalar = [&](const char* name) {
        const auto v = list(name);
        if (v.size() != 1) throw std::invalid_argument(std::string("\"") + name + "\" must hold one number");
        return static_cast<int>(v.front());
    };
    ModelParams p;
    const int kind = scalar("kind");
    if (kind < 0 || kind > 2) throw std::invalid_argument("unknown model kind");
    p.kind = static_cast<ModelKind>(kind);
    p.weights = list("weights");
    p.feature_mean = list("feature_mean");
    p.feature_scale = list("feature_scale");
    p.window = scalar("window");
    p.hidden = scalar("hidden");
    p.validate();
    return p;
}

namespace {

void require_fitted(const ModelParams& p, ModelKind kind) {
    if (!p.fitted()) throw std::invalid_argument("model parameters are not fitted");
    if (p.kind != kind) throw std::invalid_argument("model parameters are for a different model kind");
}

// Row-major design matrix with per-column standardisation.
struct Standardizer {
    std::vector<double> mean;
    std::vector<double> scale;

    static Standardizer fit(const std::vector<double>& x, std::size_t cols) {
        Standardizer s{std::vector<double>(cols, 0.0), std::vector<double>(cols, 1.0)};
        const std::size_t rows = cols ? x.size() / cols : 0;
        if (rows == 0) return s;
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) s.mean[c] += x[r * cols + c];
        for (auto& m : s.mean) m /= static_cast<double>(rows);
        std::vector<double> var(cols, 0.0);
        for (std::size_t r = 0; r < rows; ++r)
            for (std::size_t c = 0; c < cols; ++c) {
                const double d = x[r * cols + c] - s.mean[c];
                var[c] += d * d;
            }
        for (std::size_t c = 0; c < cols; ++c) {
            const double sd = std::sqrt(var[c] / static_cast<double>(rows));
            s.scale[c] = sd > 1e-9 ? sd : 1.0;
        }
        return s;
    }

    void apply(std::vector<double>& x) const {
        const std::size_t cols = mean.size();
        for (std::size_t i = 0; i < x.size(); ++i) x[i] = (x[i] - mean[i % cols]) / scale[i % cols];
    }
};

double affine(const std::vector<double>& w, const double* z, std::size_t d) {
    double u = w[d];
    for (std::size_t c = 0; c < d; ++c) u += w[c] * z[c];
    return u;
}

// --- detailed ---------------------------------------------------------------

struct DetailedData {
    std::vector<double> z;  // rows x kDetailedFeatureCount, standardised
    std::vector<double> y;
    std::size_t records = 0;
};

std::vector<double> raw_detailed_rows(const ExperienceStore& store, std::vector<double>* y) {
    std::vector<double> x;
    for (const auto& rec : store.records()) {
        if (rec.truth.size() != rec.detailed.frame_count())
            throw std::invalid_argument("experience truth mask does not match the slot size");
        for (std::size_t f = 0; f < rec.truth.size(); ++f) {
            const auto feat = detailed_features(rec.detailed, f, rec.truth);
            x.insert(x.end(), feat.begin(), feat.end());
            if (y) y->push_back(rec.truth[f] ? 1.0 : 0.0);
        }
    }
    return x;
}

DetailedData detailed_data(const ModelParams& p, const ExperienceStore& store) {
    DetailedData data;
    data.z = raw_detailed_rows(store, &data.y);
    Standardizer{p.feature_mean, p.feature_scale}.apply(data.z);
    data.records = store.size();
    return data;
}

double detailed_objective(const std::vector<double>& w, const DetailedData& data, std::vector<double>* grad) {
    constexpr std::size_t d = kDetailedFeatureCount;
    if (grad) grad->assign(w.size(), 0.0);
    double loss = 0.0;
    for (std::size_t r = 0; r < data.y.size(); ++r) {
        const double* z = &data.z[r * d];
        const double s = sigmoid(affine(w, z, d));
        const double err = data.y[r] - s;
        loss += err * err;
        if (grad) {
            const double g = -2.0 * err * s * (1.0 - s);
            for (std::size_t c = 0; c < d; ++c) (*grad)[c] += g * z[c];
            (*grad)[d] += g;
        }
    }
    const double inv = 1.0 / static_cast<double>(data.records);
    if (grad)
        for (auto& g : *grad) g *= inv;
    return loss * inv;
}

// --- simplified --------------------------------------------------------------

struct CountData {
    std::vector<double> z;  // rows x window
    std::vector<double> k;  // true count
    std::vector<double> F;
    std::size_t window = 0;
};

CountData raw_count_rows(const ExperienceStore& store, int window) {
    if (window < 1) throw std::invalid_argument("window must be >= 1");
    CountData data;
    data.window = static_cast<std::size_t>(window);
    for (const auto& rec : store.records()) {
        const auto& counts = rec.simplified.counts;
        if (counts.size() < data.window)
            throw std::invalid_argument("experience window shorter than the requested T_w");
        const double F = static_cast<double>(rec.truth.size());
        if (F <= 0) throw std::invalid_argument("experience record has an empty truth mask");
        for (std::size_t i = counts.size() - data.window; i < counts.size(); ++i)
            data.z.push_back(counts[i] / F);
        data.k.push_back(static_cast<double>(std::count(rec.truth.begin(), rec.truth.end(), true)));
        data.F.push_back(F);
    }
    return data;
}

double count_loss(double c, double k, double F) { return k * (1.0 - c) * (1.0 - c) + (F - k) * c * c; }
double count_loss_dc(double c, double k, double F) { return 2.0 * (F * c - k); }

double simplified_objective(const std::vector<double>& w, const CountData& data, std::vector<double>* grad) {
    const std::size_t d = data.window;
    if (grad) grad->assign(w.size(), 0.0);
    double loss = 0.0;
    for (std::size_t r = 0; r < data.k.size(); ++r) {
        const double* z = &data.z[r * d];
        const double c = sigmoid(affine(w, z, d));
        loss += count_loss(c, data.k[r], data.F[r]);
        if (grad) {
            const double g = count_loss_dc(c, data.k[r], data.F[r]) * c * (1.0 - c);
            for (std::size_t i = 0; i < d; ++i) (*grad)[i] += g * z[i];
            (*grad)[d] += g;
        }
    }
    const double inv = 1.0 / static_cast<double>(data.k.size());
    if (grad)
        for (auto& g : *grad) g *= inv;
    return loss * inv;
}

std::vector<double> standardized_window(const ModelParams& p, const SimplifiedState& s) {
    if (static_cast<int>(s.counts.size()) < p.window)
        throw std::invalid_argument("simplified state shorter than model window");
    if (s.frames_per_slot <= 0) throw std::invalid_argument("simplified state lacks frames_per_slot");
    std::vector<double> z(s.counts.end() - p.window, s.counts.end());
    for (auto& v : z) v /= s.frames_per_slot;
    Standardizer{p.feature_mean, p.feature_scale}.apply(z);
    return z;
}

}  // namespace

// ---------------------------------------------------------------------------
// Detailed model

std::vector<double> detailed_features(const DetailedState& s, std::size_t f, const std::vector<bool>& keys_so_far) {
    const std::size_t F = s.frame_count();
    if (f >= F) throw std::out_of_range("frame index outside slot");
    if (s.slot_graph.size() != F) throw std::invalid_argument("slot graph does not match cross weights");

    std::vector<double> x(kDetailedFeatureCount, 0.0);
    const auto& cw = s.cross_weights[f];
    if (!cw.empty()) {
        x[0] = *std::max_element(cw.begin(), cw.end());
        x[1] = std::accumulate(cw.begin(), cw.end(), 0.0) / static_cast<double>(cw.size());
    }

    const auto nodes = s.slot_graph.nodes();
    double in_slot_max = 0.0;
    double in_slot_sum = 0.0;
    double earlier_key_max = 0.0;
    for (std::size_t g = 0; g < F; ++g) {
        if (g == f) continue;
        const double w = s.slot_graph.weight(nodes[f].frame_id, nodes[g].frame_id);
        in_slot_max = std::max(in_slot_max, w);
        in_slot_sum += w;
        if (g < f && g < keys_so_far.size() && keys_so_far[g]) earlier_key_max = std::max(earlier_key_max, w);
    }
    x[2] = in_slot_max;
    x[3] = F > 1 ? in_slot_sum / static_cast<double>(F - 1) : 0.0;
    x[4] = earlier_key_max;
    x[5] = std::max(x[0], earlier_key_max);
    x[6] = static_cast<double>(f) / static_cast<double>(F);
    return x;
}

FitResult fit_detailed(const ExperienceStore& store, const TrainOptions& opts, const ModelParams* warm_start) {
    if (store.empty()) throw std::invalid_argument("cannot fit on an empty experience store");
    ModelParams p;
    p.kind = ModelKind::detailed;
    if (warm_start && warm_start->fitted()) {
        require_fitted(*warm_start, ModelKind::detailed);
        p = *warm_start;
    } else {
        const auto raw = raw_detailed_rows(store, nullptr);
        const auto st = Standardizer::fit(raw, kDetailedFeatureCount);
        p.feature_mean = st.mean;
        p.feature_scale = st.scale;
        p.weights = detail::random_init(kDetailedFeatureCount + 1, opts.seed, 0.1);
    }
    const auto data = detailed_data(p, store);
    auto objective = [&](const std::vector<double>& w, std::vector<double>& g) { return detailed_objective(w, data, &g); };
    const auto r = detail::adam_minimize(p.weights, objective, opts.epochs, opts.lr);
    return {std::move(p), r.initial_loss, r.best_loss};
}

PredictedAction predict_detailed(const ModelParams& params, const DetailedState& s) {
    require_fitted(params, ModelKind::detailed);
    const std::size_t F = s.frame_count();
    std::vector<double> scores(F, 0.0);
    std::vector<bool> mask(F, false);
    for (std::size_t f = 0; f < F; ++f) {
        auto z = detailed_features(s, f, mask);
        Standardizer{params.feature_mean, params.feature_scale}.apply(z);
        scores[f] = sigmoid(affine(params.weights, z.data(), kDetailedFeatureCount));
        mask[f] = scores[f] >= 0.5;
    }
    return action_from_scores(std::move(scores));
}

double detailed_loss(const ModelParams& params, const ExperienceStore& store) {
    require_fitted(params, ModelKind::detailed);
    return detailed_objective(params.weights, detailed_data(params, store), nullptr);
}

std::vector<double> detailed_loss_gradient(const ModelParams& params, const ExperienceStore& store) {
    require_fitted(params, ModelKind::detailed);
    std::vector<double> g;
    detailed_objective(params.weights, detailed_data(params, store), &g);
    return g;
}

// ---------------------------------------------------------------------------
// Simplified model

FitResult fit_simplified(const ExperienceStore& store, int window, const TrainOptions& opts,
                         const ModelParams* warm_start) {
    if (store.empty()) throw std::invalid_argument("cannot fit on an empty experience store");
    auto data = raw_count_rows(store, window);
    ModelParams p;
    p.kind = ModelKind::simplified;
    p.window = window;
    if (warm_start && warm_start->fitted() && warm_start->window == window) {
        require_fitted(*warm_start, ModelKind::simplified);
        p = *warm_start;
    } else {
        const auto st = Standardizer::fit(data.z, data.window);
        p.feature_mean = st.mean;
        p.feature_scale = st.scale;
        p.weights = detail::random_init(data.window + 1, opts.seed, 0.1);
    }
    Standardizer{p.feature_mean, p.feature_scale}.apply(data.z);
    auto objective = [&](const std::vector<double>& w, std::vector<double>& g) { return simplified_objective(w, data, &g); };
    const auto r = detail::adam_minimize(p.weights, objective, opts.epochs, opts.lr);
    return {std::move(p), r.initial_loss, r.best_loss};
}

double simplified_score(const ModelParams& params, const SimplifiedState& s) {
    require_fitted(params, ModelKind::simplified);
    const auto z = standardized_window(params, s);
    return sigmoid(affine(params.weights, z.data(), z.size()));
}

PredictedAction predict_simplified(const ModelParams& params, const SimplifiedState& s) {
    const double c = simplified_score(params, s);
    const int count = static_cast<int>(std::lround(c * s.frames_per_slot));
    return action_from_count(count, s.frames_per_slot);
}

double simplified_loss(const ModelParams& params, const ExperienceStore& store) {
    require_fitted(params, ModelKind::simplified);
    auto data = raw_count_rows(store, params.window);
    Standardizer{params.feature_mean, params.feature_scale}.apply(data.z);
    return simplified_objective(params.weights, data, nullptr);
}

std::vector<double> simplified_loss_gradient(const ModelParams& params, const ExperienceStore& store) {
    require_fitted(params, ModelKind::simplified);
    auto data = raw_count_rows(store, params.window);
    Standardizer{params.feature_mean, params.feature_scale}.apply(data.z);
    std::vector<double> g;
    simplified_objective(params.weights, data, &g);
    return g;
}

// ---------------------------------------------------------------------------
// State transition

void TransitionConfig::validate() const {
    if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("transition rho must be in [0, 1]");
    if (!(smoothing >= 0.0 && smoothing <= 1.0)) throw std::invalid_argument("transition smoothing must be in [0, 1]");
}

double common_neighbor_weight(const WeightedFrameGraph& g, FrameId a, FrameId b) {
    const auto nodes = g.nodes();
    if (nodes.size() < 3) return g.weight(a, b);
    double sum = 0.0;
    for (const auto& n : nodes) {
        if (n.frame_id == a || n.frame_id == b) continue;
        sum += std::sqrt(g.weight(a, n.frame_id) * g.weight(n.frame_id, b));
    }
    return sum / static_cast<double>(nodes.size() - 2);
}

WeightedFrameGraph predict_transition(const WeightedFrameGraph& g_prev, const TransitionConfig& cfg) {
    cfg.validate();
    const auto nodes = g_prev.nodes();
    std::vector<WeightedFrameGraph::Edge> edges;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const FrameId a = nodes[i].frame_id;
            const FrameId b = nodes[j].frame_id;
            double w = g_prev.weight(a, b);
            if (cfg.smoothing > 0.0) w = (1.0 - cfg.smoothing) * w + cfg.smoothing * common_neighbor_weight(g_prev, a, b);
            w = std::clamp(cfg.rho * w, 0.0, 1.0);
            if (w > 0.0) edges.push_back({a, b, w});
        }
    return WeightedFrameGraph(std::vector<Frame>(nodes.begin(), nodes.end()), std::move(edges));
}

// ---------------------------------------------------------------------------
// Poisson benchmark

double poisson_cdf(int n, double rate) {
    if (rate < 0.0) throw std::invalid_argument("Poisson rate must be >= 0");
    if (n < 0) return 0.0;
    if (rate == 0.0) return 1.0;
    double sum = 0.0;
    for (int i = 0; i <= n; ++i) sum += std::exp(i * std::log(rate) - rate - std::lgamma(i + 1.0));
    return std::min(sum, 1.0);
}

int poisson_reserve(std::span<const int> history, double epsilon) {
    if (history.empty()) throw std::invalid_argument("poisson_reserve needs a non-empty history");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must be in (0, 1)");
    const double rate =
        std::accumulate(history.begin(), history.end(), 0.0) / static_cast<double>(history.size());
    if (rate == 0.0) return 0;
    double cdf = 0.0;
    for (int n = 0;; ++n) {
        cdf += std::exp(n * std::log(rate) - rate - std::lgamma(n + 1.0));
        if (cdf >= epsilon) return n;
    }
}

}  // namespace mudt

#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <span>
#include <string>
#include <vector>

#include "mudt/mapgraph.hpp"
#include "mudt/trace.hpp"

namespace mudt {

/// Per-frame prediction for one slot. `count` always equals the number of
/// set entries in `mask`.
struct PredictedAction {
    std::vector<double> scores;
    std::vector<bool> mask;
    int count = 0;
};

/// Thresholds scores at 0.5 (a tie counts as a key frame).
PredictedAction action_from_scores(std::vector<double> scores);

/// Marks the last `count` of `frames_per_slot` positions as key frames.
PredictedAction action_from_count(int count, int frames_per_slot);

/// Graph state of the detailed model: the map before the slot, the slot's
/// own frame graph, and slot-frame to map-node similarities
/// (`cross_weights[f][k]` for slot frame f and the k-th map node).
struct DetailedState {
    WeightedFrameGraph map_graph;
    WeightedFrameGraph slot_graph;
    std::vector<std::vector<double>> cross_weights;

    [[nodiscard]] std::size_t frame_count() const noexcept { return cross_weights.size(); }
};

DetailedState make_detailed_state(const WeightedFrameGraph& map, std::span<const Frame> slot_frames);

/// Key-frame counts of the preceding slots, oldest first, zero padded at the
/// start of a trace.
struct SimplifiedState {
    std::vector<int> counts;
    int frames_per_slot = 0;
};

/// Takes the last `window` entries of `history` (front-padded with zeros).
SimplifiedState make_simplified_state(std::span<const int> history, int window, int frames_per_slot);

struct Experience {
    std::size_t t = 0;
    DetailedState detailed;
    SimplifiedState simplified;
    std::vector<bool> truth;
};

/// Bounded chronological buffer of experience records; the oldest record is
/// evicted when full.
class ExperienceStore {
public:
    explicit ExperienceStore(std::size_t capacity = 2000);

    void push(Experience record);

    [[nodiscard]] const std::deque<Experience>& records() const noexcept { return records_; }
    [[nodiscard]] std::size_t size() const noexcept { return records_.size(); }
    [[nodiscard]] bool empty() const noexcept { return records_.empty(); }
    [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }

private:
    std::size_t capacity_;
    std::deque<Experience> records_;
};

enum class ModelKind { detailed = 0, simplified = 1, recurrent = 2 };

/// Trainable parameters plus the input standardisation they were fitted
/// with. An empty `weights` vector means "not fitted".
struct ModelParams {
    ModelKind kind = ModelKind::detailed;
    std::vector<double> weights;
    std::vector<double> feature_mean;
    std::vector<double> feature_scale;
    int window = 0;
    int hidden = 0;

    [[nodiscard]] bool fitted() const noexcept { return !weights.empty(); }
    void validate() const;

    friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Flat JSON object, every value a list of numbers.
std::string to_json(const ModelParams& params);
ModelParams model_params_from_json(const std::string& text);

struct TrainOptions {
    int epochs = 300;
    double lr = 0.05;
    std::uint64_t seed = 7;
    int hidden = 6;  ///< recurrent baseline only
};

struct FitResult {
    ModelParams params;
    double initial_loss = 0.0;
    double final_loss = 0.0;
};

inline constexpr std::size_t kDetailedFeatureCount = 7;

/// Per-frame features for the detailed scorer. `keys_so_far` marks frames
/// of this slot already classified as key frames (only entries before `f`
/// are read).
std::vector<double> detailed_features(const DetailedState& s, std::size_t f, const std::vector<bool>& keys_so_far);

/// Mean over records of the squared error between the truth mask and the
/// score vector. `warm_start` may carry earlier fitted params.
FitResult fit_detailed(const ExperienceStore& store, const TrainOptions& opts,
                       const ModelParams* warm_start = nullptr);
PredictedAction predict_detailed(const ModelParams& params, const DetailedState& s);
double detailed_loss(const ModelParams& params, const ExperienceStore& store);
std::vector<double> detailed_loss_gradient(const ModelParams& params, const ExperienceStore& store);

/// Autoregressive count model: one score shared by all F frames of the slot,
/// trained on the same squared-error loss over action vectors.
FitResult fit_simplified(const ExperienceStore& store, int window, const TrainOptions& opts,
                         const ModelParams* warm_start = nullptr);
PredictedAction predict_simplified(const ModelParams& params, const SimplifiedState& s);
/// Shared per-frame score in [0, 1]; the expected count is F times this.
double simplified_score(const ModelParams& params, const SimplifiedState& s);
double simplified_loss(const ModelParams& params, const ExperienceStore& store);
std::vector<double> simplified_loss_gradient(const ModelParams& params, const ExperienceStore& store);

/// Elman recurrent count predictor used as the recurrent benchmark. Same
/// loss and fit contract as the simplified model.
FitResult fit_recurrent(const ExperienceStore& store, int window, const TrainOptions& opts,
                        const ModelParams* warm_start = nullptr);
/// Predicted key-frame count (real valued, in [0, F]) for the next slot.
double recurrent_baseline_predict(std::span<const int> history, int frames_per_slot, const ModelParams& params);
double recurrent_loss(const ModelParams& params, const ExperienceStore& store);
std::vector<double> recurrent_loss_gradient(const ModelParams& params, const ExperienceStore& store);

struct TransitionConfig {
    double rho = 0.95;      ///< multiplicative persistence decay
    double smoothing = 0.2; ///< weight of the common-neighbour term

    void validate() const;
};

/// Common-neighbour term for pair (a, b): mean over the other nodes k of
/// sqrt(w(a,k) * w(k,b)); falls back to w(a,b) when there is no other node.
double common_neighbor_weight(const WeightedFrameGraph& g, FrameId a, FrameId b);

/// Next-slot edge weights: rho * ((1 - smoothing) * w + smoothing * common).
WeightedFrameGraph predict_transition(const WeightedFrameGraph& g_prev, const TransitionConfig& cfg = {});

double poisson_cdf(int n, double rate);

/// Smallest n whose Poisson CDF at the sample-mean rate reaches `epsilon`.
int poisson_reserve(std::span<const int> history, double epsilon);

}  // namespace mudt

#pragma once

#include <cstddef>
#include <deque>
#include <string>
#include <utility>
#include <vector>

#include "mudt/predictors.hpp"
#include "mudt/trace.hpp"

namespace mudt {

// ---------------------------------------------------------------------------
// Model switching

struct SwitchConfig {
    int delta = 4;  ///< key-count jump that selects the detailed model
    int M = 3;      ///< calm slots before falling back to the simplified model

    void validate() const;
};

/// h = 1 selects the detailed model. The default value is the state of the
/// first slot.
struct SwitchState {
    int h = 1;
    int m = 0;

    friend bool operator==(const SwitchState&, const SwitchState&) = default;
};

/// One iteration of the switching rule for the next slot, given the key
/// counts of the two preceding slots (0 where they do not exist).
SwitchState msf_step(SwitchState state, int k_prev, int k_prev2, const SwitchConfig& cfg);

// ---------------------------------------------------------------------------
// Confusion statistics

inline constexpr double kStatsFloor = 1e-3;
inline constexpr double kStatsCeil = 1.0 - 1e-3;

/// Moving-average estimates of sensitivity p = P(â=1|a=1), specificity
/// q = P(â=0|a=0) and key-frame base rate lambda = P(a=1).
struct ConfusionStats {
    double p = 0.8;
    double q = 0.8;
    double lambda = 0.2;
    double beta = 0.9;

    void validate() const;
};

/// One moving-average step from a slot's truth/prediction masks. Rates
/// undefined for the slot (no positives, or no negatives) leave the
/// corresponding estimate untouched.
ConfusionStats update_confusion(const ConfusionStats& stats, const std::vector<bool>& truth,
                                const std::vector<bool>& pred);

// ---------------------------------------------------------------------------
// User profile

struct SlotPair {
    std::size_t t = 0;
    std::vector<bool> truth;
    std::vector<bool> pred;
};

/// Demand-side data collected from the device every slot.
struct UserOrientedData {
    ExperienceStore experience{2000};
    std::deque<SlotPair> recent_pairs;
    std::size_t recent_capacity = 32;
    std::vector<int> key_count_history;
};

/// Settings of the switching and modelling functions.
struct ConfigurationOrientedData {
    SwitchState switch_state;
    SwitchConfig switching;
    int window = 5;  ///< T^w
    LabelingConfig labeling;
};

/// Derived statistics used for provisioning.
struct ManagementOrientedData {
    ConfusionStats stats;
};

struct UserProfile {
    UserOrientedData user;
    ConfigurationOrientedData configuration;
    ManagementOrientedData management;
};

/// Appends the slot's experience, evicting the oldest record at capacity,
/// and keeps the last `recent_capacity` truth/prediction pairs.
void record_experience(UserProfile& profile, std::size_t t, DetailedState s_d, SimplifiedState s_s,
                       const std::vector<bool>& truth, const PredictedAction& pred);

/// JSON object with `user_oriented`, `configuration_oriented` and
/// `management_oriented` sub-objects.
std::string profile_snapshot(const UserProfile& profile);

}  // namespace mudt

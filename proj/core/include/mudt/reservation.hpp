#pragma once

#include <vector>

#include "mudt/twin.hpp"

namespace mudt {

/// Posterior probabilities that a predicted-positive frame is a key frame
/// (`tpr`) and that a predicted-negative frame is not (`tnr`).
struct PosteriorRates {
    double tpr = 1.0;
    double tnr = 1.0;
};

/// Bayes inversion of sensitivity p, specificity q and base rate lambda.
/// All three must lie in (0, 1).
PosteriorRates posterior_rates(double p, double q, double lambda);

/// Distribution of the true key-frame count in a slot of `frames` frames
/// with `predicted_positives` predicted key frames: the sum of
/// Bin(Â, tpr) and Bin(F - Â, 1 - tnr). Entry n is P(count = n), n in [0, F].
std::vector<double> key_count_pmf(int frames, int predicted_positives, PosteriorRates rates);

/// P(true count <= n | Â). Exactly 1 for n >= F. Throws for n < 0,
/// Â outside [0, F] or rates outside [0, 1].
double eval_g(int n, int frames, int predicted_positives, PosteriorRates rates);

struct ProvisionCount {
    int n_star = 0;
    double g = 1.0;  ///< eval_g at n_star
};

/// Smallest n in [0, F] with eval_g(n) >= epsilon (linear scan; g is
/// non-decreasing in n and g(F) = 1).
ProvisionCount find_n_star(int frames, int predicted_positives, PosteriorRates rates, double epsilon);
ProvisionCount find_n_star(int frames, int predicted_positives, const ConfusionStats& stats, double epsilon);

struct RadioConfig {
    double alpha_bits = 5e6;    ///< data volume of one frame upload
    double t_r = 0.02;          ///< tolerable transmission duration, s
    double gamma_db = 15.0;     ///< predicted SNR
    double epsilon = 0.9;       ///< required reliability
    int frames_per_slot = 10;
    double slot_duration = 1.0 / 3.0;  ///< s (10 frames at 30 fps)

    void validate() const;
};

struct RBSpec {
    double rb_bandwidth_hz = 180e3;
    double rb_duration_s = 0.5e-3;

    void validate() const;
};

/// Bandwidth in Hz that uploads `n_star` frames within T^r:
/// alpha * N / (T^r * log2(1 + gamma)).
double reserve_bandwidth(int n_star, const RadioConfig& cfg);

/// ceil(b / RB bandwidth).
int quantize_rbs(double b_star_hz, const RBSpec& spec);

struct ReservationDecision {
    int n_star = 0;
    double b_star_hz = 0.0;
    int rb_count = 0;
    double g_at_n_star = 1.0;
};

ReservationDecision reserve(int predicted_positives, const ConfusionStats& stats, const RadioConfig& radio,
                            const RBSpec& rb);

}  // namespace mudt

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mudt/reservation.hpp"

namespace mudt::oracle {

/// The double sum over (k, j) exactly as printed for g, with binomial
/// coefficients from a multiplicative product.
double g_double_sum(int n, int frames, int predicted_positives, PosteriorRates rates);

/// Exact enumeration over all 2^F truth masks for a given prediction mask,
/// each weighted by the product of per-frame conditionals. F <= 20.
/// Returns P(count = k) for k in [0, F].
std::vector<double> enumerate_count_pmf(const std::vector<bool>& predicted, PosteriorRates rates);
double g_enumerate(int n, const std::vector<bool>& predicted, PosteriorRates rates);

/// Monte-Carlo estimate of g: draws per-frame truths conditioned on the
/// predicted labels and counts how often the total stays <= n.
double g_monte_carlo(int n, int frames, int predicted_positives, PosteriorRates rates, std::int64_t trials,
                     std::uint64_t seed);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

/// Enumeration, double-sum, Monte-Carlo and monotonicity checks of eval_g
/// over a parameter grid; used by `mudt verify`.
std::vector<CheckResult> run_reservation_checks(std::uint64_t seed = 2024);

}  // namespace mudt::oracle

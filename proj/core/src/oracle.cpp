#include "mudt/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>
#include <tuple>

namespace mudt::oracle {

namespace {

double choose(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
    return c;
}

// pow with 0^0 = 1, matching the convention the closed form relies on.
double ipow(double base, int e) { return e == 0 ? 1.0 : std::pow(base, e); }

}  // namespace

double g_double_sum(int n, int frames, int predicted_positives, PosteriorRates rates) {
    const int F = frames;
    const int A = predicted_positives;
    const double tpr = rates.tpr;
    const double tnr = rates.tnr;
    double total = 0.0;
    for (int k = 0; k <= std::min(n, F); ++k)
        for (int j = std::max(0, k - (F - A)); j <= std::min(A, k); ++j)
            total += choose(A, j) * ipow(tpr, j) * ipow(1.0 - tpr, A - j) * choose(F - A, k - j) *
                     ipow(1.0 - tnr, k - j) * ipow(tnr, F - A - k + j);
    return total;
}

std::vector<double> enumerate_count_pmf(const std::vector<bool>& predicted, PosteriorRates rates) {
    const std::size_t F = predicted.size();
    if (F > 20) throw std::invalid_argument("enumeration oracle limited to F <= 20");
    std::vector<double> pmf(F + 1, 0.0);
    for (std::uint32_t truth = 0; truth < (1u << F); ++truth) {
        double w = 1.0;
        for (std::size_t f = 0; f < F; ++f) {
            const bool key = (truth >> f) & 1u;
            if (predicted[f])
                w *= key ? rates.tpr : 1.0 - rates.tpr;
            else
                w *= key ? 1.0 - rates.tnr : rates.tnr;
        }
        pmf[static_cast<std::size_t>(std::popcount(truth))] += w;
    }
    return pmf;
}

double g_enumerate(int n, const std::vector<bool>& predicted, PosteriorRates rates) {
    const auto pmf = enumerate_count_pmf(predicted, rates);
    double s = 0.0;
    for (int k = 0; k <= n && k < static_cast<int>(pmf.size()); ++k) s += pmf[static_cast<std::size_t>(k)];
    return s;
}

double g_monte_carlo(int n, int frames, int predicted_positives, PosteriorRates rates, std::int64_t trials,
                     std::uint64_t seed) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution hit(rates.tpr);
    std::bernoulli_distribution miss(1.0 - rates.tnr);
    std::int64_t within = 0;
    for (std::int64_t t = 0; t < trials; ++t) {
        int count = 0;
        for (int f = 0; f < frames; ++f) count += (f < predicted_positives ? hit(rng) : miss(rng)) ? 1 : 0;
        within += count <= n ? 1 : 0;
    }
    return static_cast<double>(within) / static_cast<double>(trials);
}

std::vector<CheckResult> run_reservation_checks(std::uint64_t seed) {
    const std::vector<int> frame_grid = {2, 4, 6, 8, 12};
    const std::vector<double> level = {0.6, 0.8, 0.95};

    double worst_enum = 0.0;
    double worst_sum = 0.0;
    double worst_drop = 0.0;
    int cases = 0;
    for (int F : frame_grid)
        for (int A = 0; A <= F; ++A)
            for (double p : level)
                for (double q : level)
                    for (double lam : level) {
                        const auto rates = posterior_rates(p, q, lam);
                        std::vector<bool> pred(static_cast<std::size_t>(F), false);
                        std::fill(pred.begin(), pred.begin() + A, true);
                        const auto pmf = enumerate_count_pmf(pred, rates);
                        double cdf = 0.0;
                        double prev = -1.0;
                        for (int n = 0; n <= F; ++n) {
                            cdf += pmf[static_cast<std::size_t>(n)];
                            const double g = eval_g(n, F, A, rates);
                            worst_enum = std::max(worst_enum, std::fabs(g - cdf));
                            worst_sum = std::max(worst_sum, std::fabs(g - g_double_sum(n, F, A, rates)));
                            if (prev >= 0.0) worst_drop = std::max(worst_drop, prev - g);
                            prev = g;
                            ++cases;
                        }
                    }

    std::vector<CheckResult> out;
    auto fmt = [](double v) {
        std::ostringstream s;
        s.precision(3);
        s << std::scientific << v;
        return s.str();
    };
    out.push_back({"eval_g vs 2^F enumeration", worst_enum <= 1e-12,
                   std::to_string(cases) + " points, max |diff| " + fmt(worst_enum)});
    out.push_back({"eval_g vs literal double sum", worst_sum <= 1e-12,
                   std::to_string(cases) + " points, max |diff| " + fmt(worst_sum)});
    out.push_back({"g non-decreasing in N", worst_drop <= 1e-12, "max decrease " + fmt(std::max(worst_drop, 0.0))});

    // Monte-Carlo within three standard errors, including F beyond the enumeration limit.
    const std::int64_t trials = 100000;
    bool mc_ok = true;
    double worst_z = 0.0;
    const std::vector<std::tuple<int, int, int, PosteriorRates>> mc_cases = {
        {6, 2, 2, posterior_rates(0.9, 0.8, 0.5)},
        {10, 3, 4, posterior_rates(0.8, 0.95, 0.2)},
        {32, 8, 10, posterior_rates(0.95, 0.9, 0.3)},
        {64, 20, 24, posterior_rates(0.85, 0.9, 0.35)},
    };
    std::uint64_t s = seed;
    for (const auto& [F, A, n, rates] : mc_cases) {
        const double g = eval_g(n, F, A, rates);
        const double est = g_monte_carlo(n, F, A, rates, trials, s++);
        const double se = std::sqrt(std::max(g * (1.0 - g), 1e-12) / static_cast<double>(trials));
        const double z = std::fabs(est - g) / se;
        worst_z = std::max(worst_z, z);
        mc_ok = mc_ok && z <= 3.0;
    }
    out.push_back({"eval_g vs Monte Carlo (1e5 trials)", mc_ok, "max |z| " + fmt(worst_z)});
    return out;
}

}  // namespace mudt::oracle

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace mudt::detail {

struct MinimizeResult {
    double initial_loss;
    double best_loss;
};

/// Full-batch Adam. `objective(w, grad)` returns the loss at `w` and writes
/// its gradient. On return `w` holds the lowest-loss iterate visited, so the
/// reported loss never exceeds the starting loss.
template <class Objective>
MinimizeResult adam_minimize(std::vector<double>& w, Objective&& objective, int epochs, double lr) {
    constexpr double beta1 = 0.9;
    constexpr double beta2 = 0.999;
    constexpr double eps = 1e-8;

    std::vector<double> grad(w.size(), 0.0);
    std::vector<double> m(w.size(), 0.0);
    std::vector<double> v(w.size(), 0.0);

    double loss = objective(w, grad);
    MinimizeResult result{loss, loss};
    std::vector<double> best = w;

    double b1t = 1.0;
    double b2t = 1.0;
    for (int epoch = 0; epoch < epochs; ++epoch) {
        b1t *= beta1;
        b2t *= beta2;
        for (std::size_t i = 0; i < w.size(); ++i) {
            m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
            v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
            const double m_hat = m[i] / (1.0 - b1t);
            const double v_hat = v[i] / (1.0 - b2t);
            w[i] -= lr * m_hat / (std::sqrt(v_hat) + eps);
        }
        loss = objective(w, grad);
        if (loss < result.best_loss) {
            result.best_loss = loss;
            best = w;
        }
    }
    w = std::move(best);
    return result;
}

inline std::vector<double> random_init(std::size_t n, std::uint64_t seed, double scale) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist(0.0, scale);
    std::vector<double> w(n);
    for (auto& x : w) x = dist(rng);
    return w;
}

inline double sigmoid(double u) {
    if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
    const double e = std::exp(u);
    return e / (1.0 + e);
}

}  // namespace mudt::detail

#include "mudt/reservation.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mudt {

PosteriorRates posterior_rates(double p, double q, double lambda) {
    auto open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!open_unit(p) || !open_unit(q) || !open_unit(lambda))
        throw std::invalid_argument("posterior_rates: p, q, lambda must lie in (0, 1)");
    const double tp = p * lambda;
    const double fp = (1.0 - q) * (1.0 - lambda);
    const double tn = q * (1.0 - lambda);
    const double fn = (1.0 - p) * lambda;
    return {tp / (tp + fp), tn / (tn + fn)};
}

namespace {

// Binomial PMF evaluated in log space; exact 0/1 handling at the edges.
std::vector<double> binomial_pmf(int n, double prob) {
    std::vector<double> pmf(static_cast<std::size_t>(n) + 1, 0.0);
    if (prob <= 0.0) {
        pmf.front() = 1.0;
        return pmf;
    }
    if (prob >= 1.0) {
        pmf.back() = 1.0;
        return pmf;
    }
    const double lp = std::log(prob);
    const double lq = std::log1p(-prob);
    const double lfn = std::lgamma(n + 1.0);
    for (int k = 0; k <= n; ++k)
        pmf[static_cast<std::size_t>(k)] =
            std::exp(lfn - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0) + k * lp + (n - k) * lq);
    return pmf;
}

void check_g_args(int frames, int predicted_positives, PosteriorRates rates) {
    if (frames < 0) throw std::invalid_argument("frame count must be >= 0");
    if (predicted_positives < 0 || predicted_positives > frames)
        throw std::invalid_argument("predicted positives must lie in [0, F]");
    auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
    if (!unit(rates.tpr) || !unit(rates.tnr)) throw std::invalid_argument("posterior rates must lie in [0, 1]");
}

}  // namespace

std::vector<double> key_count_pmf(int frames, int predicted_positives, PosteriorRates rates) {
    check_g_args(frames, predicted_positives, rates);
    const auto hits = binomial_pmf(predicted_positives, rates.tpr);
    const auto misses = binomial_pmf(frames - predicted_positives, 1.0 - rates.tnr);
    std::vector<double> pmf(static_cast<std::size_t>(frames) + 1, 0.0);
    for (std::size_t i = 0; i < hits.size(); ++i)
        for (std::size_t j = 0; j < misses.size(); ++j) pmf[i + j] += hits[i] * misses[j];
    return pmf;
}

double eval_g(int n, int frames, int predicted_positives, PosteriorRates rates) {
    check_g_args(frames, predicted_positives, rates);
    if (n < 0) throw std::invalid_argument("eval_g: N must be >= 0");
    if (n >= frames) return 1.0;
    const auto pmf = key_count_pmf(frames, predicted_positives, rates);
    double cdf = 0.0;
    for (int k = 0; k <= n; ++k) cdf += pmf[static_cast<std::size_t>(k)];
    return std::min(cdf, 1.0);
}

ProvisionCount find_n_star(int frames, int predicted_positives, PosteriorRates rates, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("epsilon must lie in (0, 1)");
    const auto pmf = key_count_pmf(frames, predicted_positives, rates);
    double cdf = 0.0;
    for (int n = 0; n < frames; ++n) {
        cdf += pmf[static_cast<std::size_t>(n)];
        if (cdf >= epsilon) return {n, std::min(cdf, 1.0)};
    }
    return {frames, 1.0};
}

ProvisionCount find_n_star(int frames, int predicted_positives, const ConfusionStats& stats, double epsilon) {
    return find_n_star(frames, predicted_positives, posterior_rates(stats.p, stats.q, stats.lambda), epsilon);
}

void RadioConfig::validate() const {
    if (!(alpha_bits > 0.0)) throw std::invalid_argument("radio.alpha must be > 0");
    if (!(t_r > 0.0)) throw std::invalid_argument("radio.t_r must be > 0");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("radio.epsilon must lie in (0, 1)");
    if (frames_per_slot < 1) throw std::invalid_argument("radio.frames_per_slot must be >= 1");
    if (!(t_r <= slot_duration)) throw std::invalid_argument("radio.t_r must not exceed radio.slot_duration");
    if (!std::isfinite(gamma_db)) throw std::invalid_argument("radio.gamma_db must be finite");
}

void RBSpec::validate() const {
    if (!(rb_bandwidth_hz > 0.0) || !(rb_duration_s > 0.0)) throw std::invalid_argument("RB dimensions must be > 0");
}

double reserve_bandwidth(int n_star, const RadioConfig& cfg) {
    if (n_star < 0) throw std::invalid_argument("n_star must be >= 0");
    if (n_star == 0) return 0.0;
    const double snr = std::pow(10.0, cfg.gamma_db / 10.0);
    return cfg.alpha_bits * n_star / (cfg.t_r * std::log2(1.0 + snr));
}

int quantize_rbs(double b_star_hz, const RBSpec& spec) {
    if (!(b_star_hz >= 0.0)) throw std::invalid_argument("bandwidth must be >= 0");
    return static_cast<int>(std::ceil(b_star_hz / spec.rb_bandwidth_hz));
}

ReservationDecision reserve(int predicted_positives, const ConfusionStats& stats, const RadioConfig& radio,
                            const RBSpec& rb) {
    const auto n = find_n_star(radio.frames_per_slot, predicted_positives, stats, radio.epsilon);
    ReservationDecision d;
    d.n_star = n.n_star;
    d.g_at_n_star = n.g;
    d.b_star_hz = reserve_bandwidth(n.n_star, radio);
    d.rb_count = quantize_rbs(d.b_star_hz, rb);
    return d;
}

}  // namespace mudt

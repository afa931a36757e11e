#include "mudt/twin.hpp"

#include <algorithm>
#include <stdexcept>

#include <json.hpp>

#include "mudt/reservation.hpp"

namespace mudt {

void SwitchConfig::validate() const {
    if (delta < 0) throw std::invalid_argument("twin.delta must be >= 0");
    if (M < 1) throw std::invalid_argument("twin.M must be >= 1");
}

SwitchState msf_step(SwitchState state, int k_prev, int k_prev2, const SwitchConfig& cfg) {
    cfg.validate();
    const int change = k_prev - k_prev2;
    if (change > cfg.delta) return {1, 0};
    ++state.m;
    if (state.m >= cfg.M) {
        state.h = 0;
        state.m = 0;
    }
    return state;
}

void ConfusionStats::validate() const {
    auto in_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_unit(p) || !in_unit(q) || !in_unit(lambda)) throw std::invalid_argument("p, q, lambda must lie in (0, 1)");
    if (!in_unit(beta)) throw std::invalid_argument("moving-average beta must lie in (0, 1)");
}

ConfusionStats update_confusion(const ConfusionStats& stats, const std::vector<bool>& truth,
                                const std::vector<bool>& pred) {
    if (truth.size() != pred.size()) throw std::invalid_argument("truth and prediction masks differ in length");
    if (truth.empty()) throw std::invalid_argument("empty slot masks");

    int tp = 0, fn = 0, tn = 0, fp = 0;
    for (std::size_t f = 0; f < truth.size(); ++f) {
        if (truth[f])
            (pred[f] ? tp : fn)++;
        else
            (pred[f] ? fp : tn)++;
    }

    auto blend = [&](double v, double observed) {
        return std::clamp(stats.beta * v + (1.0 - stats.beta) * observed, kStatsFloor, kStatsCeil);
    };
    ConfusionStats out = stats;
    if (tp + fn > 0) out.p = blend(stats.p, static_cast<double>(tp) / (tp + fn));
    if (tn + fp > 0) out.q = blend(stats.q, static_cast<double>(tn) / (tn + fp));
    out.lambda = blend(stats.lambda, static_cast<double>(tp + fn) / static_cast<double>(truth.size()));
    return out;
}

void record_experience(UserProfile& profile, std::size_t t, DetailedState s_d, SimplifiedState s_s,
                       const std::vector<bool>& truth, const PredictedAction& pred) {
    auto& user = profile.user;
    user.experience.push(Experience{t, std::move(s_d), std::move(s_s), truth});
    user.recent_pairs.push_back(SlotPair{t, truth, pred.mask});
    while (user.recent_pairs.size() > user.recent_capacity) user.recent_pairs.pop_front();
    user.key_count_history.push_back(static_cast<int>(std::count(truth.begin(), truth.end(), true)));
}

std::string profile_snapshot(const UserProfile& profile) {
    using nlohmann::json;
    const auto& u = profile.user;
    const auto& c = profile.configuration;
    const auto& s = profile.management.stats;

    json pairs = json::array();
    for (const auto& p : u.recent_pairs) pairs.push_back({{"t", p.t}, {"truth", p.truth}, {"pred", p.pred}});

    const std::size_t tail = std::min<std::size_t>(u.key_count_history.size(), 50);
    std::vector<int> history_tail(u.key_count_history.end() - static_cast<std::ptrdiff_t>(tail),
                                  u.key_count_history.end());

    json j;
    j["user_oriented"] = {
        {"experience_records", u.experience.size()},
        {"experience_capacity", u.experience.capacity()},
        {"oldest_record_t", u.experience.empty() ? json(nullptr) : json(u.experience.records().front().t)},
        {"newest_record_t", u.experience.empty() ? json(nullptr) : json(u.experience.records().back().t)},
        {"recent_pairs", pairs},
        {"slots_observed", u.key_count_history.size()},
        {"key_count_tail", history_tail},
    };
    j["configuration_oriented"] = {
        {"h", c.switch_state.h},
        {"m", c.switch_state.m},
        {"delta", c.switching.delta},
        {"M", c.switching.M},
        {"T_w", c.window},
        {"labeling", {{"theta_new", c.labeling.theta_new},
                      {"theta_overlap", c.labeling.theta_overlap},
                      {"key_window", c.labeling.key_window}}},
    };
    const auto rates = posterior_rates(s.p, s.q, s.lambda);
    j["management_oriented"] = {
        {"p", s.p},
        {"q", s.q},
        {"lambda", s.lambda},
        {"beta", s.beta},
        {"p_tpr", rates.tpr},
        {"p_tnr", rates.tnr},
    };
    return j.dump(2);
}

}  // namespace mudt

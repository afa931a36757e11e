#include <doctest.h>

#include <cmath>
#include <random>

#include "mudt/predictors.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"
#include "support/stores.hpp"

using namespace mudt;
using fixtures::span_frame;
using stores::count_store;
using stores::trace_store;

namespace {

// Map of three disjoint 20-point frames; slot frames are 20-point windows at
// random offsets, so their best map overlap ranges over [0, 1].
Experience separable_record(std::mt19937_64& rng, std::size_t t, FrameId first_id) {
    static const auto map = build_graph(
        std::vector<Frame>{span_frame(-3, 0, 20), span_frame(-2, 40, 60), span_frame(-1, 80, 100)});
    std::uniform_int_distribution<int> start(0, 100);
    std::vector<Frame> frames;
    for (int f = 0; f < 10; ++f) {
        const auto s = static_cast<FeatureId>(start(rng));
        frames.push_back(span_frame(first_id + f, s, s + 20));
    }
    Experience e{t, make_detailed_state(map, frames), {}, {}};
    for (const auto& row : e.detailed.cross_weights) e.truth.push_back(*std::max_element(row.begin(), row.end()) < 0.6);
    return e;
}

ExperienceStore separable_store(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ExperienceStore store(n);
    for (std::size_t t = 0; t < n; ++t) store.push(separable_record(rng, t, static_cast<FrameId>(t * 10)));
    return store;
}

ExperienceStore slice(const ExperienceStore& store, std::size_t from, std::size_t to) {
    ExperienceStore out(to - from);
    for (std::size_t i = from; i < to; ++i) out.push(store.records()[i]);
    return out;
}

void randomize(ModelParams& p, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    for (auto& w : p.weights) w = n(rng);
}

}  // namespace

TEST_CASE("actions") {
    const auto a = action_from_scores({0.2, 0.5, 0.7, 0.49});
    CHECK(a.mask == std::vector<bool>{false, true, true, false});
    CHECK(a.count == 2);
    CHECK(action_from_scores({0.1, 0.3}).count == 0);

    const auto c = action_from_count(3, 5);
    CHECK(c.mask == std::vector<bool>{false, false, true, true, true});
    CHECK(c.count == 3);
    CHECK(action_from_count(9, 4).count == 4);
    CHECK_THROWS_AS(action_from_count(1, 0), std::invalid_argument);
}

TEST_CASE("states") {
    const std::vector<int> history{4, 1, 7};
    const auto s = make_simplified_state(history, 5, 10);
    CHECK(s.counts == std::vector<int>{0, 0, 4, 1, 7});
    CHECK(make_simplified_state(history, 2, 10).counts == std::vector<int>{1, 7});

    const auto map = build_graph(std::vector<Frame>{span_frame(0, 0, 10)});
    const std::vector<Frame> frames{span_frame(5, 0, 10), span_frame(6, 5, 15)};
    const auto d = make_detailed_state(map, frames);
    CHECK(d.frame_count() == 2);
    CHECK(d.slot_graph.size() == 2);
    CHECK(d.cross_weights[0][0] == 1.0);
    CHECK(d.cross_weights[1][0] == doctest::Approx(5.0 / 15.0));
}

TEST_CASE("detailed model fits a separable store") {
    const auto store = separable_store(200, 3);
    const auto fit = fit_detailed(store, TrainOptions{});
    CHECK(fit.final_loss < 0.5 * fit.initial_loss);
    CHECK(detailed_loss(fit.params, store) == doctest::Approx(fit.final_loss));

    long long right = 0, total = 0;
    for (const auto& rec : store.records()) {
        const auto a = predict_detailed(fit.params, rec.detailed);
        CHECK(a.count == std::count(a.mask.begin(), a.mask.end(), true));
        for (double s : a.scores) CHECK((s >= 0.0 && s <= 1.0));
        for (std::size_t f = 0; f < a.mask.size(); ++f) right += a.mask[f] == rec.truth[f] ? 1 : 0;
        total += static_cast<long long>(a.mask.size());
    }
    MESSAGE("separable store: loss " << fit.final_loss << ", accuracy " << static_cast<double>(right) / total);
    CHECK(static_cast<double>(right) / total > 0.97);

    TrainOptions longer;
    longer.epochs = 3000;
    CHECK(fit_detailed(store, longer).final_loss < fit.final_loss / 2);
}

TEST_CASE("detailed model memorizes one record") {
    const auto store = separable_store(1, 8);
    TrainOptions opts;
    opts.epochs = 2000;
    const auto fit = fit_detailed(store, opts);
    CHECK(fit.final_loss < 1e-3);
    CHECK(predict_detailed(fit.params, store.records().front().detailed).mask == store.records().front().truth);
}

TEST_CASE("detailed model with all-negative labels predicts nothing") {
    auto base = separable_store(50, 5);
    ExperienceStore store(50);
    for (auto rec : base.records()) {
        rec.truth.assign(rec.truth.size(), false);
        store.push(rec);
    }
    const auto fit = fit_detailed(store, TrainOptions{});
    for (const auto& rec : store.records()) {
        const auto a = predict_detailed(fit.params, rec.detailed);
        for (double s : a.scores) CHECK(s <= 0.5);
        CHECK(a.count == 0);
    }
}

TEST_CASE("detailed model generalizes on a bursty trace") {
    GeneratorConfig g;
    g.slot_count = 600;
    g.seed = 13;
    const auto labeled = label_key_frames(generate_trace(g), {0.6, 0.1, 32}, g.frames_per_slot);
    const auto store = trace_store(labeled, g.frames_per_slot, 5);
    const auto train = slice(store, 0, 400);
    const auto test = slice(store, 400, 600);
    const auto fit = fit_detailed(train, TrainOptions{});

    long long right = 0, total = 0, tp = 0, pos = 0;
    for (const auto& rec : test.records()) {
        const auto a = predict_detailed(fit.params, rec.detailed);
        for (std::size_t f = 0; f < rec.truth.size(); ++f) {
            right += a.mask[f] == rec.truth[f] ? 1 : 0;
            ++total;
            if (rec.truth[f]) {
                ++pos;
                tp += a.mask[f] ? 1 : 0;
            }
        }
    }
    REQUIRE(pos > 0);
    CHECK(static_cast<double>(right) / total > 0.8);
    CHECK(static_cast<double>(tp) / pos > 0.8);
}

TEST_CASE("unfitted or mismatched params are rejected") {
    const auto store = separable_store(3, 1);
    CHECK_THROWS_AS(predict_detailed(ModelParams{}, store.records().front().detailed), std::invalid_argument);
    CHECK_THROWS_AS(fit_detailed(ExperienceStore(3), TrainOptions{}), std::invalid_argument);
    const auto simp = fit_simplified(count_store({1, 2, 3}, 2), 2, TrainOptions{}).params;
    CHECK_THROWS_AS(predict_detailed(simp, store.records().front().detailed), std::invalid_argument);
}

TEST_CASE("simplified model") {
    SUBCASE("constant counts") {
        const auto store = count_store(std::vector<int>(60, 3), 5);
        const auto fit = fit_simplified(store, 5, TrainOptions{});
        CHECK(fit.final_loss <= fit.initial_loss);
        const auto a = predict_simplified(fit.params, SimplifiedState{{3, 3, 3, 3, 3}, 10});
        CHECK(a.count == 3);
        CHECK(a.mask == action_from_count(3, 10).mask);
    }
    SUBCASE("period two") {
        std::vector<int> counts;
        for (int i = 0; i < 120; ++i) counts.push_back(i % 2 ? 5 : 2);
        const auto store = count_store(counts, 5);
        const auto fit = fit_simplified(slice(store, 0, 80), 5, TrainOptions{});
        for (std::size_t i = 80; i < 120; ++i) {
            const auto& rec = store.records()[i];
            const double predicted = 10 * simplified_score(fit.params, rec.simplified);
            CHECK(std::fabs(predicted - counts[i]) <= 0.5);
        }
    }
    SUBCASE("single record") {
        TrainOptions opts;
        opts.epochs = 2000;
        const auto fit = fit_simplified(count_store({4}, 3), 3, opts);
        CHECK(fit.final_loss == doctest::Approx(4 * 0.6 * 0.6 + 6 * 0.4 * 0.4).epsilon(1e-3));
    }
}

TEST_CASE("recurrent baseline") {
    SUBCASE("constant counts") {
        const auto store = count_store(std::vector<int>(60, 3), 5);
        const auto fit = fit_recurrent(store, 5, TrainOptions{});
        CHECK(fit.final_loss <= fit.initial_loss);
        const std::vector<int> history(10, 3);
        CHECK(std::lround(recurrent_baseline_predict(history, 10, fit.params)) == 3);
    }
    SUBCASE("period two") {
        std::vector<int> counts;
        for (int i = 0; i < 120; ++i) counts.push_back(i % 2 ? 5 : 2);
        const auto store = count_store(counts, 5);
        TrainOptions opts;
        opts.epochs = 600;
        const auto fit = fit_recurrent(slice(store, 0, 80), 5, opts);
        for (std::size_t i = 80; i < 120; ++i) {
            const std::vector<int> history(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(i));
            CHECK(std::fabs(recurrent_baseline_predict(history, 10, fit.params) - counts[i]) <= 0.5);
        }
    }
    SUBCASE("single record") {
        TrainOptions opts;
        opts.epochs = 2000;
        const auto fit = fit_recurrent(count_store({4}, 3), 3, opts);
        CHECK(fit.final_loss == doctest::Approx(4 * 0.6 * 0.6 + 6 * 0.4 * 0.4).epsilon(1e-3));
    }
}

TEST_CASE("loss gradients match finite differences") {
    std::mt19937_64 rng(77);
    const auto dstore = separable_store(20, 2);
    auto dp = fit_detailed(dstore, TrainOptions{1, 0.05, 7, 6}).params;
    std::vector<int> counts;
    std::uniform_int_distribution<int> c(0, 10);
    for (int i = 0; i < 40; ++i) counts.push_back(c(rng));
    const auto cstore = count_store(counts, 4);
    auto sp = fit_simplified(cstore, 4, TrainOptions{1, 0.05, 7, 6}).params;
    auto rp = fit_recurrent(cstore, 4, TrainOptions{1, 0.05, 7, 4}).params;

    for (int draw = 0; draw < 10; ++draw) {
        randomize(dp, rng);
        randomize(sp, rng);
        randomize(rp, rng);
        auto dl = [&](const std::vector<double>& w) {
            auto p = dp;
            p.weights = w;
            return detailed_loss(p, dstore);
        };
        auto sl = [&](const std::vector<double>& w) {
            auto p = sp;
            p.weights = w;
            return simplified_loss(p, cstore);
        };
        auto rl = [&](const std::vector<double>& w) {
            auto p = rp;
            p.weights = w;
            return recurrent_loss(p, cstore);
        };
        CHECK(oracles::relative_error(detailed_loss_gradient(dp, dstore), oracles::numeric_gradient(dl, dp.weights)) <= 1e-4);
        CHECK(oracles::relative_error(simplified_loss_gradient(sp, cstore), oracles::numeric_gradient(sl, sp.weights)) <=
              1e-4);
        CHECK(oracles::relative_error(recurrent_loss_gradient(rp, cstore), oracles::numeric_gradient(rl, rp.weights)) <=
              1e-4);
    }
}

TEST_CASE("model parameters round-trip through JSON") {
    const auto fit = fit_detailed(separable_store(10, 4), TrainOptions{5, 0.05, 7, 6});
    CHECK(model_params_from_json(to_json(fit.params)) == fit.params);
    const auto r = fit_recurrent(count_store({1, 2, 3, 4}, 2), 2, TrainOptions{5, 0.05, 7, 3}).params;
    CHECK(model_params_from_json(to_json(r)) == r);
    CHECK_THROWS_AS(model_params_from_json("{\"kind\": [0]}"), std::invalid_argument);
    CHECK_THROWS_AS(model_params_from_json("{\"kind\": [7], \"weights\": [], \"feature_mean\": [], "
                                           "\"feature_scale\": [], \"window\": [0], \"hidden\": [0]}"),
                    std::invalid_argument);
}

TEST_CASE("transition predictor") {
    std::mt19937_64 rng(12);
    std::vector<Frame> frames;
    for (int i = 0; i < 6; ++i) {
        const auto s = static_cast<FeatureId>(rng() % 30);
        frames.push_back(span_frame(i, s, s + 15));
    }
    const auto g = build_graph(frames);

    CHECK(predict_transition(g, {1.0, 0.0}) == g);
    const auto zero = predict_transition(g, {0.0, 0.2});
    CHECK(zero.edges().empty());
    CHECK(zero.size() == g.size());

    const double rho = 0.9, lambda = 0.2;
    const auto next = predict_transition(g, {rho, lambda});
    for (std::size_t i = 0; i < frames.size(); ++i)
        for (std::size_t j = i + 1; j < frames.size(); ++j) {
            const FrameId a = frames[i].frame_id, b = frames[j].frame_id;
            double common = 0.0;
            for (std::size_t k = 0; k < frames.size(); ++k) {
                if (k == i || k == j) continue;
                common += std::sqrt(g.weight(a, frames[k].frame_id) * g.weight(frames[k].frame_id, b));
            }
            common /= static_cast<double>(frames.size() - 2);
            const double expected = rho * ((1 - lambda) * g.weight(a, b) + lambda * common);
            CHECK(next.weight(a, b) == doctest::Approx(expected).epsilon(1e-12));
        }
    CHECK_THROWS_AS(predict_transition(g, {1.5, 0.0}), std::invalid_argument);
}

TEST_CASE("poisson baseline") {
    const std::vector<int> zeros(20, 0);
    CHECK(poisson_reserve(zeros, 0.9) == 0);
    const std::vector<int> twos{1, 3, 2, 2};
    CHECK(poisson_reserve(twos, 0.9) == 4);
    CHECK(poisson_reserve(twos, 0.999) >= 7);
    CHECK(oracles::poisson_cdf(3, 2.0) == doctest::Approx(0.857).epsilon(1e-3));
    CHECK(oracles::poisson_cdf(4, 2.0) == doctest::Approx(0.947).epsilon(1e-3));
    for (int n = 0; n < 12; ++n) CHECK(poisson_cdf(n, 2.7) == doctest::Approx(oracles::poisson_cdf(n, 2.7)).epsilon(1e-12));

    for (double rate : {0.3, 1.7, 4.2})
        for (double eps : {0.5, 0.9, 0.99}) {
            const std::vector<int> h{static_cast<int>(std::round(rate * 10))};
            const double lam = h[0];
            int brute = 0;
            while (oracles::poisson_cdf(brute, lam) < eps) ++brute;
            CHECK(poisson_reserve(h, eps) == brute);
        }
    CHECK_THROWS_AS(poisson_reserve(std::vector<int>{}, 0.9), std::invalid_argument);
    CHECK_THROWS_AS(poisson_reserve(twos, 1.0), std::invalid_argument);
}

#include <doctest.h>

#include <cmath>

#include "mudt/oracle.hpp"
#include "mudt/reservation.hpp"
#include "support/oracles.hpp"

using namespace mudt;

TEST_CASE("posterior rates") {
    const auto r = posterior_rates(0.9, 0.8, 0.5);
    CHECK(std::fabs(r.tpr - 9.0 / 11.0) < 1e-12);
    CHECK(std::fabs(r.tnr - 8.0 / 9.0) < 1e-12);

    const auto near = posterior_rates(1 - 1e-3, 1 - 1e-3, 0.5);
    CHECK(near.tpr == doctest::Approx(0.999).epsilon(1e-9));
    CHECK(near.tnr == doctest::Approx(0.999).epsilon(1e-9));

    // rare class: precision collapses
    CHECK(posterior_rates(0.8, 0.8, 1e-3).tpr == doctest::Approx(0.0040).epsilon(0.01));

    for (double p : {0.3, 0.6, 0.95})
        for (double q : {0.2, 0.7, 0.99})
            for (double l : {0.05, 0.5, 0.9}) {
                const auto x = posterior_rates(p, q, l);
                CHECK(x.tpr == doctest::Approx(oracles::posterior_tpr(p, q, l)).epsilon(1e-14));
                CHECK(x.tnr == doctest::Approx(oracles::posterior_tnr(p, q, l)).epsilon(1e-14));
            }

    CHECK_THROWS_AS(posterior_rates(0.0, 0.5, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(posterior_rates(0.5, 1.0, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(posterior_rates(0.5, 0.5, 1.2), std::invalid_argument);
}

TEST_CASE("eval_g against brute force and the double sum") {
    double worst = 0.0;
    for (int F : {1, 2, 3, 5, 7, 10})
        for (int A = 0; A <= F; ++A)
            for (double tpr : {0.0, 0.3, 0.75, 1.0})
                for (double tnr : {0.0, 0.5, 0.9, 1.0}) {
                    const PosteriorRates r{tpr, tnr};
                    for (int n = 0; n <= F; ++n) {
                        const double g = eval_g(n, F, A, r);
                        worst = std::max(worst, std::fabs(g - oracles::g_bruteforce(n, F, A, tpr, tnr)));
                        worst = std::max(worst, std::fabs(g - oracles::g_double_sum(n, F, A, tpr, tnr)));
                    }
                }
    CHECK(worst < 1e-12);
}

TEST_CASE("eval_g limits and spot values") {
    SUBCASE("deterministic predictor is a step at A") {
        for (int n = 0; n <= 6; ++n) CHECK(eval_g(n, 6, 3, {1.0, 1.0}) == (n >= 3 ? 1.0 : 0.0));
    }
    SUBCASE("all predicted positive is a binomial cdf") {
        const double t = 0.7;
        double cdf = 0.0;
        for (int n = 0; n <= 8; ++n) {
            cdf += oracles::choose(8, n) * std::pow(t, n) * std::pow(1 - t, 8 - n);
            CHECK(eval_g(n, 8, 8, {t, 0.4}) == doctest::Approx(cdf).epsilon(1e-12));
        }
    }
    SUBCASE("F=4, A=2, (0.9, 0.8, 0.5)") {
        const auto r = posterior_rates(0.9, 0.8, 0.5);
        const double tp = 9.0 / 11.0, fp = 1.0 / 9.0;
        // 1 - P(K=3) - P(K=4), convolution by hand
        const double p4 = tp * tp * fp * fp;
        const double p3 = 2 * tp * (1 - tp) * fp * fp + tp * tp * 2 * fp * (1 - fp);
        CHECK(eval_g(2, 4, 2, r) == doctest::Approx(1 - p3 - p4).epsilon(1e-12));
        CHECK(eval_g(2, 4, 2, r) == doctest::Approx(0.8558).epsilon(1e-4));
        CHECK(eval_g(1, 4, 2, r) < 0.8);
    }
    CHECK(eval_g(10, 4, 2, {0.5, 0.5}) == 1.0);
    CHECK_THROWS_AS(eval_g(-1, 4, 2, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(eval_g(1, 4, 5, {0.5, 0.5}), std::invalid_argument);
    CHECK_THROWS_AS(eval_g(1, 4, 2, {1.5, 0.5}), std::invalid_argument);
}

TEST_CASE("pmf sums to one and g is non-decreasing") {
    for (int F : {4, 12, 40})
        for (int A = 0; A <= F; A += 3) {
            const PosteriorRates r{0.83, 0.91};
            const auto pmf = key_count_pmf(F, A, r);
            double s = 0.0;
            for (double v : pmf) s += v;
            CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
            for (int n = 0; n < F; ++n) CHECK(eval_g(n + 1, F, A, r) >= eval_g(n, F, A, r) - 1e-12);
        }
}

TEST_CASE("library oracles agree with the test oracles") {
    const PosteriorRates r{0.7, 0.85};
    for (int n = 0; n <= 6; ++n) {
        const std::vector<bool> pred{true, true, false, false, false, false};
        CHECK(oracle::g_enumerate(n, pred, r) == doctest::Approx(oracles::g_bruteforce(n, 6, 2, 0.7, 0.85)).epsilon(1e-13));
        CHECK(oracle::g_double_sum(n, 6, 2, r) == doctest::Approx(oracles::g_double_sum(n, 6, 2, 0.7, 0.85)).epsilon(1e-13));
    }
}

TEST_CASE("Monte Carlo agrees within three standard errors") {
    const int trials = 100000;
    for (int A : {0, 3, 6})
        for (int n : {1, 3, 5}) {
            const PosteriorRates r{0.8, 0.9};
            const double g = eval_g(n, 6, A, r);
            const double mc = oracle::g_monte_carlo(n, 6, A, r, trials, 99 + A * 7 + n);
            const double se = std::sqrt(std::max(g * (1 - g), 1e-12) / trials);
            CHECK(std::fabs(mc - g) <= 3 * se + 1e-12);
        }
    const double one = 1 - 1e-9;
    CHECK(oracle::g_monte_carlo(3, 6, 3, {one, one}, 10000, 1) == doctest::Approx(1.0));
}

TEST_CASE("find_n_star") {
    const ConfusionStats sharp{1 - 1e-3, 1 - 1e-3, 0.5, 0.9};
    CHECK(find_n_star(10, 3, sharp, 0.9).n_star == 3);
    CHECK(find_n_star(10, 3, ConfusionStats{0.8, 0.8, 0.3, 0.9}, 1 - 1e-9).n_star == 10);

    const ConfusionStats mid{0.9, 0.8, 0.5, 0.9};
    const auto n = find_n_star(4, 2, mid, 0.8);
    CHECK(n.n_star == 2);
    CHECK(n.g == doctest::Approx(0.8558).epsilon(1e-4));

    // brute search agreement
    for (int A = 0; A <= 8; ++A)
        for (double eps : {0.5, 0.9, 0.99}) {
            const auto r = posterior_rates(0.85, 0.9, 0.3);
            int brute = 0;
            while (oracles::g_bruteforce(brute, 8, A, r.tpr, r.tnr) < eps) ++brute;
            CHECK(find_n_star(8, A, r, eps).n_star == brute);
        }
    CHECK_THROWS_AS(find_n_star(4, 2, mid, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(find_n_star(4, 2, mid, 1.0), std::invalid_argument);
}

TEST_CASE("bandwidth and resource blocks") {
    const RadioConfig radio;
    const RBSpec rb;
    CHECK(reserve_bandwidth(0, radio) == 0.0);
    const double b3 = 1.5e7 / (0.02 * std::log2(1 + std::pow(10.0, 1.5)));
    CHECK(reserve_bandwidth(3, radio) == doctest::Approx(b3).epsilon(1e-12));
    CHECK(reserve_bandwidth(3, radio) == doctest::Approx(1.4917e8).epsilon(1e-4));
    CHECK(reserve_bandwidth(6, radio) == 2 * reserve_bandwidth(3, radio));

    CHECK(quantize_rbs(0.0, rb) == 0);
    CHECK(quantize_rbs(180e3, rb) == 1);
    CHECK(quantize_rbs(180.001e3, rb) == 2);
    CHECK(quantize_rbs(reserve_bandwidth(3, radio), rb) == 829);
    CHECK_THROWS_AS(quantize_rbs(-1.0, rb), std::invalid_argument);
    CHECK_THROWS_AS(reserve_bandwidth(-1, radio), std::invalid_argument);

    const auto d = reserve(3, ConfusionStats{1 - 1e-3, 1 - 1e-3, 0.5, 0.9}, radio, rb);
    CHECK(d.n_star == 3);
    CHECK(d.rb_count == 829);
}

TEST_CASE("verify suite passes") {
    for (const auto& c : oracle::run_reservation_checks(5)) {
        INFO(c.name << ": " << c.detail);
        CHECK(c.passed);
    }
}

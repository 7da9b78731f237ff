#include <doctest.h>

#include <cmath>

#include "disaster/ctmc.hpp"
#include "disaster/errors.hpp"
#include "disaster/rng.hpp"
#include "disaster/special_functions.hpp"

using namespace disaster;

TEST_CASE("survival of short excursions") {
    auto s = ModelSpec::model_b(0.5, 1).with_ct(0.7, 1.3);
    for (double t : {0.0, 0.2, 1.0, 5.0}) CHECK(excursion_survival_given_height(s, 0, t) == doctest::Approx(std::exp(-1.3 * t)).epsilon(1e-14));
    auto e = ModelSpec::model_b(0.5, 1).with_ct(0, 2);
    for (double t : {0.0, 0.2, 1.0, 5.0})
        CHECK(excursion_survival_given_height(e, 1, t) == doctest::Approx((1 + 2 * t) * std::exp(-2 * t)).epsilon(1e-13));
    CHECK_THROWS_AS(excursion_survival_given_height(s, 2, -1), InvalidParameter);
    CHECK_THROWS_AS(excursion_survival_given_height(ModelSpec::model_b(0.5, 1), 2, 1), MissingCtLayer);
}

TEST_CASE("hypoexponential survival against simulation") {
    auto s = ModelSpec::model_a(1, 1, 1).with_ct(1, 1);
    double exact = excursion_survival_given_height(s, 3, 1.0);
    Stream rng(99, 0);
    const int N = 10'000'000;
    int above = 0;
    for (int i = 0; i < N; ++i) {
        double t = 0;
        for (int y = 0; y <= 3; ++y) t += rng.exponential(y + 1.0);
        above += t > 1.0;
    }
    double f = double(above) / N;
    CHECK(std::fabs(f - exact) <= 3 * std::sqrt(exact * (1 - exact) / N));
}

TEST_CASE("partial-fraction weights sum to one") {
    for (double lambda : {-1.0, 0.5, 1.0, 2.0})
        for (std::size_t h = 0; h <= 40; ++h) {
            auto law = hypoexp_law(ModelSpec::model_b(1, 1).with_ct(lambda, 0.8), h);
            CHECK(law.weights.size() == h + 1);
            CHECK(law.weight_sum_error <= 1e-6);
        }
    CHECK_THROWS_AS(hypoexp_law(ModelSpec::model_b(1, 1).with_ct(0), 3), NotApplicable);
}

TEST_CASE("closed form agrees with uniformization") {
    for (double lambda : {-1.0, 0.5, 2.0}) {
        auto s = ModelSpec::model_b(1, 1).with_ct(lambda, 0.8);
        for (std::size_t h : {1, 5, 20, 40}) {
            auto law = hypoexp_law(s, h);
            for (double t : {0.1, 1.0, 4.0, 20.0}) {
                auto d = excursion_survival_detail(s, h, t);
                CHECK_FALSE(d.used_fallback);
                CHECK(d.value == doctest::Approx(hypoexp_survival_uniformized(law.rates, t)).epsilon(1e-9));
            }
        }
    }
    auto big = excursion_survival_detail(ModelSpec::model_b(1, 1).with_ct(0.5), 80, 10.0);
    CHECK(big.used_fallback);
}

TEST_CASE("survival is monotone in time and height") {
    for (double lambda : {-1.0, 0.0, 0.5, 2.0}) {
        auto s = ModelSpec::model_a(0.5, 1, 0.5).with_ct(lambda, 1);
        for (std::size_t h : {0, 3, 15, 50}) {
            double prev = 1.0;
            for (double t = 0; t <= 30; t += 0.25) {
                double v = excursion_survival_given_height(s, h, t);
                CHECK(v >= 0);
                CHECK(v <= prev + 1e-12);
                CHECK(excursion_survival_given_height(s, h + 1, t) >= v - 1e-12);
                prev = v;
            }
        }
    }
}

TEST_CASE("CT excursion tail exponent") {
    CHECK(ct_excursion_tail_exponent(ModelSpec::model_b(0.5, 1).with_ct(0.5)).exponent == doctest::Approx(1.0));
    CHECK(ct_excursion_tail_exponent(ModelSpec::model_a(2, 1, 2).with_ct(0)).exponent == doctest::Approx(2.0));
    for (double alpha : {0.3, 0.5, 0.9, 1.5})
        for (double lambda : {-0.5, 0.2, 0.6, 0.9}) {
            auto s = ModelSpec::model_b(alpha, 1).with_ct(lambda);
            bool heavy = ct_excursion_tail_exponent(s).exponent > 1;
            CHECK(heavy == (classify(s).recurrence == Recurrence::PositiveRecurrent));
        }
    auto fast = ct_excursion_tail_exponent(ModelSpec::model_b(0.5, 1).with_ct(2, 3));
    CHECK(fast.kind == TailKind::Exponential);
    CHECK(fast.mean_bound == doctest::Approx(1.0 / 3));
    CHECK(fast.reciprocal_rate_sum == doctest::Approx(zeta(2) / 3));
    CHECK_THROWS_AS(ct_excursion_tail_exponent(ModelSpec::model_b(0.5, 1).with_ct(1)), Unsupported);
    CHECK_THROWS_AS(ct_excursion_tail_exponent(ModelSpec::model_b(0.5, 2).with_ct(0.5)), NotApplicable);
}

TEST_CASE("explosion report") {
    auto e = explosion_report(ModelSpec::model_a(1, 2, 1).with_ct(2));
    CHECK(e.explosive);
    REQUIRE(e.reciprocal_rate_sum);
    CHECK(*e.reciprocal_rate_sum == doctest::Approx(zeta(2)));
    CHECK(e.reciprocal_rate_partial_sums.back().second < *e.reciprocal_rate_sum);
    REQUIRE(e.return_probability);
    double phi = *e.return_probability;
    CHECK(phi < 1);
    CHECK(e.ne_pmf(0) == doctest::Approx(1 - phi));
    CHECK(e.ne_pmf(3) == doctest::Approx((1 - phi) * phi * phi * phi));

    auto d = explosion_report(ModelSpec::model_a(1, 2, 1).with_ct(1));
    CHECK_FALSE(d.explosive);
    CHECK(d.recurrence == Recurrence::Transient);
    CHECK_FALSE(d.reciprocal_rate_sum.has_value());

    auto r = explosion_report(ModelSpec::model_a(1, 0.5, 1).with_ct(3));
    CHECK_FALSE(r.explosive);
    CHECK(r.recurrence == Recurrence::PositiveRecurrent);
}

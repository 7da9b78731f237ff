#include <doctest.h>

#include <cmath>

#include "disaster/errors.hpp"
#include "disaster/model.hpp"

using namespace disaster;

TEST_CASE("transition probabilities at small states") {
    CHECK(growth_prob(ModelSpec::model_a(1, 1, 1), 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(growth_prob(ModelSpec::model_b(1, 1), 1) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(growth_prob(ModelSpec::model_a(1, 1, 1, 0.7), 0) == 0.7);
    CHECK(disaster_prob(ModelSpec::model_a(0.5, 1, 0.5), 2) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(disaster_prob(ModelSpec::model_b(2, 1), 1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(disaster_prob(ModelSpec::model_b(2, 1), 0) == 0.0);
    CHECK(disaster_prob(ModelSpec::model_a(2, 3, 1.5), 0) == 0.0);
}

TEST_CASE("jump rates") {
    CHECK(jump_rate(ModelSpec::model_a(1, 1, 1).with_ct(0, 1), 9) == 1.0);
    CHECK(jump_rate(ModelSpec::model_a(1, 1, 1).with_ct(1, 2), 3) == doctest::Approx(8.0));
    CHECK(jump_rate(ModelSpec::model_a(1, 1, 1).with_ct(-1, 1), 1) == doctest::Approx(0.5));
    CHECK_THROWS_AS(jump_rate(ModelSpec::model_a(1, 1, 1), 1), MissingCtLayer);
}

TEST_CASE("drift and variance") {
    auto a = ModelSpec::model_a(1, 1, 1);
    auto d = drift_and_variance(a, 1);
    CHECK(std::fabs(d.drift) < 1e-15);
    CHECK(d.variance == doctest::Approx(1.0));
    CHECK(std::fabs(drift_and_variance(a, 1'000'000).drift) < 1e-5);
    CHECK(std::fabs(drift_and_variance(ModelSpec::model_b(1, 1), 3).drift) < 1e-15);
}

TEST_CASE("validation names the broken invariant") {
    auto expect = [](auto make, const std::string& inv) {
        try {
            validate(make());
            FAIL("accepted");
        } catch (const InvalidParameter& e) {
            CHECK(e.invariant() == inv);
        }
    };
    expect([] { return ModelSpec::model_a(2.5, 1, 1); }, "0 < alpha <= nu + 1");
    expect([] { return ModelSpec::model_a(1, 1, 1, 0.0); }, "p0 in (0,1]");
    expect([] { return ModelSpec::model_a(1, 1, 1, 1.2); }, "p0 in (0,1]");
    expect([] { return ModelSpec::model_a(0.5, 1, -1.5); }, "nu > -1");
    expect([] { return ModelSpec::model_b(1, 0); }, "beta > 0");
    expect([] { return ModelSpec::model_b(-1, 1); }, "alpha > 0");
    expect([] { return ModelSpec::model_a(1, 1, 1).with_ct(0, 0); }, "r0 > 0");
    ModelSpec b = ModelSpec::model_b(1, 1);
    b.nu = 1.0;
    CHECK_THROWS_AS(validate(b), InvalidParameter);
    CHECK_NOTHROW(validate(ModelSpec::model_a(2, 1, 1)));
    CHECK(ModelSpec::model_a(2, 1, 1).degenerate());
}

TEST_CASE("growth + disaster = 1 and stochastic monotonicity") {
    for (auto s : {ModelSpec::model_a(1.5, 1, 1, 0.4), ModelSpec::model_a(0.3, 2, -0.5), ModelSpec::model_a(0.8, 0.5, 2),
                   ModelSpec::model_b(2, 1), ModelSpec::model_b(0.5, 0.5, 0.3), ModelSpec::model_b(3, 2)}) {
        double prev = 2.0;
        for (std::uint64_t x : {0ull, 1ull, 2ull, 3ull, 10ull, 100ull, 12345ull, 1ull << 40}) {
            CHECK(growth_prob(s, x) + disaster_prob(s, x) == 1.0);
            if (x >= 1) {
                CHECK(disaster_prob(s, x) < prev);
                prev = disaster_prob(s, x);
            }
            CHECK(log_growth_prob(s, x) == doctest::Approx(std::log(growth_prob(s, x))).epsilon(1e-12));
        }
    }
}

TEST_CASE("critical disaster probability decays like alpha/x") {
    for (double alpha : {0.5, 1.0, 2.0}) {
        CHECK(disaster_prob(ModelSpec::model_a(alpha, 1, 1), 1'000'000) * 1e6 == doctest::Approx(alpha).epsilon(0.01));
        CHECK(disaster_prob(ModelSpec::model_b(alpha, 1), 1'000'000) * 1e6 == doctest::Approx(alpha).epsilon(0.01));
    }
}

TEST_CASE("huge states do not overflow") {
    auto s = ModelSpec::model_a(1, 3, 1);
    double q = disaster_prob(s, std::uint64_t{1} << 62);
    CHECK(q > 0);
    CHECK(std::isfinite(std::log(q)));
}

TEST_CASE("classification") {
    CHECK(classify(ModelSpec::model_a(1.5, 1, 1)).recurrence == Recurrence::PositiveRecurrent);
    CHECK(classify(ModelSpec::model_a(1.0, 1, 1)).recurrence == Recurrence::NullRecurrent);
    CHECK(classify(ModelSpec::model_a(0.5, 2, 1)).recurrence == Recurrence::Transient);
    CHECK(classify(ModelSpec::model_a(0.5, 0.5, 1)).recurrence == Recurrence::PositiveRecurrent);
    CHECK_FALSE(classify(ModelSpec::model_a(0.5, 1, 1)).ct_explosive.has_value());

    auto c = classify(ModelSpec::model_a(1, 2, 1).with_ct(1.5));
    CHECK(c.recurrence == Recurrence::Transient);
    CHECK(c.ct_explosive == true);
    CHECK(classify(ModelSpec::model_b(0.5, 1).with_ct(0.8)).recurrence == Recurrence::PositiveRecurrent);
    CHECK(classify(ModelSpec::model_b(0.5, 1).with_ct(0.4)).recurrence == Recurrence::NullRecurrent);
    CHECK(classify(ModelSpec::model_b(0.5, 1).with_ct(0.5)).recurrence == Recurrence::NullRecurrent);
    CHECK(classify(ModelSpec::model_a(1, 0.5, 1).with_ct(3)).ct_explosive == false);
    CHECK(classify(ModelSpec::model_a(1, 2, 1).with_ct(1)).ct_explosive == false);
}

TEST_CASE("classification ignores the time scale, and lambda off the critical line") {
    for (double beta : {0.5, 2.0})
        for (double lambda : {-1.0, 0.0, 0.7, 3.0}) {
            auto s = ModelSpec::model_b(0.7, beta);
            CHECK(classify(s.with_ct(lambda, 0.1)).recurrence == classify(s.with_ct(lambda, 9)).recurrence);
            CHECK(classify(s.with_ct(lambda)).recurrence == classify_dt(s));
        }
}

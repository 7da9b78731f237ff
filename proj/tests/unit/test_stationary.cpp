#include <doctest.h>

#include <cmath>
#include <numbers>

#include "disaster/errors.hpp"
#include "disaster/hitting_times.hpp"
#include "disaster/special_functions.hpp"
#include "disaster/stationary.hpp"

using namespace disaster;

namespace {

double loglog_slope(const PmfTable& t, std::int64_t lo, std::int64_t hi) {
    // least squares on log-spaced points
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (double x = lo; x <= hi; x *= 1.1) {
        auto i = static_cast<std::int64_t>(x);
        double lx = std::log(static_cast<double>(i)), ly = std::log(t.at(i));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

TEST_CASE("invariance criteria") {
    auto b = criteria(ModelSpec::model_b(2, 1));
    CHECK_FALSE(b.c1_finite);
    REQUIRE(b.c2_value);
    CHECK(*b.c2_value == doctest::Approx(zeta(2)).epsilon(1e-10));
    auto a = criteria(ModelSpec::model_a(2, 1, 1));
    REQUIRE(a.c2_value);
    CHECK(*a.c2_value == doctest::Approx(1.0).epsilon(1e-10));
    auto a3 = criteria(ModelSpec::model_a(3, 1, 4, 0.5));
    CHECK(*a3.c2_value == doctest::Approx(0.5 * 4 / 2).epsilon(1e-10));
    CHECK(criteria(ModelSpec::model_a(0.5, 2, 1)).c1_finite);
    CHECK_FALSE(criteria(ModelSpec::model_b(0.5, 1)).c2_finite);
    auto ct = criteria(ModelSpec::model_b(0.5, 1).with_ct(0.8));
    CHECK(ct.ct_c2_finite == true);
}

TEST_CASE("Zipf stationary law of the critical model B") {
    auto t = invariant_dt(ModelSpec::model_b(2, 1), 1000);
    double pi0 = 1 / (1 + zeta(2));
    CHECK(t.normalized);
    CHECK(t.at(0) == doctest::Approx(pi0).epsilon(1e-12));
    for (std::int64_t x : {1, 2, 7, 100, 1000}) CHECK(t.at(x) == doctest::Approx(pi0 / (x * x)).epsilon(1e-12));
    CHECK(stationary_atom(ModelSpec::model_b(2, 1)) == doctest::Approx(pi0).epsilon(1e-12));
    CHECK(t.total() + t.tail_mass_bound >= 1 - 1e-12);
    CHECK(t.tail_mass_bound == doctest::Approx(pi0 * zeta_tail(2, 1001)).epsilon(1e-6));
}

TEST_CASE("homogeneous model A has a geometric law") {
    double alpha = 0.6, nu = 1.0, p0 = 0.8;
    auto t = invariant_dt(ModelSpec::model_a(alpha, 0, nu, p0), 200);
    double q = alpha / (nu + 1), p = 1 - q;
    double pi0 = q / (p0 + q);
    CHECK(t.at(0) == doctest::Approx(pi0).epsilon(1e-12));
    for (std::int64_t x : {1, 2, 10, 150}) CHECK(t.at(x) == doctest::Approx(pi0 * p0 * std::pow(p, x - 1)).epsilon(1e-11));
}

TEST_CASE("mass of the first thousand states") {
    auto t = invariant_dt(ModelSpec::model_a(2, 1, 1), 1000);
    CHECK(t.total() >= 0.998);
    CHECK(t.at(0) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fixed point of the truncated kernel") {
    const std::size_t X = 200;
    for (auto s : {ModelSpec::model_a(1.5, 1, 1, 0.6), ModelSpec::model_b(2, 1), ModelSpec::model_b(1.2, 0.5, 0.3),
                   ModelSpec::model_a(0.7, 0.3, 0.2)}) {
        auto t = invariant_dt(s, X);
        std::vector<double> next(X + 1, 0.0);
        for (std::size_t x = 0; x <= X; ++x) {
            double p = x < X ? growth_prob(s, x) : 0.0;
            next[0] += t.masses[x] * (1 - p);
            if (x < X) next[x + 1] += t.masses[x] * p;
        }
        double err = 0;
        for (std::size_t x = 0; x <= X; ++x) err = std::max(err, std::fabs(next[x] - t.masses[x]));
        CHECK(err <= 1e-8);
    }
}

TEST_CASE("unimodal with the mode at the origin") {
    for (auto s : {ModelSpec::model_a(1.5, 1, 1, 0.6), ModelSpec::model_b(2, 1, 0.9), ModelSpec::model_b(1.2, 0.5, 0.99)}) {
        auto t = invariant_dt(s, 500);
        for (std::size_t x = 1; x < t.masses.size(); ++x) CHECK(t.masses[x] <= t.masses[x - 1]);
    }
}

TEST_CASE("renewal identity pi_x = P(tau > x) / mu") {
    for (auto s : {ModelSpec::model_a(1.5, 1, 1, 0.6), ModelSpec::model_b(2, 1), ModelSpec::model_b(1.2, 0.5, 0.3),
                   ModelSpec::model_a(3, 1, 2.5)}) {
        auto t = invariant_dt(s, 300);
        double mu = mean_return_time(s);
        for (std::int64_t x = 0; x <= 300; x += 7)
            CHECK(std::fabs(t.at(x) - return_time_tail(s, x) / mu) <= 1e-10);
    }
}

TEST_CASE("null recurrent measures are anchored at one") {
    auto t = invariant_dt(ModelSpec::model_a(1, 1, 1), 100);
    CHECK_FALSE(t.normalized);
    CHECK(t.at(0) == 1.0);
    CHECK(std::isinf(t.tail_mass_bound));
    CHECK_THROWS(invariant_dt(ModelSpec::model_b(1, 2), 10));
}

TEST_CASE("continuous-time invariant law") {
    auto s = ModelSpec::model_b(1.3, 0.7, 0.4);
    auto dt = invariant_dt(s, 400);
    auto ct0 = invariant_ct(s.with_ct(0, 3), 400);
    for (std::size_t x = 0; x <= 400; ++x) CHECK(ct0.masses[x] == dt.masses[x]);

    auto a = invariant_ct(ModelSpec::model_a(0.5, 1, 0.4).with_ct(1), 10000);
    double slope = loglog_slope(a, 100, 10000);
    CHECK(slope >= -1.6);
    CHECK(slope <= -1.4);

    auto b = invariant_ct(ModelSpec::model_b(2, 1).with_ct(1), 2000);
    CHECK(b.at(2000) / b.at(1000) == doctest::Approx(0.125).epsilon(0.02));
    CHECK(b.total() + b.tail_mass_bound >= 1 - 1e-12);
}

TEST_CASE("stationary pgf") {
    for (auto s : {ModelSpec::model_a(1.5, 1, 1, 0.4), ModelSpec::model_b(2, 1, 0.7), ModelSpec::model_a(2.5, 1, 3)})
        CHECK(stationary_pgf(s, 1.0) == doctest::Approx(1.0).epsilon(1e-12));
    for (double z : {0.1, 0.5, 0.9})
        CHECK(stationary_conditional_pgf(ModelSpec::model_a(1.5, 1, 1), z) ==
              doctest::Approx(1 - std::sqrt(1 - z)).epsilon(1e-10));
    auto b = ModelSpec::model_b(2, 1);
    auto t = invariant_dt(b, 200);
    double series = 0;
    for (std::size_t x = 0; x <= 200; ++x) series += t.masses[x] * std::pow(0.5, x);
    CHECK(std::fabs(stationary_pgf(b, 0.5) - series) <= 1e-8);
    auto a = ModelSpec::model_a(2.2, 1, 1.7, 0.6);
    auto ta = invariant_dt(a, 400);
    series = 0;
    for (std::size_t x = 0; x <= 400; ++x) series += ta.masses[x] * std::pow(0.7, x);
    CHECK(std::fabs(stationary_pgf(a, 0.7) - series) <= 1e-8);
}

TEST_CASE("Zipf moments") {
    CHECK(zipf_moment(2.5, 0) == 1.0);
    CHECK(zipf_moment(3, 1) == doctest::Approx(1.368429).epsilon(1e-5));
    double num = 0, den = 0;
    for (int x = 1; x <= 200000; ++x) {
        num += std::pow(x, -2.0);
        den += std::pow(x, -3.0);
    }
    num += zeta_tail(2, 200001);
    den += zeta_tail(3, 200001);
    CHECK(zipf_moment(3, 1) == doctest::Approx(num / den).epsilon(1e-12));
}

#include <doctest.h>

#include <cmath>

#include "disaster/divisibility.hpp"
#include "disaster/errors.hpp"
#include "disaster/stationary.hpp"

using namespace disaster;

namespace {

PmfTable table(std::vector<double> m) {
    PmfTable t;
    t.masses = std::move(m);
    t.normalized = true;
    return t;
}

PmfTable poisson(double m, std::size_t n) {
    std::vector<double> v(n + 1);
    for (std::size_t k = 0; k <= n; ++k) v[k] = std::exp(-m + k * std::log(m) - std::lgamma(k + 1.0));
    return table(v);
}

// pi0 at the origin, otherwise (1 - pi0) p q^{k-1} on k >= 1
PmfTable geometric_mixture(double p, double pi0, std::size_t n) {
    std::vector<double> v(n + 1);
    v[0] = pi0;
    for (std::size_t k = 1; k <= n; ++k) v[k] = (1 - pi0) * p * std::pow(1 - p, k - 1.0);
    return table(v);
}

}  // namespace

TEST_CASE("canonical sequences of reference laws") {
    auto cs = canonical_sequence(poisson(2.5, 60), 40);
    CHECK(cs.r[0] == doctest::Approx(2.5).epsilon(1e-12));
    for (std::size_t x = 1; x <= 40; ++x) CHECK(std::fabs(cs.r[x]) <= 1e-9);

    auto g = canonical_sequence(geometric_mixture(0.5, 0.5, 80), 60);
    for (std::size_t x = 0; x <= 60; ++x) CHECK(g.r[x] == doctest::Approx(std::pow(0.5, x + 1.0)).epsilon(1e-10));

    auto b = canonical_sequence(table({0.5, 0.5}), 3);
    CHECK(b.r[0] == doctest::Approx(1.0));
    CHECK(b.r[1] == doctest::Approx(-1.0));
    CHECK_THROWS_AS(canonical_sequence(table({0.0, 1.0}), 3), NotApplicable);
}

TEST_CASE("round trip through the convolution identity") {
    for (auto s : {ModelSpec::model_b(2, 1, 0.6), ModelSpec::model_b(1.5, 1, 0.2), ModelSpec::model_a(1.5, 1, 1, 0.3),
                   ModelSpec::model_a(0.8, 0.5, 0.5, 0.9)}) {
        auto cs = canonical_sequence(invariant_dt(s, 400), 300);
        CHECK(round_trip_error(cs) <= 1e-10);
        auto back = reconvolve(cs);
        CHECK(back.size() == cs.source.size());
    }
}

TEST_CASE("divisibility verdicts") {
    auto geo = classify_divisibility(geometric_mixture(0.3, 0.3, 200), 150);
    CHECK(geo.id);
    CHECK(geo.sd);
    auto bern = classify_divisibility(table({0.5, 0.5, 0.0, 0.0}), 2);
    CHECK_FALSE(bern.id);
    CHECK(bern.first_violation_index == 1);
    CHECK_FALSE(classify_divisibility(sibuya_stationary_pmf(1.5, 0.6, 500), 300).id);
    auto poi = classify_divisibility(poisson(3, 80), 50);
    CHECK(poi.id);
    CHECK(poi.sd);
}

TEST_CASE("Sibuya stationary special case") {
    auto c = sibuya_stationary_special_case(1.5, 0.4);
    CHECK(c.id);
    CHECK_FALSE(c.sd);
    CHECK(c.agrees);
    auto d = sibuya_stationary_special_case(1.5, 0.2);
    CHECK(d.id);
    CHECK(d.sd);
    CHECK(d.agrees);
    auto e = sibuya_stationary_special_case(1.5, 0.6);
    CHECK_FALSE(e.id);
    CHECK(e.agrees);
    CHECK(c.id_threshold == doctest::Approx(0.5));
    CHECK(c.sd_threshold == doctest::Approx(0.25));
    // the closed-form pgf matches the stationary pgf of the chain
    auto s = ModelSpec::model_a(1.5, 1, 1, 0.4);
    for (double z : {0.2, 0.7}) CHECK(c.pgf(z) == doctest::Approx(stationary_pgf(s, z)).epsilon(1e-10));
    auto t = invariant_dt(s, 200);
    for (std::int64_t x = 0; x <= 200; x += 13) CHECK(c.pmf.at(x) == doctest::Approx(t.at(x)).epsilon(1e-11));
    CHECK_THROWS_AS(sibuya_stationary_special_case(2.5, 0.4), InvalidParameter);
}

TEST_CASE("complete monotonicity") {
    for (double alpha : {0.5, 1.0, 1.5}) {
        std::vector<double> tail(56);
        for (std::size_t x = 0; x < tail.size(); ++x) tail[x] = std::pow(x + 1.0, -alpha);
        CHECK(complete_monotonicity_check(tail, 5).pass);
    }
    std::vector<double> ptail(40);
    double cdf = 0;
    for (std::size_t x = 0; x < ptail.size(); ++x) {
        cdf += std::exp(-5 + x * std::log(5.0) - std::lgamma(x + 1.0));
        ptail[x] = 1 - cdf;
    }
    auto bad = complete_monotonicity_check(ptail, 5);
    CHECK_FALSE(bad.pass);
    REQUIRE(bad.first_violation);
    CHECK(bad.first_violation->first <= 2);
    CHECK(complete_monotonicity_check(std::vector<double>(30, 1.0), 6).pass);
}

TEST_CASE("thinning remainders") {
    for (double u : {0.2, 0.5, 0.9}) {
        auto r = thinning_remainder(poisson(3, 120), u, 30);
        auto expect = poisson(3 * (1 - u), 30);
        for (std::size_t k = 0; k <= 30; ++k) CHECK(std::fabs(r.coeffs[k] - expect.masses[k]) <= 1e-12);
        CHECK(r.valid_pgf);
    }
    auto g = thinning_remainder(geometric_mixture(0.4, 0.4, 300), 0.5, 60);
    CHECK(g.valid_pgf);
    for (double c : g.coeffs) CHECK(c >= 0);

    // p0 = 0.4 lies above the SD threshold 0.25 for alpha = 1.5
    auto sib = sibuya_stationary_pmf(1.5, 0.4, 3000);
    bool some_negative = false;
    for (double u = 0.05; u < 1; u += 0.05) some_negative = some_negative || !thinning_remainder(sib, u, 40).valid_pgf;
    CHECK(some_negative);
    auto ok = sibuya_stationary_pmf(1.5, 0.2, 3000);
    for (double u = 0.05; u < 1; u += 0.05) CHECK(thinning_remainder(ok, u, 40).valid_pgf);
}

TEST_CASE("self-decomposable laws are unimodal") {
    std::vector<PmfTable> laws = {poisson(0.7, 60), poisson(4, 80), geometric_mixture(0.3, 0.3, 200),
                                  sibuya_stationary_pmf(1.5, 0.2, 400), sibuya_stationary_pmf(1.8, 0.1, 400)};
    for (auto& t : laws) {
        auto v = classify_divisibility(t, 50);
        if (v.sd) CHECK(v.id);
        if (!v.sd) continue;
        auto cs = canonical_sequence(t, 50);
        bool mode_at_zero = t.masses[1] <= t.masses[0];
        CHECK(mode_at_zero == (cs.r[0] <= 1));
        std::size_t x = 1;
        while (x < 50 && t.masses[x] >= t.masses[x - 1]) ++x;
        for (; x < 50; ++x) CHECK(t.masses[x] <= t.masses[x - 1] + 1e-15);
    }
}

TEST_CASE("log-convex stationary laws are infinitely divisible") {
    for (double p0 : {0.05, 0.15, 0.24}) {
        auto a = invariant_dt(ModelSpec::model_a(1.5, 1, 1, p0), 400);
        CHECK(log_convex(a, 300));
        CHECK(classify_divisibility(a, 300).id);
    }
    for (double p0 : {0.05, 0.15, 0.24}) {
        auto b = invariant_dt(ModelSpec::model_b(2, 1, p0), 400);
        CHECK(log_convex(b, 300));
        CHECK(classify_divisibility(b, 300).id);
    }
    auto a3 = invariant_dt(ModelSpec::model_a(2.5, 1, 3, 0.3), 400);
    CHECK(log_convex(a3, 300));
    CHECK(classify_divisibility(a3, 300).id);
}

TEST_CASE("shifted conditional stationary laws are self-decomposable") {
    for (double alpha : {1.2, 1.5, 1.9})
        for (double nu : {1.0, 2.0}) {
            auto v = classify_divisibility(shifted_conditional_stationary(ModelSpec::model_a(alpha, 1, nu), 400), 300);
            CHECK(v.id);
            CHECK(v.sd);
        }
    for (double alpha : {1.5, 2.0, 3.0}) {
        auto v = classify_divisibility(shifted_conditional_stationary(ModelSpec::model_b(alpha, 1), 400), 300);
        CHECK(v.id);
        CHECK(v.sd);
    }
}

#include <doctest.h>

#include <cmath>

#include "disaster/hitting_times.hpp"
#include "disaster/products.hpp"
#include "disaster/special_functions.hpp"
#include "disaster/stationary.hpp"

using namespace disaster;

namespace {

std::vector<ModelSpec> recurrent_points() {
    return {ModelSpec::model_a(1.5, 1, 1, 0.6), ModelSpec::model_a(0.5, 1, 0.4), ModelSpec::model_b(2, 1),
            ModelSpec::model_b(0.7, 0.5, 0.3), ModelSpec::model_a(1, 1, 2)};
}

// Rows of P^n restricted to a truncation large enough that no path from x <= 5
// of length <= 25 reaches the boundary.
std::vector<std::vector<std::vector<double>>> matrix_powers(const ModelSpec& s, std::size_t states, std::size_t nmax) {
    std::vector<std::vector<double>> P(states, std::vector<double>(states, 0.0));
    for (std::size_t x = 0; x < states; ++x) {
        double p = growth_prob(s, x);
        if (x + 1 < states) P[x][x + 1] = p;
        P[x][0] += x + 1 < states ? 1 - p : 1.0;
    }
    std::vector<std::vector<std::vector<double>>> out;
    std::vector<std::vector<double>> cur(states, std::vector<double>(states, 0.0));
    for (std::size_t i = 0; i < states; ++i) cur[i][i] = 1.0;
    for (std::size_t n = 0; n <= nmax; ++n) {
        out.push_back(cur);
        std::vector<std::vector<double>> next(states, std::vector<double>(states, 0.0));
        for (std::size_t i = 0; i < states; ++i)
            for (std::size_t k = 0; k < states; ++k)
                if (cur[i][k] != 0)
                    for (std::size_t j = 0; j < states; ++j) next[i][j] += cur[i][k] * P[k][j];
        cur = std::move(next);
    }
    return out;
}

}  // namespace

TEST_CASE("return time law") {
    auto s = ModelSpec::model_a(1.5, 1, 1, 0.6);
    auto t = return_time_pmf(s, 100);
    CHECK(t.support_start == 1);
    CHECK(t.at(1) == doctest::Approx(0.4).epsilon(1e-15));

    auto b = ModelSpec::model_b(1.3, 1);
    for (std::uint64_t x : {1, 2, 5, 50, 1000}) CHECK(return_time_tail(b, x) == doctest::Approx(std::pow(x, -1.3)).epsilon(1e-12));

    auto a2 = ModelSpec::model_a(0.5, 2, 0.5);
    double prod = 1.0;
    for (int y = 1; y < 2'000'000; ++y) prod *= 1 - 0.5 / (0.5 + double(y) * y);
    auto ta = return_time_pmf(a2, 10);
    CHECK(ta.defect == doctest::Approx(prod).epsilon(1e-6));
    CHECK(ta.defect > 0);
}

TEST_CASE("telescoping sum of the return time law") {
    for (auto s : recurrent_points()) {
        auto t = return_time_pmf(s, 500);
        auto L = log_growth_products(s, 501);
        CompensatedSum acc;
        for (std::size_t x = 0; x <= 500; ++x) {
            acc += t.masses[x];
            if (x % 50 == 0) CHECK(std::fabs(acc.value() - (1 - std::exp(L[x + 1]))) <= 1e-14);
        }
    }
}

TEST_CASE("return time pgf") {
    for (auto s : {ModelSpec::model_a(1.5, 1, 1), ModelSpec::model_b(2, 1, 0.5), ModelSpec::model_a(3, 1, 2.5, 0.2)})
        CHECK(return_time_pgf(s, 1).value == doctest::Approx(1.0).epsilon(1e-10));
    for (auto s : {ModelSpec::model_a(1.5, 1, 1, 0.6), ModelSpec::model_a(1, 1, 2), ModelSpec::model_b(0.5, 1),
                   ModelSpec::model_b(1, 1, 0.3), ModelSpec::model_a(0.4, 1, 0.2)}) {
        auto f = return_time_series(s, 4000);
        for (double z : {0.1, 0.5, 0.9}) {
            auto v = return_time_pgf(s, z);
            CHECK(v.closed_form);
            CHECK(std::fabs(v.value - f.eval(z)) <= 1e-8);
        }
    }
    for (double nu : {0.5, 2.0})
        for (double z : {0.3, 0.8})
            CHECK(excursion_psi0(ModelSpec::model_a(1, 1, nu), z) ==
                  doctest::Approx(z - nu * l_nu(nu, z).value * (1 - z)).epsilon(1e-10));
    for (double z : {0.3, 0.8})
        CHECK(excursion_psi0(ModelSpec::model_b(1, 1), z) == doctest::Approx(1 + (1 - z) * std::log1p(-z) / z).epsilon(1e-10));
    auto off = return_time_pgf(ModelSpec::model_b(1, 0.5), 0.7);
    CHECK_FALSE(off.closed_form);
    CHECK(off.value == doctest::Approx(return_time_series(ModelSpec::model_b(1, 0.5), 2000).eval(0.7)).epsilon(1e-12));
}

TEST_CASE("mean return time") {
    CHECK(mean_return_time(ModelSpec::model_a(2, 1, 1)) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(mean_return_time(ModelSpec::model_b(2, 1)) == doctest::Approx(1 + zeta(2)).epsilon(1e-14));
    CHECK(std::isinf(mean_return_time(ModelSpec::model_a(1, 1, 1))));
    CHECK(std::isinf(mean_return_time(ModelSpec::model_b(2, 2))));
    auto s = ModelSpec::model_b(0.7, 0.5, 0.3);
    auto t = return_time_pmf(s, 20000);
    CompensatedSum m;
    for (std::size_t x = 0; x < t.masses.size(); ++x) m += (x + 1.0) * t.masses[x];
    CHECK(m.value() == doctest::Approx(mean_return_time(s)).epsilon(1e-9));
}

TEST_CASE("size-biased return time is a proper law") {
    for (auto s : {ModelSpec::model_a(3, 1, 2.5), ModelSpec::model_b(0.7, 0.5, 0.3)}) {
        auto t = return_time_pmf(s, 100000);
        double mu = mean_return_time(s);
        CompensatedSum acc;
        for (std::size_t x = 0; x < t.masses.size(); ++x) acc += (x + 1.0) * t.masses[x] / mu;
        CHECK(acc.value() == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("Sibuya and Pareto laws") {
    CHECK(sibuya_pmf(1.5, 1, 1) == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(sibuya_pmf(0.7, 2.5, 1) == doctest::Approx(0.2).epsilon(1e-15));
    CHECK(pareto_pmf(1.5, 1) == doctest::Approx(1 - std::pow(2, -1.5)).epsilon(1e-15));
    auto tab = sibuya_pmf_table(1.5, 1, 1'000'000);
    CompensatedSum acc;
    for (double v : tab) acc += v;
    CHECK(acc.value() >= 1 - 2 * std::pow(1e6, -1.5));
    CHECK(acc.value() <= 1 + 1e-12);
    // mode: ratio s_{x+1}/s_x = (nu - alpha + x)/(nu + x + 1)
    for (std::size_t x = 1; x < 30; ++x) CHECK(tab[x + 1] / tab[x] == doctest::Approx((1 - 1.5 + x) / (2.0 + x)).epsilon(1e-12));
}

TEST_CASE("scale function and height law") {
    auto s = ModelSpec::model_a(1.5, 1, 1, 0.6);
    CHECK(scale_function(s, 0) == 0.0);
    CHECK(scale_function(s, 1) == doctest::Approx(1 / 0.6).epsilon(1e-15));
    for (std::uint64_t x : {1, 2, 10, 200}) CHECK(scale_function(ModelSpec::model_b(1.7, 1), x) == doctest::Approx(std::pow(x, 1.7)).epsilon(1e-12));

    auto h = height_law(s, 300);
    CHECK(h.atom_at_zero == doctest::Approx(0.4).epsilon(1e-15));
    for (std::uint64_t k = 1; k <= 300; ++k) {
        CHECK(height_tail(s, k) == doctest::Approx(return_time_tail(s, k)).epsilon(1e-13));
        double direct = disaster_prob(s, k) * std::exp(log_growth_range(s, 0, k));
        CHECK(std::fabs(h.masses.at(k) - direct) <= 1e-12);
    }
}

TEST_CASE("extinction probabilities") {
    for (auto s : recurrent_points()) CHECK(extinction_prob(s, 7) == 1.0);
    auto s = ModelSpec::model_a(0.5, 2, 0.5);
    double prev = 1.0;
    for (std::uint64_t x = 1; x <= 50; ++x) {
        double e = extinction_prob(s, x);
        CHECK(e < prev);
        prev = e;
        if (x > 5 && x % 9 != 0) continue;
        // resolvent series: sum_{y >= x} q_y prod_{x <= y' < y} p_y'
        CompensatedSum acc;
        double L = 0.0;
        for (std::uint64_t y = x; y < x + 3'000'000; ++y) {
            acc += disaster_prob(s, y) * std::exp(L);
            L += log_growth_prob(s, y);
        }
        double tail = std::exp(L) * (1 - std::exp(log_tail_product(s, x + 3'000'000).value));
        CHECK(std::fabs(e - (acc.value() + tail)) <= 1e-10);
        if (x == 1) CHECK(std::fabs(e - acc.value()) <= 1e-6);
    }
}

TEST_CASE("first passage to the origin") {
    auto s = ModelSpec::model_a(0.5, 2, 0.5);
    for (std::uint64_t x : {1, 3, 10}) {
        auto t = first_passage_down_pmf(s, x, 100000);
        CHECK(t.at(1) == disaster_prob(s, x));
        CHECK(std::fabs(t.total() + t.tail_mass_bound - extinction_prob(s, x)) <= 1e-10);
        // beta = 2 leaves O(alpha/kmax) of mass beyond the table
        CHECK(std::fabs(t.total() - extinction_prob(s, x)) <= 1e-5);
    }
    auto s3 = ModelSpec::model_a(0.5, 3, 0.5);
    for (std::uint64_t x : {1, 3, 10}) {
        auto t = first_passage_down_pmf(s3, x, 100000);
        CHECK(std::fabs(t.total() - extinction_prob(s3, x)) <= 1e-8);
    }
    double z = 0.5;
    for (std::uint64_t x = 1; x < 10; ++x) {
        double p = growth_prob(s, x);
        double lhs = 1 - first_passage_down_pgf(s, x + 1, z).value;
        double rhs = (z - 1) / (p * z) + (1 - first_passage_down_pgf(s, x, z).value) / (p * z);
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
    }
}

TEST_CASE("Green kernel equals matrix powers") {
    for (auto s : {ModelSpec::model_a(1.5, 1, 1), ModelSpec::model_b(1.5, 1), ModelSpec::model_a(0.8, 2, 0.3, 0.5)}) {
        auto Pn = matrix_powers(s, 60, 25);
        double err = 0;
        for (std::uint64_t x = 0; x <= 5; ++x)
            for (std::uint64_t y = 0; y <= 5; ++y) {
                auto g = green_kernel(s, x, y, 26);
                for (std::size_t n = 0; n <= 25; ++n) err = std::max(err, std::fabs(g[n] - Pn[n][x][y]));
            }
        CHECK(err <= 1e-10);
    }
}

TEST_CASE("Green function at the origin and first passage factorization") {
    auto s = ModelSpec::model_b(1.5, 1, 0.7);
    auto g = green_diag(s, 0, 400);
    CHECK(g[0] == 1.0);
    for (double z : {0.3, 0.6}) CHECK(g.eval(z) == doctest::Approx(1 / (1 - return_time_pgf(s, z).value)).epsilon(1e-12));

    for (std::uint64_t x : {1, 4})
        for (std::uint64_t y : {0, 2, 6}) {
            auto phi = first_passage_series(s, x, y, 200);
            auto prod = multiply(phi, green_diag(s, y, 200), 200);
            auto gxy = green_kernel(s, x, y, 200);
            for (std::size_t n = 0; n < 200; ++n) CHECK(std::fabs(prod[n] - gxy[n]) <= 1e-12);
            double mass = 0;
            for (double c : phi.coeffs) {
                CHECK(c >= -1e-15);
                mass += c;
            }
            CHECK(mass <= 1 + 1e-12);
        }
    auto down = first_passage_down_pmf(s, 4, 199);
    auto phi40 = first_passage_series(s, 4, 0, 200);
    for (std::size_t k = 1; k < 200; ++k) CHECK(std::fabs(phi40[k] - down.at(static_cast<std::int64_t>(k))) <= 1e-12);
}

TEST_CASE("first return pgf at an arbitrary state") {
    auto s = ModelSpec::model_b(3, 1, 0.8);
    CHECK(first_return_pgf_at(s, 0, 0.4) == return_time_pgf(s, 0.4).value);
    for (auto spec : {s, ModelSpec::model_a(1.5, 0.5, 1, 0.6)}) {
        auto pi = invariant_dt(spec, 10);
        for (std::uint64_t x : {0, 1, 3}) {
            double h = 1e-5;
            double d1 = (1 - first_return_pgf_at(spec, x, 1 - h)) / h;
            double d2 = (1 - first_return_pgf_at(spec, x, 1 - 2 * h)) / (2 * h);
            CHECK(2 * d1 - d2 == doctest::Approx(1 / pi.at(x)).epsilon(1e-4));
        }
    }
    auto tr = ModelSpec::model_a(0.5, 2, 0.5);
    for (std::uint64_t x : {0, 1, 5}) CHECK(first_return_pgf_at(tr, x, 1.0) < 1.0);
}

TEST_CASE("contact probability") {
    // alpha = nu + 1 forces p_1 = 0: the chain alternates 0, 1, 0, ...
    auto per = ModelSpec::model_a(2, 1, 1);
    auto up = contact_probability(per, 10000);
    CHECK(up[0] == 1.0);
    CHECK(up[10000] == 1.0);
    CHECK(up[9999] == 0.0);
    CHECK(0.5 * (up[9999] + up[10000]) == doctest::Approx(stationary_atom(per)));

    auto a = ModelSpec::model_a(2, 1, 2);
    auto u = contact_probability(a, 10000);
    CHECK(std::fabs(u[10000] - 1.0 / 3) <= 1e-3);
    CHECK(contact_asymptote(a).regime == ContactRegime::Constant);
    CHECK(contact_asymptote(a).constant == doctest::Approx(1.0 / 3));

    auto b = ModelSpec::model_b(0.5, 1);
    auto ub = contact_probability(b, 10000);
    double slope = (std::log(ub[10000]) - std::log(ub[1000])) / std::log(10.0);
    CHECK(slope >= -0.55);
    CHECK(slope <= -0.45);
    auto asy = contact_asymptote(b);
    CHECK(asy.regime == ContactRegime::Algebraic);
    CHECK(asy.exponent == doctest::Approx(0.5));
    CHECK(ub[10000] / asy(10000) == doctest::Approx(1.0).epsilon(0.05));

    auto a5 = ModelSpec::model_a(0.5, 1, 1, 0.7);
    auto ua = contact_probability(a5, 10000);
    CHECK(ua[10000] / contact_asymptote(a5)(10000) == doctest::Approx(1.0).epsilon(0.05));
    CHECK(contact_asymptote(ModelSpec::model_b(1, 1)).regime == ContactRegime::Logarithmic);
}

TEST_CASE("contact probability solves the renewal equation") {
    for (auto s : recurrent_points()) {
        auto u = contact_probability(s, 600);
        auto f = return_time_series(s, 601);
        for (std::size_t n = 1; n <= 600; n += 37) {
            long double acc = 0;
            for (std::size_t k = 1; k <= n; ++k) acc += static_cast<long double>(f[k]) * u[n - k];
            CHECK(std::fabs(u[n] - static_cast<double>(acc)) <= 1e-12);
        }
    }
}

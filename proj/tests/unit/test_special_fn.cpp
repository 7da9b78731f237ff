#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>

#include "disaster/errors.hpp"
#include "disaster/special_functions.hpp"

using namespace disaster;

namespace {

// Plain partial sum of a hypergeometric series, no tail handling.
double brute_2f1(double a, double b, double c, double z, int terms) {
    long double t = 1, s = 1;
    for (int k = 0; k < terms; ++k) {
        t *= (a + k) * (b + k) / ((c + k) * (k + 1.0L)) * z;
        s += t;
    }
    return static_cast<double>(s);
}

}  // namespace

TEST_CASE("log gamma against the standard library") {
    for (double x = 0.05; x <= 50; x += 0.173)
        CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-12));
    CHECK(gamma_fn(5) == doctest::Approx(24).epsilon(1e-13));
    CHECK(gamma_fn(-0.5) == doctest::Approx(-2 * std::sqrt(std::numbers::pi)).epsilon(1e-12));
    CHECK(gamma_sign(-0.5) == -1);
    CHECK(gamma_sign(-1.5) == 1);
}

TEST_CASE("Gauss hypergeometric series") {
    CHECK(gauss_2f1(1, 2, 2, 0.5).value == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(gauss_2f1(0.3, 0, 1.7, 0.9).value == 1.0);
    auto v = gauss_2f1(1, 1, 3, 0.9);
    CHECK(v.value == doctest::Approx(brute_2f1(1, 1, 3, 0.9, 1'000'000)).epsilon(1e-11));
    CHECK(v.tail_bound <= 1e-11);
    CHECK(gauss_2f1(1, 1, 3, 0.0).value == 1.0);
}

TEST_CASE("Gauss summation at z = 1") {
    CHECK(gauss_2f1_at_one(1, 1, 3) == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(gauss_2f1_at_one(0.7, 0, 2.1) == doctest::Approx(1.0).epsilon(1e-13));
    double expected = gamma_fn(3) * gamma_fn(1.5) / (gamma_fn(2) * gamma_fn(2.5));
    CHECK(gauss_2f1_at_one(1, 0.5, 3) == doctest::Approx(expected).epsilon(1e-13));
    // Richardson extrapolation of z -> 1- limits, error O(1-z)
    double h = 1e-4;
    double r = 2 * gauss_2f1(1, 0.5, 3, 1 - h).value - gauss_2f1(1, 0.5, 3, 1 - 2 * h).value;
    CHECK(r == doctest::Approx(expected).epsilon(1e-6));
    CHECK_THROWS_AS(gauss_2f1_at_one(1, 1, 2), DivergentSeries);
}

TEST_CASE("polylogarithm") {
    CHECK(polylog(1, 0.5).value == doctest::Approx(std::log(2.0)).epsilon(1e-11));
    CHECK(polylog(2.5, 0).value == 0.0);
    auto dilog = [](double z) {
        auto f = [](double t) { return t == 0 ? 1.0 : -std::log1p(-t) / t; };
        return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, z, 10, 1e-14);
    };
    CHECK(polylog(2, 0.5).value == doctest::Approx(dilog(0.5)).epsilon(1e-12));
    CHECK(polylog(2, 0.5).value ==
          doctest::Approx(std::numbers::pi * std::numbers::pi / 12 - std::log(2.0) * std::log(2.0) / 2).epsilon(1e-11));
    CHECK(polylog(2, 1).value == doctest::Approx(zeta(2)).epsilon(1e-14));
    CHECK_THROWS_AS(polylog(1, 1), DivergentSeries);
}

TEST_CASE("polylog derivative recursion z Li_s'(z) = Li_{s-1}(z)") {
    for (double s : {0.5, 1.5, 2.0, 3.0})
        for (double z : {0.2, 0.5, 0.8}) {
            double h = 1e-5;
            double d = (polylog(s, z + h).value - polylog(s, z - h).value) / (2 * h);
            CHECK(z * d == doctest::Approx(polylog(s - 1, z).value).epsilon(1e-5));
        }
}

TEST_CASE("zeta") {
    double pi = std::numbers::pi;
    CHECK(zeta(2) == doctest::Approx(pi * pi / 6).epsilon(1e-15));
    CHECK(zeta(4) == doctest::Approx(pi * pi * pi * pi / 90).epsilon(1e-15));
    CHECK(zeta(3) == doctest::Approx(1.2020569031595942).epsilon(1e-15));
    // 10^8 terms summed in long double, then an Euler-Maclaurin tail
    long double s = 0;
    const long N = 100'000'000;
    for (long n = N; n >= 1; --n) s += 1.0L / (n * std::sqrt(static_cast<long double>(n)));
    long double n1 = N + 1;
    long double tail = 2 / std::sqrt(n1) + 0.5L / (n1 * std::sqrt(n1)) + 1.5L / 12 / (n1 * n1 * std::sqrt(n1));
    CHECK(zeta(1.5) == doctest::Approx(static_cast<double>(s + tail)).epsilon(1e-12));
    CHECK(std::fabs(zeta(1.5) - static_cast<double>(s + tail)) < 1e-8);
}

TEST_CASE("zeta tail") {
    CHECK(zeta_tail(2, 1) == doctest::Approx(zeta(2)).epsilon(1e-15));
    double head = 1 + 0.25 + 1.0 / 9;
    CHECK(zeta_tail(2, 4) == doctest::Approx(zeta(2) - head).epsilon(1e-13));
    CHECK(zeta_tail(3, 1e6) == doctest::Approx(0.5e-12).epsilon(1e-5));
}

TEST_CASE("L_nu") {
    CHECK(l_nu(0, 0.5).value == doctest::Approx(std::log(2.0)).epsilon(1e-11));
    CHECK(l_nu(2.5, 0).value == 0.0);
    long double s = 0, zn = 1;
    for (int n = 1; n <= 1'000'000; ++n) {
        zn *= 0.9L;
        s += zn / (1 + n);
    }
    CHECK(l_nu(1, 0.9).value == doctest::Approx(static_cast<double>(s)).epsilon(1e-12));
}

TEST_CASE("excursion pgf identity at alpha = 1") {
    for (double nu : {0.5, 1.0, 3.0})
        for (int i = 1; i <= 9; ++i) {
            double z = i / 10.0;
            double lhs = z / (nu + 1) * gauss_2f1(1, nu, nu + 2, z).value;
            double rhs = z - nu * l_nu(nu, z).value * (1 - z);
            CHECK(std::fabs(lhs - rhs) < 1e-8);
        }
}

TEST_CASE("special functions are nondecreasing in z") {
    double prev[4] = {-1, -1, -1, -1};
    for (int i = 0; i < 100; ++i) {
        double z = i / 100.0;
        double v[4] = {gauss_2f1(1, 0.5, 2.5, z).value, polylog(1.5, z).value, l_nu(0.7, z).value,
                       polylog(0.5, z).value};
        for (int k = 0; k < 4; ++k) {
            CHECK(v[k] >= prev[k]);
            prev[k] = v[k];
        }
    }
}

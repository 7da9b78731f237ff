#pragma once

#include <cstdint>

namespace disaster {

// Truncated positive series: `tail_bound` bounds |value - exact sum| rigorously
// (up to rounding in the partial sum itself).
struct SeriesValue {
    double value = 0.0;
    std::int64_t terms_used = 0;
    double tail_bound = 0.0;
};

constexpr double kSeriesTolerance = 1e-12;
constexpr std::int64_t kSeriesTermCap = 10'000'000;

// log|Gamma(x)| by a Lanczos sum (g = 671/128, 14 terms); reflection for x < 0.
double log_gamma(double x);
// Sign of Gamma(x); +1 for x > 0.
int gamma_sign(double x);
double gamma_fn(double x);

SeriesValue gauss_2f1(double a, double b, double c, double z, double tol = kSeriesTolerance);
// Gamma(c)Gamma(c-a-b)/(Gamma(c-a)Gamma(c-b)); throws DivergentSeries when c-a-b <= 0.
double gauss_2f1_at_one(double a, double b, double c);

// Li_s(z) = sum_{k>=1} z^k / k^s on [0,1]; z = 1 needs s > 1.
SeriesValue polylog(double s, double z, double tol = kSeriesTolerance);

// Riemann zeta for s > 1 (Euler-Maclaurin).
double zeta(double s);
// sum_{n >= n0} n^-s for s > 1, n0 >= 1.
double zeta_tail(double s, double n0);

// L_nu(z) = sum_{n>=1} z^n / (nu + n).
SeriesValue l_nu(double nu, double z, double tol = kSeriesTolerance);

}  // namespace disaster

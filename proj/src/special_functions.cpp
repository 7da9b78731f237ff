#include "disaster/special_functions.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include "disaster/errors.hpp"

namespace disaster {

namespace {

constexpr std::array<double, 14> kLanczos = {
    57.1562356658629235,     -59.5979603554754912,    14.1360979747417471,
    -0.491913816097620199,   .339946499848118887e-4,  .465236289270485756e-4,
    -.983744753048795646e-4, .158088703224912494e-3,  -.210264441724104883e-3,
    .217439618115212643e-3,  -.164318106536763890e-3, .844182239838527433e-4,
    -.261908384015814087e-4, .368991826595316234e-5};

double log_gamma_positive(double x) {
    double y = x;
    double tmp = x + 5.24218750000000000;
    tmp = (x + 0.5) * std::log(tmp) - tmp;
    double ser = 0.999999999999997092;
    for (double c : kLanczos) ser += c / ++y;
    return tmp + std::log(2.5066282746310005 * ser / x);
}

bool nonpositive_integer(double x) { return x <= 0 && x == std::floor(x); }

// B_{2k} / (2k)! for k = 1..8
constexpr std::array<double, 8> kBernoulliOverFactorial = {
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40320.0,
    5.0 / 66.0 / 3628800.0,
    -691.0 / 2730.0 / 479001600.0,
    7.0 / 6.0 / 87178291200.0,
    -3617.0 / 510.0 / 20922789888000.0};

// sum_{n >= N} n^-s via Euler-Maclaurin anchored at integer N.
double euler_maclaurin_tail(double s, double N) {
    double logN = std::log(N);
    double nps = std::exp(-s * logN);
    double sum = N * nps / (s - 1.0) + 0.5 * nps;
    double rising = s;
    double power = nps / N;
    for (std::size_t k = 0; k < kBernoulliOverFactorial.size(); ++k) {
        sum += kBernoulliOverFactorial[k] * rising * power;
        rising *= (s + 2.0 * k + 1.0) * (s + 2.0 * k + 2.0);
        power /= N * N;
    }
    return sum;
}

constexpr double kEulerMaclaurinStart = 32.0;

}  // namespace

double log_gamma(double x) {
    if (nonpositive_integer(x)) throw InvalidParameter("x not a nonpositive integer", "log_gamma pole");
    if (x > 0) return log_gamma_positive(x);
    double s = std::sin(std::numbers::pi * x);
    return std::log(std::numbers::pi / std::fabs(s)) - log_gamma_positive(1.0 - x);
}

int gamma_sign(double x) {
    if (x > 0) return 1;
    if (nonpositive_integer(x)) throw InvalidParameter("x not a nonpositive integer", "gamma pole");
    return static_cast<long long>(std::floor(x)) % 2 == 0 ? 1 : -1;
}

double gamma_fn(double x) { return gamma_sign(x) * std::exp(log_gamma(x)); }

SeriesValue gauss_2f1(double a, double b, double c, double z, double tol) {
    if (nonpositive_integer(c)) throw InvalidParameter("c not a nonpositive integer", "");
    if (!(z >= 0 && z <= 1)) throw InvalidParameter("z in [0,1]", "");
    if (z == 1) return {gauss_2f1_at_one(a, b, c), 0, 0.0};
    SeriesValue out{1.0, 1, 0.0};
    if (z == 0) return out;
    double term = 1.0;
    double sum = 1.0;
    double A = std::fabs(a + b - c - 1.0);
    double B = std::fabs(a * b - c);
    // past `settle` every factor (a+n),(b+n),(c+n) is positive
    double settle = std::max({0.0, -a, -b, -c}) + 1.0;
    for (std::int64_t n = 0; n < kSeriesTermCap; ++n) {
        double nd = static_cast<double>(n);
        term *= (a + nd) * (b + nd) / ((c + nd) * (nd + 1.0)) * z;
        sum += term;
        out.terms_used = n + 2;
        if (term == 0.0) {
            out.value = sum;
            out.tail_bound = 0.0;
            return out;
        }
        double m = nd + 2.0;
        if (m > settle && m + std::min(c, 0.0) > 0) {
            double rho = z * (1.0 + (A * m + B) / ((m + std::min(c, 0.0)) * (m + 1.0)));
            if (rho < 1.0) {
                double next = std::fabs(term * (a + nd + 1.0) * (b + nd + 1.0) /
                                        ((c + nd + 1.0) * (nd + 2.0)) * z);
                double bound = next / (1.0 - rho);
                if (bound <= tol) {
                    out.value = sum;
                    out.tail_bound = bound;
                    return out;
                }
                out.tail_bound = bound;
            }
        }
    }
    out.value = sum;
    return out;
}

double gauss_2f1_at_one(double a, double b, double c) {
    double e = c - a - b;
    if (!(e > 0)) throw DivergentSeries("2F1 at z=1 diverges unless c-a-b > 0");
    if (a == 0 || b == 0) return 1.0;
    if (nonpositive_integer(c - a) || nonpositive_integer(c - b)) return 0.0;
    double lg = log_gamma(c) + log_gamma(e) - log_gamma(c - a) - log_gamma(c - b);
    int sign = gamma_sign(c) * gamma_sign(e) * gamma_sign(c - a) * gamma_sign(c - b);
    return sign * std::exp(lg);
}

SeriesValue polylog(double s, double z, double tol) {
    if (!(z >= 0 && z <= 1)) throw InvalidParameter("z in [0,1]", "");
    if (z == 1) {
        if (!(s > 1)) throw DivergentSeries("Li_s(1) diverges unless s > 1");
        return {zeta(s), 0, 0.0};
    }
    SeriesValue out;
    if (z == 0) return out;
    double sum = 0.0;
    double zk = 1.0;
    for (std::int64_t k = 1; k <= kSeriesTermCap; ++k) {
        zk *= z;
        double kd = static_cast<double>(k);
        sum += zk * std::exp(-s * std::log(kd));
        out.terms_used = k;
        double next = zk * z * std::exp(-s * std::log(kd + 1.0));
        double rho = s >= 0 ? z : z * std::exp(-s * std::log1p(1.0 / (kd + 1.0)));
        if (rho < 1.0) {
            double bound = next / (1.0 - rho);
            out.tail_bound = bound;
            if (bound <= tol) break;
        }
    }
    out.value = sum;
    return out;
}

double zeta(double s) {
    if (!(s > 1)) throw InvalidParameter("s > 1", "zeta");
    return zeta_tail(s, 1.0);
}

double zeta_tail(double s, double n0) {
    if (!(s > 1)) throw InvalidParameter("s > 1", "zeta_tail");
    if (!(n0 >= 1) || n0 != std::floor(n0)) throw InvalidParameter("n0 positive integer", "");
    if (n0 >= kEulerMaclaurinStart) return euler_maclaurin_tail(s, n0);
    double head = 0.0;
    for (double n = kEulerMaclaurinStart - 1.0; n >= n0; n -= 1.0) head += std::exp(-s * std::log(n));
    return euler_maclaurin_tail(s, kEulerMaclaurinStart) + head;
}

SeriesValue l_nu(double nu, double z, double tol) {
    if (!(nu > -1)) throw InvalidParameter("nu > -1", "");
    if (!(z >= 0 && z < 1)) throw InvalidParameter("z in [0,1)", "");
    SeriesValue out;
    if (z == 0) return out;
    double sum = 0.0;
    double zn = 1.0;
    for (std::int64_t n = 1; n <= kSeriesTermCap; ++n) {
        zn *= z;
        sum += zn / (nu + static_cast<double>(n));
        out.terms_used = n;
        double bound = zn * z / (nu + static_cast<double>(n) + 1.0) / (1.0 - z);
        out.tail_bound = bound;
        if (bound <= tol) break;
    }
    out.value = sum;
    return out;
}

}  // namespace disaster

#include "disaster/products.hpp"

#include <cmath>
#include <limits>

#include "disaster/errors.hpp"
#include "disaster/pmf.hpp"
#include "disaster/power_series.hpp"
#include "disaster/special_functions.hpp"

namespace disaster {

std::vector<double> log_growth_products(const ModelSpec& spec, std::size_t n) {
    std::vector<double> L(n + 1);
    CompensatedSum acc;
    L[0] = 0.0;
    for (std::size_t x = 1; x <= n; ++x) {
        acc += log_growth_prob(spec, x - 1);
        L[x] = acc.value();
    }
    return L;
}

double log_growth_range(const ModelSpec& spec, std::uint64_t from, std::uint64_t to) {
    CompensatedSum acc;
    for (std::uint64_t y = from; y < to; ++y) acc += log_growth_prob(spec, y);
    return acc.value();
}

std::vector<double> disaster_series(const ModelSpec& spec, std::size_t K) {
    std::vector<double> b(K + 1, 0.0);
    if (spec.kind == ModelKind::A) {
        // alpha w / (1 + nu w)
        double nu = spec.nu_or_zero();
        double c = spec.alpha;
        for (std::size_t m = 1; m <= K; ++m) {
            b[m] = c;
            c *= -nu;
        }
    } else {
        // 1 - (1+w)^-alpha = -sum_m C(-alpha, m) w^m
        double binom = 1.0;
        for (std::size_t m = 1; m <= K; ++m) {
            binom *= (-spec.alpha - static_cast<double>(m - 1)) / static_cast<double>(m);
            b[m] = -binom;
        }
    }
    return b;
}

std::vector<double> neg_log_growth_series(const ModelSpec& spec, std::size_t K) {
    std::vector<double> a(K + 1, 0.0);
    if (spec.kind == ModelKind::B) {
        for (std::size_t m = 1; m <= K; ++m)
            a[m] = spec.alpha * (m % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(m);
        return a;
    }
    std::vector<double> b = disaster_series(spec, K);
    std::vector<double> one_minus_q(K + 1);
    one_minus_q[0] = 1.0;
    for (std::size_t m = 1; m <= K; ++m) one_minus_q[m] = -b[m];
    PowerSeries L = log_series(PowerSeries(one_minus_q), K + 1);
    for (std::size_t m = 1; m <= K; ++m) a[m] = -L.coeffs[m];
    return a;
}

BoundedValue log_tail_product(const ModelSpec& spec, std::uint64_t from) {
    if (!(spec.beta > 1)) return {-std::numeric_limits<double>::infinity(), 0.0};
    if (from == 0) {
        BoundedValue rest = log_tail_product(spec, 1);
        return {rest.value + std::log(spec.p0), rest.error_bound};
    }
    // direct sum up to Y, convergent w-expansion beyond
    std::uint64_t Y = std::max<std::uint64_t>(from, 4096);
    double nu = spec.kind == ModelKind::A ? std::fabs(spec.nu_or_zero()) : 0.0;
    while (nu * std::pow(static_cast<double>(Y), -spec.beta) > 0.25) Y *= 2;
    double head = from <= Y ? log_growth_range(spec, from, Y + 1) : 0.0;
    constexpr std::size_t K = 12;
    std::vector<double> a = neg_log_growth_series(spec, K);
    double tail = 0.0;
    double last = 0.0;
    for (std::size_t m = 1; m <= K; ++m) {
        double term = a[m] * zeta_tail(spec.beta * static_cast<double>(m), static_cast<double>(Y + 1));
        tail += term;
        last = std::fabs(term);
    }
    double err = 2.0 * last + 1e-16 * (std::fabs(head) + std::fabs(tail));
    return {head - tail, err};
}

double power_tail_sum(double s, const std::vector<double>& d, double n0) {
    CompensatedSum acc;
    for (std::size_t k = 0; k < d.size(); ++k)
        if (d[k] != 0.0) acc += d[k] * zeta_tail(s + static_cast<double>(k), n0);
    return acc.value();
}

std::vector<double> bernoulli_numbers(std::size_t n) {
    std::vector<double> B(n + 1, 0.0);
    B[0] = 1.0;
    for (std::size_t m = 1; m <= n; ++m) {
        // sum_{j=0}^{m} C(m+1, j) B_j = 0
        double s = 0.0;
        double c = 1.0;  // C(m+1, 0)
        for (std::size_t j = 0; j < m; ++j) {
            s += c * B[j];
            c = c * static_cast<double>(m + 1 - j) / static_cast<double>(j + 1);
        }
        B[m] = -s / static_cast<double>(m + 1);
    }
    return B;
}

namespace {

double bernoulli_poly(const std::vector<double>& B, std::size_t n, double a) {
    double s = 0.0;
    double c = 1.0;
    for (std::size_t j = 0; j <= n; ++j) {
        s += c * B[j] * std::pow(a, static_cast<double>(n - j));
        c = c * static_cast<double>(n - j) / static_cast<double>(j + 1);
    }
    return s;
}

}  // namespace

std::vector<double> log_gamma_ratio_expansion(double a, double b, std::size_t K) {
    std::vector<double> B = bernoulli_numbers(K + 1);
    std::vector<double> e(K + 1, 0.0);
    for (std::size_t k = 1; k <= K; ++k) {
        double diff = bernoulli_poly(B, k + 1, a) - bernoulli_poly(B, k + 1, b);
        double sign = k % 2 == 1 ? 1.0 : -1.0;
        e[k] = sign * diff / (static_cast<double>(k) * static_cast<double>(k + 1));
    }
    return e;
}

double stretched_tail_ratio_bound(const ModelSpec& spec, std::uint64_t X, double lambda) {
    if (X == 0) return std::numeric_limits<double>::infinity();
    double Xd = static_cast<double>(X);
    double c;
    if (spec.kind == ModelKind::A) {
        double qX = disaster_prob(spec, X);
        c = std::min(spec.alpha, qX * std::pow(Xd, spec.beta));
    } else {
        double w = std::pow(Xd, -spec.beta);
        c = spec.alpha * std::log1p(w) / w;
    }
    double m = std::max(0.0, -lambda);
    double D = c * std::pow(Xd, 1.0 - spec.beta) - m - spec.beta;
    if (!(D > 0)) return std::numeric_limits<double>::infinity();
    return Xd / D;
}

}  // namespace disaster

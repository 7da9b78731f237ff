#pragma once

#include <cstdint>
#include <vector>

#include "disaster/model.hpp"

namespace disaster {

// L[x] = log prod_{y<x} p_y for x = 0..n (so L[0] = 0, L[1] = log p0).
std::vector<double> log_growth_products(const ModelSpec& spec, std::size_t n);
// log prod_{y=from}^{to-1} p_y.
double log_growth_range(const ModelSpec& spec, std::uint64_t from, std::uint64_t to);

struct BoundedValue {
    double value;
    double error_bound;
};

// log prod_{y >= from} p_y.  Finite only for beta > 1; -inf otherwise.
BoundedValue log_tail_product(const ModelSpec& spec, std::uint64_t from);

// Coefficients a_1..a_K with -log p_y = sum_m a_m w^m, w = y^-beta (y >= 1).
std::vector<double> neg_log_growth_series(const ModelSpec& spec, std::size_t K);
// Coefficients b_1..b_K with q_y = sum_m b_m w^m.
std::vector<double> disaster_series(const ModelSpec& spec, std::size_t K);

// sum_{x >= n0} x^-s * sum_k d[k] x^-k  (asymptotic when d is a divergent expansion).
double power_tail_sum(double s, const std::vector<double>& d, double n0);

// Bernoulli numbers B_0..B_n with B_1 = -1/2.
std::vector<double> bernoulli_numbers(std::size_t n);
// e_1..e_K with log Gamma(x+a) - log Gamma(x+b) ~ (a-b) log x + sum_k e_k x^-k.
std::vector<double> log_gamma_ratio_expansion(double a, double b, std::size_t K);

// Upper bound on sum_{x > X} t_x (x+1)^-lambda / ((X+1)^-lambda t_X) for beta < 1,
// where t_x = prod_{y<x} p_y.  Returns +inf if X is too small for the bound.
double stretched_tail_ratio_bound(const ModelSpec& spec, std::uint64_t X, double lambda);

}  // namespace disaster

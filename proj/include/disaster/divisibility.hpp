#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "disaster/model.hpp"
#include "disaster/pmf.hpp"

namespace disaster {

// r_x with R(z) = (log phi(z))' = sum r_x z^x, i.e. (x+1) pi_{x+1} = sum_{y<=x} pi_y r_{x-y}.
struct CanonicalSequence {
    std::vector<double> r;
    std::vector<double> source;  // pi_0 .. pi_{n+1} used for the inversion
};

CanonicalSequence canonical_sequence(const PmfTable& pmf, std::size_t n);
// pi_0 .. pi_{n+1} rebuilt from pi_0 and r alone.
std::vector<double> reconvolve(const CanonicalSequence& cs);
double round_trip_error(const CanonicalSequence& cs);

struct DivisibilityVerdict {
    bool id = false;
    bool sd = false;
    std::optional<std::size_t> first_violation_index;
    double tolerance_used = 0.0;
    double id_margin = 0.0;  // min_x r_x
    double sd_margin = 0.0;  // max_x (r_{x+1} - r_x)
    bool inconclusive = false;
};

constexpr double kDivisibilityTolerance = 1e-9;

DivisibilityVerdict classify_divisibility(const PmfTable& pmf, std::size_t n, double tol = kDivisibilityTolerance);

struct MonotonicityCheck {
    bool pass = true;
    // (order k, index x) of the first negative (-1)^k Delta^k F(x)
    std::optional<std::pair<std::size_t, std::size_t>> first_violation;
};

MonotonicityCheck complete_monotonicity_check(const std::vector<double>& tail, std::size_t kmax,
                                              double tol = 1e-12);

struct ThinningRemainder {
    std::vector<double> coeffs;
    double truncation_error_bound = 0.0;
    bool valid_pgf = false;
};

// Coefficients of phi(z) / phi(1 - u(1 - z)) up to z^n.
ThinningRemainder thinning_remainder(const PmfTable& pmf, double u, std::size_t n);

struct SibuyaSpecialCase {
    double alpha = 0.0;
    double p0 = 0.0;
    double pi0 = 0.0;
    double id_threshold = 0.0;  // 2 - alpha
    double sd_threshold = 0.0;  // 1 - alpha/2
    bool id = false;
    bool sd = false;
    std::function<double(double)> pgf;
    PmfTable pmf;
    DivisibilityVerdict numeric;
    bool agrees = false;
};

// Stationary law of Model A with nu = 1, beta = 1 and 1 < alpha < 2:
// E z^X = 1 - (1 - pi0)(1 - z)^(alpha - 1).
SibuyaSpecialCase sibuya_stationary_special_case(double alpha, double p0, std::size_t n = 400);
PmfTable sibuya_stationary_pmf(double alpha, double p0, std::size_t n);

// Law of X_inf - 1 given X_inf >= 1 (shifted extended Sibuya / shifted Zipf).
PmfTable shifted_conditional_stationary(const ModelSpec& spec, std::size_t n);
// Law of P - 1 for the discrete Pareto P(P > x) = (x+1)^-alpha.
PmfTable pareto_shifted_pmf(double alpha, std::size_t n);
bool log_convex(const PmfTable& pmf, std::size_t n);

}  // namespace disaster

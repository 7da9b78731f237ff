#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "disaster/model.hpp"

namespace disaster {

// Sum of independent Exp(r_0), ..., Exp(r_h): the CT length of an excursion of
// height h.  weights c_x = prod_{y != x} r_y / (r_y - r_x), so that
// P(T > t) = sum_x c_x exp(-r_x t).
struct HypoexpLaw {
    std::vector<double> rates;
    std::vector<double> weights;
    // |sum of weights - 1| evaluated in 50-digit arithmetic
    double weight_sum_error = 0.0;
};

HypoexpLaw hypoexp_law(const ModelSpec& spec, std::size_t h);

struct SurvivalValue {
    double value;
    bool used_fallback;
};

SurvivalValue excursion_survival_detail(const ModelSpec& spec, std::size_t h, double t);
double excursion_survival_given_height(const ModelSpec& spec, std::size_t h, double t);
// Stable evaluation by uniformization; used as the fallback and as an oracle.
double hypoexp_survival_uniformized(const std::vector<double>& rates, double t);

enum class TailKind { PowerLaw, Exponential };

struct TailRegime {
    TailKind kind;
    double exponent;     // PowerLaw: P(T > t) ~ t^-exponent
    double mean_bound;   // Exponential: 1/(r0 (lambda - 1))
    double reciprocal_rate_sum;  // sum_y 1/r_y (finite iff lambda > 1)
};

TailRegime ct_excursion_tail_exponent(const ModelSpec& spec);

struct ExplosionReport {
    bool explosive = false;
    Recurrence recurrence = Recurrence::PositiveRecurrent;
    // (N, sum_{x<=N} 1/r_x)
    std::vector<std::pair<std::uint64_t, double>> reciprocal_rate_partial_sums;
    std::optional<double> reciprocal_rate_sum;
    // P(tau_00 < inf); N_e ~ Geometric: P(N_e = k) = (1 - phi00) phi00^k
    std::optional<double> return_probability;
    std::string post_drift_description;

    double ne_pmf(std::uint64_t k) const;
};

ExplosionReport explosion_report(const ModelSpec& spec);

}  // namespace disaster

#pragma once

#include <optional>

#include "disaster/model.hpp"
#include "disaster/pmf.hpp"

namespace disaster {

// C1 = sum_{y>=1} q_y; C2 = sum_{x>=1} prod_{y<x} p_y; the CT variant weights
// the C2 terms by (x+1)^-lambda.  A proper invariant law needs C1 = inf, C2 < inf.
struct CriterionReport {
    bool c1_finite = false;
    bool c2_finite = false;
    std::optional<double> c2_value;
    double c2_error_bound = 0.0;
    std::optional<bool> ct_c2_finite;
    std::optional<double> ct_c2_value;
};

CriterionReport criteria(const ModelSpec& spec);

// sum_{x > X} prod_{y<x} p_y (x+1)^-lambda; X = 0 gives the full C2-type sum.
// Requires that sum to be finite.
double weighted_mass_tail(const ModelSpec& spec, double lambda, std::uint64_t X);

PmfTable invariant_dt(const ModelSpec& spec, std::size_t xmax);
PmfTable invariant_ct(const ModelSpec& spec, std::size_t xmax);

// pi_0 of the DT chain (positive recurrent only).
double stationary_atom(const ModelSpec& spec);
// psi_inf(z) = E z^{Y_inf}, the law of X_inf given X_inf >= 1 (beta = 1).
double stationary_conditional_pgf(const ModelSpec& spec, double z);
// E z^{X_inf} = pi_0 + (1 - pi_0) psi_inf(z).
double stationary_pgf(const ModelSpec& spec, double z);

// E(Y^q) = zeta(alpha - q)/zeta(alpha) for the Zipf law x^-alpha/zeta(alpha).
double zipf_moment(double alpha, double q);

}  // namespace disaster

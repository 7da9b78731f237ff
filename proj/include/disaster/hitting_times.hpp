#pragma once

#include <cstdint>
#include <vector>

#include "disaster/model.hpp"
#include "disaster/pmf.hpp"
#include "disaster/power_series.hpp"
#include "disaster/products.hpp"

namespace disaster {

// Law of tau_00 on {1,...,xmax+1}; `defect` = P(tau_00 = inf).
PmfTable return_time_pmf(const ModelSpec& spec, std::size_t xmax);
// P(tau_00 > x), including the mass at infinity.
double return_time_tail(const ModelSpec& spec, std::uint64_t x);

struct PgfValue {
    double value;
    bool closed_form;
    double tail_bound;
};

// psi_0(z): pgf of the excursion length after a first step up (beta = 1 closed form).
double excursion_psi0(const ModelSpec& spec, double z);
PgfValue return_time_pgf(const ModelSpec& spec, double z);
// +inf unless positive recurrent.
double mean_return_time(const ModelSpec& spec);

double sibuya_pmf(double alpha, double nu, std::uint64_t x);
std::vector<double> sibuya_pmf_table(double alpha, double nu, std::size_t n);
double pareto_pmf(double alpha, std::uint64_t x);

double scale_function(const ModelSpec& spec, std::uint64_t x);
double log_scale_function(const ModelSpec& spec, std::uint64_t x);

struct HeightLaw {
    double atom_at_zero;
    PmfTable masses;  // h >= 1
};
HeightLaw height_law(const ModelSpec& spec, std::size_t hmax);
// P(H >= h) = 1/phi(h).
double height_tail(const ModelSpec& spec, std::uint64_t h);

double extinction_prob(const ModelSpec& spec, std::uint64_t x);
BoundedValue extinction_prob_bounded(const ModelSpec& spec, std::uint64_t x);

PmfTable first_passage_down_pmf(const ModelSpec& spec, std::uint64_t x, std::size_t kmax);
PgfValue first_passage_down_pgf(const ModelSpec& spec, std::uint64_t x, double z);

// Coefficients f_k = P(tau_00 = k), k < order.
PowerSeries return_time_series(const ModelSpec& spec, std::size_t order);
PowerSeries green_diag(const ModelSpec& spec, std::uint64_t x, std::size_t order);
PowerSeries green_kernel(const ModelSpec& spec, std::uint64_t x, std::uint64_t y, std::size_t order);
// phi_{x,y}(z) = g_{x,y}(z)/g_{y,y}(z) as a series.
PowerSeries first_passage_series(const ModelSpec& spec, std::uint64_t x, std::uint64_t y, std::size_t order);

double first_return_pgf_at(const ModelSpec& spec, std::uint64_t x, double z);

// u_n = P_0(X_n = 0), n = 0..nmax.
std::vector<double> contact_probability(const ModelSpec& spec, std::size_t nmax);

enum class ContactRegime { Constant, Logarithmic, Algebraic };

struct ContactAsymptote {
    ContactRegime regime;
    double constant;
    double exponent;  // u_n ~ constant * n^-exponent (Algebraic)
    double operator()(double n) const;
};
ContactAsymptote contact_asymptote(const ModelSpec& spec);

std::string to_string(ContactRegime r);

}  // namespace disaster

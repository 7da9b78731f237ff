#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace disaster {

// Coefficients c_0..c_{n-1} of a formal power series truncated at order n.
struct PowerSeries {
    std::vector<double> coeffs;
    std::string radius_note;
    std::size_t truncation_order = 0;

    PowerSeries() = default;
    explicit PowerSeries(std::vector<double> c, std::string note = {});

    std::size_t size() const { return coeffs.size(); }
    double operator[](std::size_t i) const { return i < coeffs.size() ? coeffs[i] : 0.0; }
    // Horner evaluation of the truncated polynomial.
    double eval(double z) const;
};

PowerSeries truncate(const PowerSeries& a, std::size_t order);
PowerSeries add(const PowerSeries& a, const PowerSeries& b, double scale_b = 1.0);
PowerSeries multiply(const PowerSeries& a, const PowerSeries& b, std::size_t order);
// a / b with b_0 != 0, by coefficient recursion.
PowerSeries divide(const PowerSeries& a, const PowerSeries& b, std::size_t order);
// exp(a) for a with a_0 = 0, via n e_n = sum k a_k e_{n-k}.
PowerSeries exp_series(const PowerSeries& a, std::size_t order);
// log(a) for a with a_0 = 1.
PowerSeries log_series(const PowerSeries& a, std::size_t order);
// Multiply by z^k.
PowerSeries shift(const PowerSeries& a, std::size_t k, std::size_t order);

}  // namespace disaster

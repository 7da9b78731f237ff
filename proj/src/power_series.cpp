#include "disaster/power_series.hpp"

#include <algorithm>
#include <stdexcept>

#include "disaster/errors.hpp"

namespace disaster {

PowerSeries::PowerSeries(std::vector<double> c, std::string note)
    : coeffs(std::move(c)), radius_note(std::move(note)), truncation_order(coeffs.size()) {}

double PowerSeries::eval(double z) const {
    double acc = 0.0;
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

PowerSeries truncate(const PowerSeries& a, std::size_t order) {
    std::vector<double> c(order, 0.0);
    std::copy_n(a.coeffs.begin(), std::min(order, a.size()), c.begin());
    return PowerSeries(std::move(c), a.radius_note);
}

PowerSeries add(const PowerSeries& a, const PowerSeries& b, double scale_b) {
    std::size_t n = std::max(a.size(), b.size());
    std::vector<double> c(n);
    for (std::size_t i = 0; i < n; ++i) c[i] = a[i] + scale_b * b[i];
    return PowerSeries(std::move(c));
}

PowerSeries multiply(const PowerSeries& a, const PowerSeries& b, std::size_t order) {
    std::vector<double> c(order, 0.0);
    std::size_t na = std::min(order, a.size());
    for (std::size_t i = 0; i < na; ++i) {
        if (a.coeffs[i] == 0.0) continue;
        std::size_t nb = std::min(order - i, b.size());
        for (std::size_t j = 0; j < nb; ++j) c[i + j] += a.coeffs[i] * b.coeffs[j];
    }
    return PowerSeries(std::move(c));
}

PowerSeries divide(const PowerSeries& a, const PowerSeries& b, std::size_t order) {
    if (b.size() == 0 || b.coeffs[0] == 0.0)
        throw InvalidParameter("b_0 != 0", "power series division");
    std::vector<double> c(order, 0.0);
    double b0 = b.coeffs[0];
    for (std::size_t n = 0; n < order; ++n) {
        double s = a[n];
        std::size_t kmax = std::min(n, b.size() - 1);
        for (std::size_t k = 1; k <= kmax; ++k) s -= b.coeffs[k] * c[n - k];
        c[n] = s / b0;
    }
    return PowerSeries(std::move(c));
}

PowerSeries exp_series(const PowerSeries& a, std::size_t order) {
    if (a.size() > 0 && a.coeffs[0] != 0.0) throw InvalidParameter("a_0 = 0", "exp_series");
    std::vector<double> e(order, 0.0);
    if (order == 0) return PowerSeries(e);
    e[0] = 1.0;
    for (std::size_t n = 1; n < order; ++n) {
        double s = 0.0;
        std::size_t kmax = std::min(n, a.size() - 1);
        for (std::size_t k = 1; k <= kmax; ++k) s += static_cast<double>(k) * a.coeffs[k] * e[n - k];
        e[n] = s / static_cast<double>(n);
    }
    return PowerSeries(std::move(e));
}

PowerSeries log_series(const PowerSeries& a, std::size_t order) {
    if (a.size() == 0 || a.coeffs[0] != 1.0) throw InvalidParameter("a_0 = 1", "log_series");
    // L' = a'/a  =>  n L_n = n a_n - sum_{k=1}^{n-1} k L_k a_{n-k}
    std::vector<double> L(order, 0.0);
    for (std::size_t n = 1; n < order; ++n) {
        double s = static_cast<double>(n) * a[n];
        for (std::size_t k = 1; k < n; ++k) s -= static_cast<double>(k) * L[k] * a[n - k];
        L[n] = s / static_cast<double>(n);
    }
    return PowerSeries(std::move(L));
}

PowerSeries shift(const PowerSeries& a, std::size_t k, std::size_t order) {
    std::vector<double> c(order, 0.0);
    for (std::size_t i = 0; i + k < order && i < a.size(); ++i) c[i + k] = a.coeffs[i];
    return PowerSeries(std::move(c));
}

}  // namespace disaster

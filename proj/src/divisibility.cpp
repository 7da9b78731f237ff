#include "disaster/divisibility.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "disaster/errors.hpp"
#include "disaster/hitting_times.hpp"
#include "disaster/power_series.hpp"
#include "disaster/stationary.hpp"

namespace disaster {

namespace {

void require_atom(const PmfTable& pmf) {
    if (pmf.support_start != 0) throw InvalidParameter("pmf supported from 0", "");
    if (pmf.masses.empty() || !(pmf.masses[0] > 0))
        throw NotApplicable("a law with no mass at 0 cannot be infinitely divisible");
}

}  // namespace

CanonicalSequence canonical_sequence(const PmfTable& pmf, std::size_t n) {
    require_atom(pmf);
    CanonicalSequence cs;
    cs.source.resize(n + 2);
    for (std::size_t x = 0; x <= n + 1; ++x) cs.source[x] = pmf.at(static_cast<std::int64_t>(x));
    const std::vector<double>& p = cs.source;
    cs.r.resize(n + 1);
    for (std::size_t x = 0; x <= n; ++x) {
        CompensatedSum s;
        s += static_cast<double>(x + 1) * p[x + 1];
        for (std::size_t y = 1; y <= x; ++y) s += -p[y] * cs.r[x - y];
        cs.r[x] = s.value() / p[0];
    }
    return cs;
}

std::vector<double> reconvolve(const CanonicalSequence& cs) {
    std::size_t n = cs.r.size();
    std::vector<double> p(n + 1, 0.0);
    p[0] = cs.source[0];
    for (std::size_t x = 0; x < n; ++x) {
        CompensatedSum s;
        for (std::size_t y = 0; y <= x; ++y) s += p[y] * cs.r[x - y];
        p[x + 1] = s.value() / static_cast<double>(x + 1);
    }
    return p;
}

double round_trip_error(const CanonicalSequence& cs) {
    std::vector<double> p = reconvolve(cs);
    double e = 0.0;
    for (std::size_t x = 0; x < p.size(); ++x) e = std::max(e, std::fabs(p[x] - cs.source[x]));
    return e;
}

DivisibilityVerdict classify_divisibility(const PmfTable& pmf, std::size_t n, double tol) {
    CanonicalSequence cs = canonical_sequence(pmf, n);
    const std::vector<double>& r = cs.r;
    DivisibilityVerdict v;
    double scale = 0.0;
    for (double x : r) scale = std::max(scale, std::fabs(x));
    v.tolerance_used = tol * std::max(scale, 1e-300);
    v.id_margin = *std::min_element(r.begin(), r.end());
    v.sd_margin = -std::numeric_limits<double>::infinity();
    v.id = true;
    for (std::size_t x = 0; x < r.size(); ++x) {
        if (r[x] < -v.tolerance_used) {
            v.id = false;
            v.first_violation_index = x;
            break;
        }
    }
    v.sd = v.id;
    for (std::size_t x = 0; x + 1 < r.size(); ++x) {
        double d = r[x + 1] - r[x];
        v.sd_margin = std::max(v.sd_margin, d);
        if (v.sd && d > v.tolerance_used) {
            v.sd = false;
            if (!v.first_violation_index) v.first_violation_index = x + 1;
        }
    }
    bool id_edge = std::fabs(v.id_margin) <= v.tolerance_used;
    bool sd_edge = v.id && std::fabs(v.sd_margin) <= v.tolerance_used;
    v.inconclusive = id_edge || sd_edge;
    return v;
}

MonotonicityCheck complete_monotonicity_check(const std::vector<double>& tail, std::size_t kmax, double tol) {
    MonotonicityCheck out;
    std::vector<double> d = tail;
    for (std::size_t k = 0; k <= kmax && !d.empty(); ++k) {
        double sign = k % 2 == 0 ? 1.0 : -1.0;
        for (std::size_t x = 0; x < d.size(); ++x) {
            if (sign * d[x] < -tol) {
                out.pass = false;
                out.first_violation = {k, x};
                return out;
            }
        }
        for (std::size_t x = 0; x + 1 < d.size(); ++x) d[x] = d[x + 1] - d[x];
        d.pop_back();
    }
    return out;
}

ThinningRemainder thinning_remainder(const PmfTable& pmf, double u, std::size_t n) {
    require_atom(pmf);
    if (!(u > 0 && u < 1)) throw InvalidParameter("u in (0,1)", "thinning");
    std::size_t N = pmf.masses.size() - 1;
    double lu = std::log(u);
    double l1u = std::log1p(-u);
    std::vector<double> thinned(n + 1, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        CompensatedSum s;
        for (std::size_t k = j; k <= N; ++k) {
            double lb = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) +
                        static_cast<double>(j) * lu + static_cast<double>(k - j) * l1u;
            s += pmf.masses[k] * std::exp(lb);
        }
        thinned[j] = s.value();
    }
    std::vector<double> head(n + 1, 0.0);
    for (std::size_t j = 0; j <= n; ++j) head[j] = pmf.at(static_cast<std::int64_t>(j));
    PowerSeries rem = divide(PowerSeries(head), PowerSeries(thinned), n + 1);
    ThinningRemainder out;
    out.coeffs = rem.coeffs;
    // Mass beyond the table perturbs thinned[j] by at most m_j; propagate to
    // first order through the division: delta rem = -rem * delta thinned / thinned.
    std::vector<double> miss(n + 1, 0.0);
    for (std::size_t j = 0; j <= n; ++j) {
        double k = std::max(static_cast<double>(N + 1), std::floor(static_cast<double>(j) / u));
        double lb = std::lgamma(k + 1.0) - std::lgamma(j + 1.0) - std::lgamma(k - j + 1.0) +
                    static_cast<double>(j) * lu + (k - static_cast<double>(j)) * l1u;
        miss[j] = pmf.tail_mass_bound * std::exp(lb);
    }
    PowerSeries inv = divide(PowerSeries({1.0}), PowerSeries(thinned), n + 1);
    std::vector<double> abs_rem(n + 1), abs_inv(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        abs_rem[j] = std::fabs(rem[j]);
        abs_inv[j] = std::fabs(inv[j]);
    }
    PowerSeries err = multiply(PowerSeries(abs_inv), multiply(PowerSeries(abs_rem), PowerSeries(miss), n + 1), n + 1);
    for (double e : err.coeffs) out.truncation_error_bound = std::max(out.truncation_error_bound, e);
    double scale = 0.0;
    for (double c : out.coeffs) scale = std::max(scale, std::fabs(c));
    double tol = kDivisibilityTolerance * scale + out.truncation_error_bound;
    out.valid_pgf = std::all_of(out.coeffs.begin(), out.coeffs.end(), [&](double c) { return c >= -tol; });
    return out;
}

PmfTable sibuya_stationary_pmf(double alpha, double p0, std::size_t n) {
    if (!(alpha > 1 && alpha < 2)) throw InvalidParameter("1 < alpha < 2", "sibuya special case");
    if (!(p0 > 0 && p0 <= 1)) throw InvalidParameter("p0 in (0,1]", "");
    double a = alpha - 1.0;
    double pi0 = a / (a + p0);
    PmfTable t;
    t.masses.resize(n + 1);
    t.masses[0] = pi0;
    double ak = a;
    double tail = 1.0;  // P(S > k) for the Sibuya(a) law
    for (std::size_t k = 1; k <= n; ++k) {
        t.masses[k] = (1.0 - pi0) * ak;
        tail *= 1.0 - a / static_cast<double>(k);
        ak *= (static_cast<double>(k) - a) / static_cast<double>(k + 1);
    }
    t.tail_mass_bound = (1.0 - pi0) * tail;
    t.normalized = true;
    return t;
}

SibuyaSpecialCase sibuya_stationary_special_case(double alpha, double p0, std::size_t n) {
    SibuyaSpecialCase c;
    c.pmf = sibuya_stationary_pmf(alpha, p0, n + 1);
    c.alpha = alpha;
    c.p0 = p0;
    c.pi0 = c.pmf.masses[0];
    c.id_threshold = 2.0 - alpha;
    c.sd_threshold = 1.0 - alpha / 2.0;
    c.id = p0 <= c.id_threshold;
    c.sd = p0 <= c.sd_threshold;
    double pi0 = c.pi0;
    c.pgf = [pi0, alpha](double z) { return 1.0 - (1.0 - pi0) * std::pow(1.0 - z, alpha - 1.0); };
    c.numeric = classify_divisibility(c.pmf, n);
    c.agrees = c.numeric.inconclusive || (c.numeric.id == c.id && c.numeric.sd == c.sd);
    return c;
}

PmfTable shifted_conditional_stationary(const ModelSpec& spec, std::size_t n) {
    PmfTable pi = invariant_dt(spec, n + 1);
    if (!pi.normalized) throw NoInvariantMeasure("shifted stationary law needs positive recurrence");
    double rest = 1.0 - pi.masses[0];
    PmfTable t;
    t.masses.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t.masses[k] = pi.masses[k + 1] / rest;
    t.tail_mass_bound = pi.tail_mass_bound / rest;
    t.normalized = true;
    return t;
}

PmfTable pareto_shifted_pmf(double alpha, std::size_t n) {
    PmfTable t;
    t.masses.resize(n + 1);
    for (std::size_t k = 0; k <= n; ++k) t.masses[k] = pareto_pmf(alpha, k + 1);
    t.tail_mass_bound = std::exp(-alpha * std::log(static_cast<double>(n) + 2.0));
    t.normalized = true;
    return t;
}

bool log_convex(const PmfTable& pmf, std::size_t n) {
    for (std::size_t x = 1; x < n; ++x) {
        double a = pmf.at(static_cast<std::int64_t>(x));
        double l = pmf.at(static_cast<std::int64_t>(x - 1));
        double r = pmf.at(static_cast<std::int64_t>(x + 1));
        if (a * a > l * r * (1.0 + 1e-12)) return false;
    }
    return true;
}

}  // namespace disaster

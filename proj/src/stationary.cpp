#include "disaster/stationary.hpp"

#include <cmath>
#include <limits>

#include "disaster/errors.hpp"
#include "disaster/power_series.hpp"
#include "disaster/products.hpp"
#include "disaster/special_functions.hpp"

namespace disaster {

namespace {

constexpr std::uint64_t kStretchedCap = 50'000'000;
constexpr std::uint64_t kAsymptoticStart = 256;
constexpr std::size_t kAsymptoticTerms = 10;

bool weighted_sum_finite(const ModelSpec& s, double lambda) {
    if (s.beta < 1) return true;
    if (s.beta > 1) return false;
    return s.alpha + lambda > 1;
}

double term(double lambda, double log_prod, std::uint64_t x) {
    double v = log_prod;
    if (lambda != 0) v -= lambda * std::log(static_cast<double>(x) + 1.0);
    return std::exp(v);
}

// sum_{x > X} t_x (x+1)^-lambda for beta = 1, x >= kAsymptoticStart, from the
// asymptotic expansion of t_x in powers of 1/x.
double critical_asymptotic_tail(const ModelSpec& s, double lambda, std::uint64_t X) {
    double logK;
    std::vector<double> E(kAsymptoticTerms + 1, 0.0);
    if (s.kind == ModelKind::A) {
        double nu = *s.nu;
        logK = std::log(s.p0) + log_gamma(nu + 1.0) - log_gamma(nu + 1.0 - s.alpha);
        E = log_gamma_ratio_expansion(nu - s.alpha, nu, kAsymptoticTerms);
    } else {
        logK = std::log(s.p0);
    }
    // (x+1)^-lambda = x^-lambda (1+w)^-lambda
    for (std::size_t k = 1; k <= kAsymptoticTerms; ++k)
        E[k] += -lambda * (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
    E[0] = 0.0;
    PowerSeries d = exp_series(PowerSeries(E), kAsymptoticTerms + 1);
    return std::exp(logK) * power_tail_sum(s.alpha + lambda, d.coeffs, static_cast<double>(X + 1));
}

double critical_tail(const ModelSpec& s, double lambda, std::uint64_t X) {
    if (s.degenerate()) return X == 0 ? s.p0 * std::pow(2.0, -lambda) : 0.0;
    if (lambda == 0) {
        if (s.kind == ModelKind::B) return s.p0 * zeta_tail(s.alpha, static_cast<double>(X + 1));
        double nu = *s.nu;
        double c2 = s.p0 * nu / (s.alpha - 1.0);
        CompensatedSum lg;
        for (std::uint64_t y = 1; y <= X; ++y)
            lg += std::log1p(-(s.alpha - 1.0) / (nu - 1.0 + static_cast<double>(y)));
        return c2 * std::exp(lg.value());
    }
    if (X >= kAsymptoticStart) return critical_asymptotic_tail(s, lambda, X);
    CompensatedSum head;
    double L = log_growth_range(s, 0, X + 1);
    for (std::uint64_t x = X + 1; x <= kAsymptoticStart; ++x) {
        head += term(lambda, L, x);
        L += log_growth_prob(s, x);
    }
    return head.value() + critical_asymptotic_tail(s, lambda, kAsymptoticStart);
}

struct StretchedSum {
    double tail;
    double bound;
};

// sum_{x > X} by direct summation until the stretched-exponential bound is negligible.
StretchedSum stretched_tail(const ModelSpec& s, double lambda, std::uint64_t X) {
    if (s.kind == ModelKind::A && s.beta == 0 && lambda == 0) {
        double q = disaster_prob(s, 1);
        double tX = X == 0 ? 1.0 : s.p0 * std::pow(1.0 - q, static_cast<double>(X - 1));
        double ratio = X == 0 ? s.p0 / q : (1.0 - q) / q;
        return {tX * ratio, 0.0};
    }
    double L = log_growth_range(s, 0, X + 1);
    CompensatedSum acc;
    std::uint64_t x = X + 1;
    double bound = std::numeric_limits<double>::infinity();
    for (; x < kStretchedCap; ++x) {
        double f = term(lambda, L, x);
        acc += f;
        L += log_growth_prob(s, x);
        if ((x & 63) == 0 || f == 0.0) {
            double r = stretched_tail_ratio_bound(s, x, lambda);
            bound = r * f;
            if (bound <= 1e-17 * acc.value() || f == 0.0) break;
        }
    }
    return {acc.value(), bound};
}

}  // namespace

double weighted_mass_tail(const ModelSpec& s, double lambda, std::uint64_t X) {
    validate(s);
    if (!weighted_sum_finite(s, lambda))
        throw NoInvariantMeasure("weighted product sum diverges for " + describe(s));
    if (s.beta == 1) return critical_tail(s, lambda, X);
    return stretched_tail(s, lambda, X).tail;
}

CriterionReport criteria(const ModelSpec& s) {
    validate(s);
    CriterionReport r;
    r.c1_finite = s.beta > 1;
    r.c2_finite = weighted_sum_finite(s, 0.0);
    if (r.c2_finite) {
        if (s.beta == 1) {
            r.c2_value = s.kind == ModelKind::A ? s.p0 * *s.nu / (s.alpha - 1.0) : s.p0 * zeta(s.alpha);
        } else {
            StretchedSum st = stretched_tail(s, 0.0, 0);
            r.c2_value = st.tail;
            r.c2_error_bound = st.bound;
        }
    }
    if (s.ct) {
        bool fin = weighted_sum_finite(s, s.ct->lambda);
        r.ct_c2_finite = fin;
        if (fin) r.ct_c2_value = weighted_mass_tail(s, s.ct->lambda, 0);
    }
    return r;
}

namespace {

PmfTable build_table(const ModelSpec& s, double lambda, bool positive, std::size_t xmax) {
    PmfTable t;
    t.masses.resize(xmax + 1);
    std::vector<double> L = log_growth_products(s, xmax);
    double pi0 = 1.0;
    if (positive) pi0 = 1.0 / (1.0 + weighted_mass_tail(s, lambda, 0));
    t.masses[0] = pi0;
    for (std::size_t x = 1; x <= xmax; ++x) t.masses[x] = pi0 * term(lambda, L[x], x);
    t.normalized = positive;
    t.tail_mass_bound = positive ? pi0 * weighted_mass_tail(s, lambda, xmax)
                                 : std::numeric_limits<double>::infinity();
    return t;
}

}  // namespace

PmfTable invariant_dt(const ModelSpec& s, std::size_t xmax) {
    Recurrence r = classify_dt(s);
    if (r == Recurrence::Transient) throw NoInvariantMeasure("transient chain: " + describe(s));
    return build_table(s, 0.0, r == Recurrence::PositiveRecurrent, xmax);
}

PmfTable invariant_ct(const ModelSpec& s, std::size_t xmax) {
    if (!s.ct) throw MissingCtLayer();
    ChainClassification c = classify(s);
    if (c.recurrence == Recurrence::Transient) throw NoInvariantMeasure("transient chain: " + describe(s));
    if (s.ct->lambda == 0) return invariant_dt(s.without_ct(), xmax);
    return build_table(s, s.ct->lambda, c.recurrence == Recurrence::PositiveRecurrent, xmax);
}

double stationary_atom(const ModelSpec& s) {
    if (classify_dt(s) != Recurrence::PositiveRecurrent)
        throw NoInvariantMeasure("not positive recurrent: " + describe(s));
    return 1.0 / (1.0 + weighted_mass_tail(s, 0.0, 0));
}

double stationary_conditional_pgf(const ModelSpec& s, double z) {
    if (!(z >= 0 && z <= 1)) throw InvalidParameter("z in [0,1]", "");
    if (s.beta != 1 || classify_dt(s) != Recurrence::PositiveRecurrent)
        throw NotApplicable("closed-form stationary pgf needs beta = 1 and alpha > 1");
    if (z == 1) return 1.0;
    if (s.kind == ModelKind::A) {
        double nu = *s.nu;
        return (s.alpha - 1.0) * z / nu * gauss_2f1(1.0, nu + 1.0 - s.alpha, nu + 1.0, z).value;
    }
    return polylog(s.alpha, z).value / zeta(s.alpha);
}

double stationary_pgf(const ModelSpec& s, double z) {
    double psi = stationary_conditional_pgf(s, z);
    if (z == 1) return 1.0;
    double pi0 = stationary_atom(s);
    return pi0 + (1.0 - pi0) * psi;
}

double zipf_moment(double alpha, double q) {
    if (!(alpha > 1)) throw InvalidParameter("alpha > 1", "zipf_moment");
    if (!(q >= 0 && q < alpha - 1)) throw InvalidParameter("0 <= q < alpha - 1", "zipf_moment");
    if (q == 0) return 1.0;
    return zeta(alpha - q) / zeta(alpha);
}

}  // namespace disaster

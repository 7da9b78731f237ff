#include "disaster/hitting_times.hpp"

#include <cmath>
#include <limits>

#include "disaster/errors.hpp"
#include "disaster/special_functions.hpp"
#include "disaster/stationary.hpp"

namespace disaster {

namespace {

constexpr std::uint64_t kSeriesCap = 20'000'000;

double defect_of(const ModelSpec& s) {
    if (!(s.beta > 1)) return 0.0;
    return std::exp(log_tail_product(s, 0).value);
}

SeriesValue psi0_series(const ModelSpec& s, double z) {
    if (s.beta != 1) throw NotApplicable("closed-form excursion pgf needs beta = 1");
    if (!(z >= 0 && z <= 1)) throw InvalidParameter("z in [0,1]", "");
    if (z == 0) return {0.0, 0, 0.0};
    if (z == 1) return {1.0, 0, 0.0};
    if (s.kind == ModelKind::A) {
        double nu = *s.nu;
        if (s.alpha == 1.0) {
            SeriesValue L = l_nu(nu, z);
            return {z - nu * L.value * (1.0 - z), L.terms_used, nu * (1.0 - z) * L.tail_bound};
        }
        SeriesValue F = gauss_2f1(1.0, nu + 1.0 - s.alpha, nu + 2.0, z);
        double k = s.alpha * z / (nu + 1.0);
        return {k * F.value, F.terms_used, k * F.tail_bound};
    }
    if (s.alpha == 1.0) return {1.0 + (1.0 - z) / z * std::log1p(-z), 0, 0.0};
    SeriesValue Li = polylog(s.alpha, z);
    return {1.0 - (1.0 - z) / z * Li.value, Li.terms_used, (1.0 - z) / z * Li.tail_bound};
}

}  // namespace

PmfTable return_time_pmf(const ModelSpec& s, std::size_t xmax) {
    validate(s);
    std::vector<double> L = log_growth_products(s, xmax + 1);
    PmfTable t;
    t.support_start = 1;
    t.masses.resize(xmax + 1);
    for (std::size_t x = 0; x <= xmax; ++x) t.masses[x] = disaster_prob(s, x) * std::exp(L[x]);
    t.defect = defect_of(s);
    t.tail_mass_bound = std::max(0.0, std::exp(L[xmax + 1]) - t.defect);
    t.normalized = t.defect == 0.0;
    return t;
}

double return_time_tail(const ModelSpec& s, std::uint64_t x) {
    validate(s);
    if (x == 0) return 1.0;
    return std::exp(log_growth_range(s, 0, x));
}

double excursion_psi0(const ModelSpec& s, double z) { return psi0_series(s, z).value; }

PgfValue return_time_pgf(const ModelSpec& s, double z) {
    validate(s);
    if (!(z >= 0 && z <= 1)) throw InvalidParameter("z in [0,1]", "");
    double q0 = 1.0 - s.p0;
    if (s.beta == 1) {
        SeriesValue psi = psi0_series(s, z);
        return {z * (q0 + s.p0 * psi.value), true, z * s.p0 * psi.tail_bound};
    }
    if (z == 1) {
        if (s.beta < 1) return {1.0, false, 0.0};
        BoundedValue lt = log_tail_product(s, 0);
        double d = std::exp(lt.value);
        return {1.0 - d, false, d * lt.error_bound};
    }
    if (z == 0) return {0.0, false, 0.0};
    CompensatedSum acc;
    double logz = std::log(z);
    double L = 0.0;
    double bound = 1.0;
    for (std::uint64_t x = 0; x < kSeriesCap; ++x) {
        acc += disaster_prob(s, x) * std::exp(L + static_cast<double>(x + 1) * logz);
        L += log_growth_prob(s, x);
        bound = std::exp(L + static_cast<double>(x + 2) * logz);
        if (bound <= 1e-16) break;
    }
    return {acc.value(), false, bound};
}

double mean_return_time(const ModelSpec& s) {
    if (classify_dt(s) != Recurrence::PositiveRecurrent) return std::numeric_limits<double>::infinity();
    if (s.beta == 1) {
        if (s.kind == ModelKind::A) return 1.0 + s.p0 * *s.nu / (s.alpha - 1.0);
        return 1.0 + s.p0 * zeta(s.alpha);
    }
    return 1.0 + *criteria(s).c2_value;
}

std::vector<double> sibuya_pmf_table(double alpha, double nu, std::size_t n) {
    if (!(alpha > 0 && nu > -1 && alpha <= nu + 1)) throw InvalidParameter("0 < alpha <= nu + 1", "sibuya");
    std::vector<double> s(n + 1, 0.0);
    if (n == 0) return s;
    s[1] = alpha / (nu + 1.0);
    for (std::size_t x = 1; x < n; ++x) {
        double xd = static_cast<double>(x);
        s[x + 1] = s[x] * (nu - alpha + xd) / (nu + xd + 1.0);
    }
    return s;
}

double sibuya_pmf(double alpha, double nu, std::uint64_t x) {
    if (x == 0) {
        sibuya_pmf_table(alpha, nu, 0);
        return 0.0;
    }
    return sibuya_pmf_table(alpha, nu, x)[x];
}

double pareto_pmf(double alpha, std::uint64_t x) {
    if (!(alpha > 0)) throw InvalidParameter("alpha > 0", "pareto");
    if (x == 0) return 0.0;
    double xd = static_cast<double>(x);
    return -std::expm1(-alpha * std::log1p(1.0 / xd)) * std::exp(-alpha * std::log(xd));
}

double log_scale_function(const ModelSpec& s, std::uint64_t x) {
    validate(s);
    if (x == 0) return -std::numeric_limits<double>::infinity();
    return -log_growth_range(s, 0, x);
}

double scale_function(const ModelSpec& s, std::uint64_t x) {
    if (x == 0) return 0.0;
    return std::exp(log_scale_function(s, x));
}

double height_tail(const ModelSpec& s, std::uint64_t h) {
    if (h == 0) return 1.0;
    return std::exp(-log_scale_function(s, h));
}

HeightLaw height_law(const ModelSpec& s, std::size_t hmax) {
    validate(s);
    HeightLaw law;
    law.atom_at_zero = 1.0 - s.p0;
    PmfTable& t = law.masses;
    t.support_start = 1;
    t.masses.resize(hmax);
    // P(H = h) = p0 phi(1)/phi(h) (1 - phi(h)/phi(h+1)), phi(h+1) = phi(h)/p_h
    double log_phi1 = -std::log(s.p0);
    double log_phi = log_phi1;
    CompensatedSum log_phi_acc;
    log_phi_acc += log_phi1;
    for (std::size_t h = 1; h <= hmax; ++h) {
        double log_phi_next_minus = log_growth_prob(s, h);  // log phi(h) - log phi(h+1)
        t.masses[h - 1] = s.p0 * std::exp(log_phi1 - log_phi) * -std::expm1(log_phi_next_minus);
        log_phi_acc += -log_phi_next_minus;
        log_phi = log_phi_acc.value();
    }
    t.defect = defect_of(s);
    t.tail_mass_bound = std::max(0.0, std::exp(-log_phi) - t.defect);
    t.normalized = t.defect == 0.0;
    return law;
}

BoundedValue extinction_prob_bounded(const ModelSpec& s, std::uint64_t x) {
    validate(s);
    if (!(s.beta > 1)) return {1.0, 0.0};
    BoundedValue lt = log_tail_product(s, x);
    return {-std::expm1(lt.value), std::exp(lt.value) * lt.error_bound};
}

double extinction_prob(const ModelSpec& s, std::uint64_t x) { return extinction_prob_bounded(s, x).value; }

PmfTable first_passage_down_pmf(const ModelSpec& s, std::uint64_t x, std::size_t kmax) {
    validate(s);
    if (x == 0) throw InvalidParameter("x >= 1", "first passage to 0 from x");
    PmfTable t;
    t.support_start = 1;
    t.masses.resize(kmax);
    CompensatedSum L;
    for (std::size_t k = 1; k <= kmax; ++k) {
        std::uint64_t y = x + k - 1;
        t.masses[k - 1] = disaster_prob(s, y) * std::exp(L.value());
        L += log_growth_prob(s, y);
    }
    t.defect = s.beta > 1 ? std::exp(log_tail_product(s, x).value) : 0.0;
    t.tail_mass_bound = std::max(0.0, std::exp(L.value()) - t.defect);
    t.normalized = t.defect == 0.0;
    return t;
}

PgfValue first_passage_down_pgf(const ModelSpec& s, std::uint64_t x, double z) {
    validate(s);
    if (x == 0) throw InvalidParameter("x >= 1", "first passage to 0 from x");
    if (!(z >= 0 && z <= 1)) throw InvalidParameter("z in [0,1]", "");
    if (z == 1) {
        BoundedValue e = extinction_prob_bounded(s, x);
        return {e.value, false, e.error_bound};
    }
    if (z == 0) return {0.0, false, 0.0};
    double logz = std::log(z);
    CompensatedSum acc;
    double L = 0.0;
    double bound = 1.0;
    for (std::uint64_t k = 1; k < kSeriesCap; ++k) {
        std::uint64_t y = x + k - 1;
        acc += disaster_prob(s, y) * std::exp(L + static_cast<double>(k) * logz);
        L += log_growth_prob(s, y);
        bound = std::exp(L + static_cast<double>(k + 1) * logz);
        if (bound <= 1e-16) break;
    }
    return {acc.value(), false, bound};
}

PowerSeries return_time_series(const ModelSpec& s, std::size_t order) {
    validate(s);
    std::vector<double> f(order, 0.0);
    double L = 0.0;
    for (std::size_t k = 1; k < order; ++k) {
        f[k] = disaster_prob(s, k - 1) * std::exp(L);
        L += log_growth_prob(s, k - 1);
    }
    return PowerSeries(std::move(f), "pgf of tau_00, radius >= 1");
}

PowerSeries green_diag(const ModelSpec& s, std::uint64_t x, std::size_t order) {
    if (order > 10'001) throw InvalidParameter("order <= 10^4", "green_diag");
    PowerSeries f = return_time_series(s, order);
    std::vector<double> den(order, 0.0);
    std::vector<double> num(order, 0.0);
    if (order > 0) {
        den[0] = 1.0;
        num[0] = 1.0;
    }
    for (std::size_t k = 1; k < order; ++k) {
        den[k] = -f.coeffs[k];
        if (k <= x) num[k] = -f.coeffs[k];
    }
    PowerSeries g = divide(PowerSeries(num), PowerSeries(den), order);
    g.radius_note = "Green function g_{x,x}, radius >= 1";
    return g;
}

PowerSeries green_kernel(const ModelSpec& s, std::uint64_t x, std::uint64_t y, std::size_t order) {
    if (y == x) return green_diag(s, x, order);
    if (y > x) {
        PowerSeries g = green_diag(s, x, order);
        double prod = std::exp(log_growth_range(s, x, y));
        PowerSeries out = shift(g, y - x, order);
        for (double& c : out.coeffs) c *= prod;
        out.radius_note = "Green kernel g_{x,y}, y > x";
        return out;
    }
    std::size_t gap = x - y;
    PowerSeries g = green_diag(s, x, order + gap);
    double prod = std::exp(log_growth_range(s, y, x));
    std::vector<double> c(order, 0.0);
    for (std::size_t n = 0; n < order; ++n) c[n] = g.coeffs[n + gap] / prod;
    PowerSeries out(std::move(c), "Green kernel g_{x,y}, y < x");
    return out;
}

PowerSeries first_passage_series(const ModelSpec& s, std::uint64_t x, std::uint64_t y, std::size_t order) {
    PowerSeries num = green_kernel(s, x, y, order);
    PowerSeries den = green_diag(s, y, order);
    PowerSeries out = divide(num, den, order);
    out.radius_note = "first passage pgf phi_{x,y}";
    return out;
}

double first_return_pgf_at(const ModelSpec& s, std::uint64_t x, double z) {
    double phi00 = return_time_pgf(s, z).value;
    if (x == 0) return phi00;
    CompensatedSum S;
    double L = 0.0;
    double zp = 1.0;
    for (std::uint64_t xp = 0; xp < x; ++xp) {
        zp *= z;
        S += zp * disaster_prob(s, xp) * std::exp(L);
        L += log_growth_prob(s, xp);
    }
    return (phi00 - S.value()) / (1.0 - S.value());
}

std::vector<double> contact_probability(const ModelSpec& s, std::size_t nmax) {
    PowerSeries f = return_time_series(s, nmax + 1);
    // u_n = sum_{j<n} u_j f_{n-j}; keep f reversed so both operands stream forward
    std::vector<double> fr(nmax + 1);
    for (std::size_t k = 0; k <= nmax; ++k) fr[nmax - k] = f.coeffs[k];
    std::vector<double> u(nmax + 1, 0.0);
    u[0] = 1.0;
    for (std::size_t n = 1; n <= nmax; ++n) {
        const double* g = fr.data() + (nmax - n);
        double a0 = 0, a1 = 0, a2 = 0, a3 = 0;
        std::size_t j = 0;
        for (; j + 4 <= n; j += 4) {
            a0 += u[j] * g[j];
            a1 += u[j + 1] * g[j + 1];
            a2 += u[j + 2] * g[j + 2];
            a3 += u[j + 3] * g[j + 3];
        }
        for (; j < n; ++j) a0 += u[j] * g[j];
        u[n] = (a0 + a1) + (a2 + a3);
    }
    return u;
}

double ContactAsymptote::operator()(double n) const {
    switch (regime) {
        case ContactRegime::Constant: return constant;
        case ContactRegime::Logarithmic: return constant / std::log(n);
        case ContactRegime::Algebraic: return constant * std::pow(n, -exponent);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

ContactAsymptote contact_asymptote(const ModelSpec& s) {
    validate(s);
    if (s.beta != 1) throw NotApplicable("contact asymptotics are given for beta = 1");
    double a = s.alpha;
    if (a > 1) return {ContactRegime::Constant, stationary_atom(s), 0.0};
    if (a == 1) {
        double c = s.kind == ModelKind::A ? 1.0 / (s.p0 * *s.nu) : 1.0 / s.p0;
        return {ContactRegime::Logarithmic, c, 0.0};
    }
    double c = 1.0 / (s.p0 * gamma_fn(1.0 - a) * gamma_fn(a));
    if (s.kind == ModelKind::A) {
        double nu = *s.nu;
        c *= std::exp(log_gamma(nu + 1.0 - a) - log_gamma(nu + 1.0));
    }
    return {ContactRegime::Algebraic, c, 1.0 - a};
}

std::string to_string(ContactRegime r) {
    switch (r) {
        case ContactRegime::Constant: return "constant";
        case ContactRegime::Logarithmic: return "logarithmic";
        case ContactRegime::Algebraic: return "algebraic";
    }
    return "?";
}

}  // namespace disaster

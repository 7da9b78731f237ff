#include "disaster/ctmc.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <algorithm>
#include <limits>
#include <sstream>

#include "disaster/errors.hpp"
#include "disaster/hitting_times.hpp"
#include "disaster/special_functions.hpp"

namespace disaster {

namespace {

using Wide = boost::multiprecision::cpp_bin_float_50;

constexpr std::size_t kClosedFormMaxHeight = 40;
constexpr double kWeightTolerance = 1e-6;

void require_ct(const ModelSpec& s) {
    validate(s);
    if (!s.ct) throw MissingCtLayer();
}

std::vector<Wide> wide_rates(const ModelSpec& s, std::size_t h) {
    std::vector<Wide> r(h + 1);
    Wide r0 = s.ct->r0;
    Wide lambda = s.ct->lambda;
    for (std::size_t y = 0; y <= h; ++y) r[y] = r0 * boost::multiprecision::pow(Wide(y + 1), lambda);
    return r;
}

std::vector<Wide> wide_weights(const std::vector<Wide>& r) {
    std::vector<Wide> c(r.size());
    for (std::size_t x = 0; x < r.size(); ++x) {
        Wide w = 1;
        for (std::size_t y = 0; y < r.size(); ++y)
            if (y != x) w *= r[y] / (r[y] - r[x]);
        c[x] = w;
    }
    return c;
}

Wide weight_sum_error(const std::vector<Wide>& c) {
    Wide s = 0;
    for (const Wide& v : c) s += v;
    return boost::multiprecision::abs(s - 1);
}

// P(Poisson(m) <= h), summed in log space.
double erlang_survival(std::size_t h, double m) {
    if (m == 0) return 1.0;
    double lm = std::log(m);
    double acc = 0.0;
    for (std::size_t k = 0; k <= h; ++k)
        acc += std::exp(-m + static_cast<double>(k) * lm - std::lgamma(static_cast<double>(k) + 1.0));
    return std::min(1.0, acc);
}

}  // namespace

HypoexpLaw hypoexp_law(const ModelSpec& s, std::size_t h) {
    require_ct(s);
    if (s.ct->lambda == 0) throw NotApplicable("equal rates: the law is Erlang, no partial-fraction weights");
    std::vector<Wide> r = wide_rates(s, h);
    std::vector<Wide> c = wide_weights(r);
    HypoexpLaw law;
    for (std::size_t i = 0; i <= h; ++i) {
        law.rates.push_back(static_cast<double>(r[i]));
        law.weights.push_back(static_cast<double>(c[i]));
    }
    law.weight_sum_error = static_cast<double>(weight_sum_error(c));
    return law;
}

double hypoexp_survival_uniformized(const std::vector<double>& rates, double t) {
    if (!(t >= 0)) throw InvalidParameter("t >= 0", "");
    if (t == 0 || rates.empty()) return rates.empty() ? 0.0 : 1.0;
    double Lambda = 0.0;
    for (double r : rates) Lambda = std::max(Lambda, r);
    double m = Lambda * t;
    std::size_t N = static_cast<std::size_t>(m + 12.0 * std::sqrt(m) + 40.0);
    std::vector<double> v(rates.size(), 0.0);
    v[0] = 1.0;
    double alive = 1.0;
    double lm = std::log(m);
    double out = 0.0;
    for (std::size_t n = 0; n <= N; ++n) {
        double w = std::exp(-m + static_cast<double>(n) * lm - std::lgamma(static_cast<double>(n) + 1.0));
        out += w * alive;
        // one uniformized step: stage y advances with probability r_y/Lambda
        double carry = 0.0;
        alive = 0.0;
        for (std::size_t y = 0; y < v.size(); ++y) {
            double move = v[y] * (rates[y] / Lambda);
            double stay = v[y] - move;
            v[y] = stay + carry;
            carry = move;
            alive += v[y];
        }
    }
    return std::min(1.0, out);
}

SurvivalValue excursion_survival_detail(const ModelSpec& s, std::size_t h, double t) {
    require_ct(s);
    if (!(t >= 0)) throw InvalidParameter("t >= 0", "");
    if (s.ct->lambda == 0) return {erlang_survival(h, s.ct->r0 * t), false};
    if (h <= kClosedFormMaxHeight) {
        std::vector<Wide> r = wide_rates(s, h);
        std::vector<Wide> c = wide_weights(r);
        if (weight_sum_error(c) <= kWeightTolerance) {
            Wide acc = 0;
            Wide tw = t;
            for (std::size_t x = 0; x <= h; ++x) acc += c[x] * boost::multiprecision::exp(-r[x] * tw);
            double v = static_cast<double>(acc);
            return {std::clamp(v, 0.0, 1.0), false};
        }
    }
    std::vector<double> rates(h + 1);
    for (std::size_t y = 0; y <= h; ++y) rates[y] = jump_rate(s, y);
    return {hypoexp_survival_uniformized(rates, t), true};
}

double excursion_survival_given_height(const ModelSpec& s, std::size_t h, double t) {
    return excursion_survival_detail(s, h, t).value;
}

TailRegime ct_excursion_tail_exponent(const ModelSpec& s) {
    require_ct(s);
    if (s.beta != 1) throw NotApplicable("CT excursion tail exponent is given for beta = 1");
    double lambda = s.ct->lambda;
    double r0 = s.ct->r0;
    if (lambda == 1) throw Unsupported("lambda = 1: CT excursion tail not characterised; simulate instead");
    if (lambda < 1)
        return {TailKind::PowerLaw, s.alpha / (1.0 - lambda), std::numeric_limits<double>::infinity(),
                std::numeric_limits<double>::infinity()};
    return {TailKind::Exponential, std::numeric_limits<double>::infinity(), 1.0 / (r0 * (lambda - 1.0)),
            zeta(lambda) / r0};
}

double ExplosionReport::ne_pmf(std::uint64_t k) const {
    if (!return_probability) return 0.0;
    double phi = *return_probability;
    return (1.0 - phi) * std::pow(phi, static_cast<double>(k));
}

ExplosionReport explosion_report(const ModelSpec& s) {
    require_ct(s);
    ExplosionReport rep;
    ChainClassification c = classify(s);
    rep.recurrence = c.recurrence;
    rep.explosive = c.ct_explosive.value_or(false);
    double lambda = s.ct->lambda;
    double acc = 0.0;
    std::uint64_t next = 10;
    for (std::uint64_t x = 0; x <= 1'000'000; ++x) {
        acc += 1.0 / jump_rate(s, x);
        if (x == next) {
            rep.reciprocal_rate_partial_sums.emplace_back(x, acc);
            next *= 10;
        }
    }
    if (lambda > 1) rep.reciprocal_rate_sum = zeta(lambda) / s.ct->r0;
    std::ostringstream os;
    if (c.recurrence != Recurrence::Transient) {
        os << "recurrent: the chain returns to 0 infinitely often, no drift phase";
    } else {
        rep.return_probability = extinction_prob(s, 0);
        os << "after a geometric number of excursions the chain escapes through a pure-birth Yule phase "
              "with rates r0 (x+1)^lambda; ";
        if (rep.explosive)
            os << "sum of 1/r_x is finite, so it explodes in finite time";
        else
            os << "sum of 1/r_x diverges, so it drifts to infinity without exploding";
    }
    rep.post_drift_description = os.str();
    return rep;
}

}  // namespace disaster

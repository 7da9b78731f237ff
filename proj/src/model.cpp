#include "disaster/model.hpp"

#include <cmath>
#include <sstream>

#include "disaster/errors.hpp"

namespace disaster {

ModelSpec ModelSpec::model_a(double alpha, double beta, double nu, double p0) {
    ModelSpec s;
    s.kind = ModelKind::A;
    s.alpha = alpha;
    s.beta = beta;
    s.nu = nu;
    s.p0 = p0;
    validate(s);
    return s;
}

ModelSpec ModelSpec::model_b(double alpha, double beta, double p0) {
    ModelSpec s;
    s.kind = ModelKind::B;
    s.alpha = alpha;
    s.beta = beta;
    s.p0 = p0;
    validate(s);
    return s;
}

ModelSpec ModelSpec::with_ct(double lambda, double r0) const {
    ModelSpec s = *this;
    s.ct = CtLayer{lambda, r0};
    validate(s);
    return s;
}

ModelSpec ModelSpec::without_ct() const {
    ModelSpec s = *this;
    s.ct.reset();
    return s;
}

void validate(const ModelSpec& s) {
    auto finite = [](double v) { return std::isfinite(v); };
    if (!finite(s.alpha) || !(s.alpha > 0)) throw InvalidParameter("alpha > 0", "");
    if (!finite(s.p0) || !(s.p0 > 0 && s.p0 <= 1)) throw InvalidParameter("p0 in (0,1]", "");
    if (s.kind == ModelKind::A) {
        if (!s.nu) throw InvalidParameter("nu given for model A", "");
        double nu = *s.nu;
        if (!finite(nu) || !(nu > -1)) throw InvalidParameter("nu > -1", "");
        if (!finite(s.beta) || !(s.beta >= 0)) throw InvalidParameter("beta >= 0", "");
        // alpha = nu + 1 is admitted: then q_1 = 1 and the chain lives on {0, 1}
        if (!(s.alpha <= nu + 1)) throw InvalidParameter("0 < alpha <= nu + 1", "");
    } else {
        if (s.nu) throw InvalidParameter("nu unset for model B", "");
        if (!finite(s.beta) || !(s.beta > 0)) throw InvalidParameter("beta > 0", "");
    }
    if (s.ct) {
        if (!finite(s.ct->lambda)) throw InvalidParameter("lambda finite", "");
        if (!finite(s.ct->r0) || !(s.ct->r0 > 0)) throw InvalidParameter("r0 > 0", "");
    }
}

namespace {

// x^-beta computed as exp(-beta log x) so that huge x never overflows x^beta.
double inv_pow(double x, double beta) { return std::exp(-beta * std::log(x)); }

}  // namespace

double disaster_prob(const ModelSpec& s, std::uint64_t x) {
    if (x == 0) return 1.0 - s.p0;
    double xd = static_cast<double>(x);
    if (s.kind == ModelKind::A) {
        double w = inv_pow(xd, s.beta);
        // alpha/(nu + x^beta) = alpha w / (1 + nu w)
        return s.alpha * w / (1.0 + *s.nu * w);
    }
    return -std::expm1(-s.alpha * std::log1p(inv_pow(xd, s.beta)));
}

double growth_prob(const ModelSpec& s, std::uint64_t x) {
    if (x == 0) return s.p0;
    return 1.0 - disaster_prob(s, x);
}

double log_growth_prob(const ModelSpec& s, std::uint64_t x) {
    if (x == 0) return std::log(s.p0);
    if (s.kind == ModelKind::A) return std::log1p(-disaster_prob(s, x));
    return -s.alpha * std::log1p(inv_pow(static_cast<double>(x), s.beta));
}

double jump_rate(const ModelSpec& s, std::uint64_t x) {
    if (!s.ct) throw MissingCtLayer();
    return s.ct->r0 * std::pow(static_cast<double>(x) + 1.0, s.ct->lambda);
}

DriftVariance drift_and_variance(const ModelSpec& s, std::uint64_t x) {
    if (x == 0) throw InvalidParameter("x >= 1", "drift is defined away from the origin");
    double q = disaster_prob(s, x);
    double p = 1.0 - q;
    double xd = static_cast<double>(x);
    return {p - xd * q, p + xd * xd * q};
}

Recurrence classify_dt(const ModelSpec& s) {
    validate(s);
    if (s.beta > 1) return Recurrence::Transient;
    if (s.beta < 1) return Recurrence::PositiveRecurrent;
    return s.alpha > 1 ? Recurrence::PositiveRecurrent : Recurrence::NullRecurrent;
}

ChainClassification classify(const ModelSpec& s) {
    Recurrence dt = classify_dt(s);
    if (!s.ct) return {dt, std::nullopt};
    Recurrence r = dt;
    if (s.beta == 1)
        r = s.alpha + s.ct->lambda > 1 ? Recurrence::PositiveRecurrent : Recurrence::NullRecurrent;
    return {r, s.beta > 1 && s.ct->lambda > 1};
}

std::string to_string(Recurrence r) {
    switch (r) {
        case Recurrence::Transient: return "Transient";
        case Recurrence::NullRecurrent: return "NullRecurrent";
        case Recurrence::PositiveRecurrent: return "PositiveRecurrent";
    }
    return "?";
}

std::string to_string(ModelKind k) { return k == ModelKind::A ? "A" : "B"; }

std::string describe(const ModelSpec& s) {
    std::ostringstream os;
    os.precision(17);
    os << "model=" << to_string(s.kind) << " alpha=" << s.alpha << " beta=" << s.beta;
    if (s.nu) os << " nu=" << *s.nu;
    os << " p0=" << s.p0;
    if (s.ct) os << " lambda=" << s.ct->lambda << " r0=" << s.ct->r0;
    return os.str();
}

}  // namespace disaster

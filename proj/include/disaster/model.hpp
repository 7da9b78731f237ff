#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>

namespace disaster {

enum class ModelKind { A, B };

struct CtLayer {
    double lambda = 0.0;
    double r0 = 1.0;
};

// Growth-collapse chain on {0,1,2,...}: from x move to x+1 with probability p_x,
// otherwise fall to 0.  Model A: q_x = alpha/(nu + x^beta); Model B:
// p_x = (1 + x^-beta)^-alpha.  At the origin p_0 is a free parameter.
struct ModelSpec {
    ModelKind kind = ModelKind::A;
    double alpha = 1.0;
    double beta = 1.0;
    std::optional<double> nu;
    double p0 = 1.0;
    std::optional<CtLayer> ct;

    static ModelSpec model_a(double alpha, double beta, double nu, double p0 = 1.0);
    static ModelSpec model_b(double alpha, double beta, double p0 = 1.0);
    ModelSpec with_ct(double lambda, double r0 = 1.0) const;
    ModelSpec without_ct() const;

    double nu_or_zero() const { return nu.value_or(0.0); }
    bool critical() const { return beta == 1.0; }
    // Model A on the boundary alpha = nu + 1: p_1 = 0.
    bool degenerate() const { return kind == ModelKind::A && nu && alpha == *nu + 1.0; }
};

// Throws InvalidParameter naming the violated invariant.
void validate(const ModelSpec& spec);

double growth_prob(const ModelSpec& spec, std::uint64_t x);
double disaster_prob(const ModelSpec& spec, std::uint64_t x);
// log p_x without cancellation for p_x close to 1.
double log_growth_prob(const ModelSpec& spec, std::uint64_t x);

double jump_rate(const ModelSpec& spec, std::uint64_t x);

struct DriftVariance {
    double drift;
    double variance;
};
DriftVariance drift_and_variance(const ModelSpec& spec, std::uint64_t x);

enum class Recurrence { Transient, NullRecurrent, PositiveRecurrent };

struct ChainClassification {
    Recurrence recurrence;
    std::optional<bool> ct_explosive;
};

ChainClassification classify(const ModelSpec& spec);
Recurrence classify_dt(const ModelSpec& spec);

std::string to_string(Recurrence r);
std::string to_string(ModelKind k);
std::string describe(const ModelSpec& spec);

}  // namespace disaster

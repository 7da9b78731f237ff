#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <type_traits>
#include <vector>

#include "disaster/model.hpp"
#include "disaster/pmf.hpp"
#include "disaster/rng.hpp"

namespace disaster {

struct RunConfig {
    std::uint64_t seed = 20240101;
    std::uint64_t replications = 1;
    double horizon = 1e6;  // steps (DT) or time (CT)
    std::uint64_t max_events = 10'000'000;
    unsigned threads = 0;  // 0: hardware concurrency
};

struct ExcursionSample {
    std::uint64_t height = 0;
    std::uint64_t dt_length = 0;
    std::optional<double> ct_length;
    bool complete = true;
};

struct Estimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::uint64_t n = 0;
};

// Welford accumulator; merge() follows Chan et al.
class RunningStats {
public:
    void add(double x);
    void merge(const RunningStats& o);
    std::uint64_t count() const { return n_; }
    double mean() const { return mean_; }
    double variance() const { return n_ > 1 ? m2_ / static_cast<double>(n_ - 1) : 0.0; }
    Estimate estimate() const;

private:
    std::uint64_t n_ = 0;
    double mean_ = 0.0;
    double m2_ = 0.0;
};

// Runs fn(r) for r = 0..reps-1 on a thread pool; results are stored by index so
// the outcome does not depend on scheduling.
template <class Fn>
auto run_replications(std::uint64_t reps, unsigned threads, Fn&& fn) {
    using R = std::invoke_result_t<Fn&, std::uint64_t>;
    std::vector<R> out(reps);
    unsigned n = threads ? threads : std::max(1u, std::thread::hardware_concurrency());
    n = static_cast<unsigned>(std::min<std::uint64_t>(n, reps));
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            std::uint64_t i = next++;
            if (i >= reps) return;
            try {
                out[i] = fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next = reps;
                return;
            }
        }
    };
    if (n <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);
    return out;
}

// Share of `total` assigned to replication r.
std::uint64_t replication_share(std::uint64_t total, std::uint64_t reps, std::uint64_t r);

// ---- trajectories -------------------------------------------------------

struct DtRun {
    std::uint64_t steps = 0;
    std::uint64_t final_state = 0;
    std::uint64_t zero_visits = 0;
    std::vector<ExcursionSample> excursions;
    std::optional<ExcursionSample> partial;  // unfinished excursion at the horizon
};

// X_{n+1} = (X_n + 1) 1(U_{n+1} > q_{X_n}), one uniform per step, horizon steps.
DtRun simulate_dt(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t replication = 0,
                  std::uint64_t start = 0, bool keep_excursions = true);

enum class CtStop { Horizon, MaxEvents };

struct CtRun {
    std::uint64_t events = 0;
    double time = 0.0;
    std::uint64_t final_state = 0;
    CtStop stop = CtStop::Horizon;
    bool anomaly = false;  // max_events exhausted although the chain is recurrent
    std::vector<ExcursionSample> excursions;
};

CtRun simulate_ct(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t replication = 0,
                  bool keep_excursions = true);

// ---- exact fast climbs --------------------------------------------------

struct Climb {
    bool reached_limit;       // climbed to `limit` without a disaster
    std::uint64_t fall_from;  // state at which the disaster happened
};

// Starting at `from`, climb until a disaster or until state `limit` is reached.
// Exact in law: Bernoulli thinning over blocks [y, 2y) with bound q_y.
Climb climb(const ModelSpec& spec, Stream& rng, std::uint64_t from, std::uint64_t limit);

// Level beyond which a transient climb counts as escaped, with the probability
// that a climb past it would still collapse.
struct EscapeLevel {
    std::uint64_t level;
    double collapse_bound;
};
EscapeLevel escape_level(const ModelSpec& spec, double target = 1e-12);

struct ExcursionBatch {
    std::vector<ExcursionSample> samples;
    std::uint64_t escaped = 0;
    bool ct_length_approximate = false;
};

// Excursions from 0 simulated step by step (one uniform per step).
ExcursionBatch sample_excursions_stepwise(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t count);
// Excursions from 0 via climb(); with_ct adds the CT length sum_{y<=H} Exp(r_y),
// exact for the first kExactStages stages and a moment-matched Gamma per dyadic block above.
constexpr std::uint64_t kExactStages = 4096;
ExcursionBatch sample_excursions(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t count,
                                 bool with_ct = false);

// Hill estimate of the tail index from the k largest samples.
double hill_tail_exponent(std::vector<double> samples, std::size_t k);

// ---- renewal statistics -------------------------------------------------

struct RenewalDeltaStats {
    Estimate idle;
    Estimate busy;
    Estimate delta;
    double correlation = 0.0;
    std::uint64_t cycles = 0;
};

RenewalDeltaStats renewal_delta_stats(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t cycles);

struct OccupationStats {
    Estimate visit_ratio;      // #visits(y)/#visits(x)
    Estimate reach_fraction;   // fraction of excursions from 0 visiting k
    std::uint64_t excursions = 0;
};

OccupationStats occupation_and_recurrence_stats(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t x,
                                                std::uint64_t y, std::uint64_t k);

// Empirical law of the time since the last visit to 0, tallied over every step.
std::vector<double> backward_recurrence_law(const ModelSpec& spec, const RunConfig& cfg);
// Empirical law of U o (tau_inf - 1), tau_inf size-biased, U uniform.
std::vector<double> thinning_identity_law(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t excursions);
double total_variation(const std::vector<double>& empirical, const PmfTable& exact);

// ---- transient regime ---------------------------------------------------

struct DriftSample {
    bool hit_zero = false;
    std::uint64_t returns = 0;  // completed excursions from 0 before the escape
    std::uint64_t tau_x0 = 0;
    std::uint64_t tau_d = 0;    // last-visit-to-0 time
};

struct DriftStats {
    std::vector<DriftSample> samples;
    Estimate hit_frequency;
    double escape_bias_bound = 0.0;
};

DriftStats drift_time_transient(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t x,
                                std::uint64_t nsamples);
Estimate hit_zero_frequency(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t x, std::uint64_t n);
// Number of visits to x (time 0 included) of the chain started at x.
std::vector<std::uint64_t> visit_counts_transient(const ModelSpec& spec, const RunConfig& cfg, std::uint64_t x,
                                                  std::uint64_t nsamples);

// ---- Zipf samplers ------------------------------------------------------

struct PrimeZipfSample {
    std::vector<std::uint64_t> values;  // saturated at UINT64_MAX on overflow
    double smooth_probability = 0.0;    // P(Zipf is pmax-smooth)
    std::uint64_t overflowed = 0;
};

std::vector<std::uint64_t> primes_up_to(std::uint64_t n);
bool is_smooth(std::uint64_t v, std::uint64_t pmax);
PrimeZipfSample zipf_prime_sampler(double alpha, const RunConfig& cfg, std::uint64_t n, std::uint64_t pmax = 997);

// Exact inverse-cdf sampler of P(Y = x) = x^-alpha / zeta(alpha).
class ZipfInverseCdf {
public:
    explicit ZipfInverseCdf(double alpha, std::size_t table = 1 << 16);
    std::uint64_t operator()(Stream& rng) const;
    // P(Y > x)
    double survival(std::uint64_t x) const;

private:
    double alpha_;
    double zeta_;
    std::vector<double> survival_;  // survival_[x] = P(Y > x)
};

std::vector<std::uint64_t> zipf_inverse_cdf_samples(double alpha, const RunConfig& cfg, std::uint64_t n);

// ---- compound-Poisson and immigration limit laws ------------------------

// probs[k-1] = P(jump = k), k >= 1
struct JumpLaw {
    std::vector<double> probs;
    double pgf(double z) const;
};

double id_limit_pgf(double r, const JumpLaw& h, double z);
double sd_limit_pgf(double r, const JumpLaw& h, double z);

std::vector<std::uint64_t> limit_law_id_generator(double r, const JumpLaw& h, double t, const RunConfig& cfg,
                                                  std::uint64_t n);
std::vector<std::uint64_t> limit_law_sd_generator(double r, const JumpLaw& h, double t, const RunConfig& cfg,
                                                  std::uint64_t n);
Estimate empirical_pgf(const std::vector<std::uint64_t>& values, double z);

// ---- tests --------------------------------------------------------------

struct ChiSquareTest {
    double statistic = 0.0;
    double p_value = 1.0;
    std::uint64_t dof = 0;
};

ChiSquareTest chi2_homogeneity(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);
// Goodness of fit to P(k) = (1 - ratio) ratio^k.
ChiSquareTest chi2_geometric_fit(const std::vector<std::uint64_t>& values, double ratio);

}  // namespace disaster

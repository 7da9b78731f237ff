#include "disaster/monte_carlo.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <limits>
#include <random>

#include "disaster/errors.hpp"
#include "disaster/special_functions.hpp"

namespace disaster {

// ---- statistics ---------------------------------------------------------

void RunningStats::add(double x) {
    ++n_;
    double d = x - mean_;
    mean_ += d / static_cast<double>(n_);
    m2_ += d * (x - mean_);
}

void RunningStats::merge(const RunningStats& o) {
    if (o.n_ == 0) return;
    if (n_ == 0) {
        *this = o;
        return;
    }
    double n = static_cast<double>(n_ + o.n_);
    double d = o.mean_ - mean_;
    mean_ += d * static_cast<double>(o.n_) / n;
    m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
    n_ += o.n_;
}

Estimate RunningStats::estimate() const {
    return {mean_, n_ > 1 ? std::sqrt(variance() / static_cast<double>(n_)) : 0.0, n_};
}

std::uint64_t replication_share(std::uint64_t total, std::uint64_t reps, std::uint64_t r) {
    return total / reps + (r < total % reps ? 1 : 0);
}

namespace {

constexpr std::size_t kProbCache = 1 << 16;

// q_x for small x, computed once per run.
class DisasterTable {
public:
    explicit DisasterTable(const ModelSpec& s) : spec_(s), q_(kProbCache) {
        for (std::size_t x = 0; x < kProbCache; ++x) q_[x] = disaster_prob(s, x);
    }
    double operator()(std::uint64_t x) const { return x < kProbCache ? q_[x] : disaster_prob(spec_, x); }

private:
    const ModelSpec& spec_;
    std::vector<double> q_;
};

Climb climb_impl(const ModelSpec& s, const DisasterTable& q, Stream& rng, std::uint64_t from,
                 std::uint64_t limit) {
    std::uint64_t y = from;
    if (y >= limit) return {true, limit};
    if (y == 0) {
        if (!(rng.uniform() > q(0))) return {false, 0};
        y = 1;
    }
    (void)s;
    while (y < limit) {
        double qbar = q(y);
        std::uint64_t b = y > limit / 2 ? limit : std::min(limit, 2 * y);
        if (qbar <= 0) {
            y = b;
            continue;
        }
        std::uint64_t g = rng.geometric(qbar);
        if (g >= b - y) {
            y = b;
            continue;
        }
        std::uint64_t c = y + g;
        if (g == 0) return {false, c};
        if (rng.uniform() * qbar <= q(c)) return {false, c};
        y = c + 1;
    }
    return {true, limit};
}

// sum_{n=n1}^{n2} n^-s by Euler-Maclaurin (n1 large).
double power_sum(double n1, double n2, double s) {
    auto F = [s](double n) { return s == 1.0 ? std::log(n) : std::pow(n, 1.0 - s) / (1.0 - s); };
    auto f = [s](double n) { return std::pow(n, -s); };
    auto f1 = [s](double n) { return -s * std::pow(n, -s - 1.0); };
    auto f3 = [s](double n) { return -s * (s + 1.0) * (s + 2.0) * std::pow(n, -s - 3.0); };
    return F(n2) - F(n1) + 0.5 * (f(n1) + f(n2)) + (f1(n2) - f1(n1)) / 12.0 - (f3(n2) - f3(n1)) / 720.0;
}

class CtLength {
public:
    explicit CtLength(const ModelSpec& s) : spec_(s), rates_(kExactStages) {
        for (std::uint64_t y = 0; y < kExactStages; ++y) rates_[y] = jump_rate(s, y);
    }

    // sum_{y=0}^{h} Exp(r_y)
    double sample(Stream& rng, std::uint64_t h, bool& approximate) const {
        double t = 0.0;
        std::uint64_t exact_top = std::min<std::uint64_t>(h, kExactStages - 1);
        for (std::uint64_t y = 0; y <= exact_top; ++y) t += rng.exponential(rates_[y]);
        if (h < kExactStages) return t;
        approximate = true;
        double lambda = spec_.ct->lambda;
        double r0 = spec_.ct->r0;
        for (std::uint64_t a = kExactStages; a <= h;) {
            std::uint64_t b = a > h / 2 ? h + 1 : std::min(h + 1, 2 * a);
            // stages a..b-1 have rates r0 n^lambda with n = a+1..b
            double m = power_sum(static_cast<double>(a + 1), static_cast<double>(b), lambda) / r0;
            double v = power_sum(static_cast<double>(a + 1), static_cast<double>(b), 2.0 * lambda) / (r0 * r0);
            std::gamma_distribution<double> g(m * m / v, v / m);
            t += g(rng);
            a = b;
        }
        return t;
    }

private:
    const ModelSpec& spec_;
    std::vector<double> rates_;
};

}  // namespace

Climb climb(const ModelSpec& s, Stream& rng, std::uint64_t from, std::uint64_t limit) {
    DisasterTable q(s);
    return climb_impl(s, q, rng, from, limit);
}

EscapeLevel escape_level(const ModelSpec& s, double target) {
    constexpr std::uint64_t kTop = std::uint64_t{1} << 62;
    if (!(s.beta > 1)) return {kTop, 1.0};
    double nu = s.kind == ModelKind::A ? std::min(0.0, s.nu_or_zero()) : 0.0;
    double bound = 1.0;
    for (int k = 10; k <= 62; ++k) {
        double L = std::ldexp(1.0, k);
        double corr = 1.0 / (1.0 + nu * std::pow(L, -s.beta));
        bound = std::min(1.0, s.alpha * corr * zeta_tail(s.beta, L));
        if (bound <= target) return {std::uint64_t{1} << k, bound};
    }
    return {kTop, bound};
}

// ---- trajectories -------------------------------------------------------

DtRun simulate_dt(const ModelSpec& s, const RunConfig& cfg, std::uint64_t replication, std::uint64_t start,
                  bool keep_excursions) {
    validate(s);
    DisasterTable q(s);
    Stream rng(cfg.seed, replication);
    DtRun run;
    std::uint64_t N = static_cast<std::uint64_t>(cfg.horizon);
    std::uint64_t x = start;
    bool started = x == 0;
    std::uint64_t start_time = 0;
    std::uint64_t height = 0;
    for (std::uint64_t n = 0; n < N; ++n) {
        if (x == 0) ++run.zero_visits;
        x = rng.uniform() > q(x) ? x + 1 : 0;
        if (x != 0) {
            height = x;
            continue;
        }
        if (started && keep_excursions) run.excursions.push_back({height, n + 1 - start_time, std::nullopt, true});
        started = true;
        start_time = n + 1;
        height = 0;
    }
    run.steps = N;
    run.final_state = x;
    if (started && N > start_time) run.partial = ExcursionSample{height, N - start_time, std::nullopt, false};
    return run;
}

CtRun simulate_ct(const ModelSpec& s, const RunConfig& cfg, std::uint64_t replication, bool keep_excursions) {
    validate(s);
    if (!s.ct) throw MissingCtLayer();
    DisasterTable q(s);
    Stream rng(cfg.seed, replication);
    CtRun run;
    std::uint64_t x = 0;
    double t = 0.0;
    std::uint64_t start_event = 0;
    double start_time = 0.0;
    std::uint64_t height = 0;
    for (;;) {
        double hold = rng.exponential(jump_rate(s, x));
        if (t + hold > cfg.horizon) {
            t = cfg.horizon;
            run.stop = CtStop::Horizon;
            break;
        }
        t += hold;
        ++run.events;
        x = rng.uniform() > q(x) ? x + 1 : 0;
        if (x == 0) {
            if (keep_excursions) run.excursions.push_back({height, run.events - start_event, t - start_time, true});
            start_event = run.events;
            start_time = t;
            height = 0;
        } else {
            height = x;
        }
        if (run.events >= cfg.max_events) {
            run.stop = CtStop::MaxEvents;
            break;
        }
    }
    run.time = t;
    run.final_state = x;
    run.anomaly = run.stop == CtStop::MaxEvents && classify(s).recurrence != Recurrence::Transient;
    return run;
}

ExcursionBatch sample_excursions_stepwise(const ModelSpec& s, const RunConfig& cfg, std::uint64_t count) {
    validate(s);
    DisasterTable q(s);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        ExcursionBatch b;
        std::uint64_t want = replication_share(count, cfg.replications, r);
        b.samples.reserve(want);
        for (std::uint64_t i = 0; i < want; ++i) {
            std::uint64_t x = 0;
            std::uint64_t len = 0;
            bool done = false;
            while (len < cfg.max_events) {
                x = rng.uniform() > q(x) ? x + 1 : 0;
                ++len;
                if (x == 0) {
                    done = true;
                    break;
                }
            }
            if (done)
                b.samples.push_back({len - 1, len, std::nullopt, true});
            else
                ++b.escaped;
        }
        return b;
    });
    ExcursionBatch out;
    for (auto& p : parts) {
        out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
        out.escaped += p.escaped;
    }
    return out;
}

ExcursionBatch sample_excursions(const ModelSpec& s, const RunConfig& cfg, std::uint64_t count, bool with_ct) {
    validate(s);
    if (with_ct && !s.ct) throw MissingCtLayer();
    DisasterTable q(s);
    std::optional<CtLength> ct;
    if (with_ct) ct.emplace(s);
    EscapeLevel esc = escape_level(s);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        ExcursionBatch b;
        std::uint64_t want = replication_share(count, cfg.replications, r);
        b.samples.reserve(want);
        for (std::uint64_t i = 0; i < want; ++i) {
            Climb c = climb_impl(s, q, rng, 0, esc.level);
            if (c.reached_limit) {
                ++b.escaped;
                continue;
            }
            ExcursionSample e{c.fall_from, c.fall_from + 1, std::nullopt, true};
            if (ct) {
                bool approx = false;
                e.ct_length = ct->sample(rng, c.fall_from, approx);
                b.ct_length_approximate = b.ct_length_approximate || approx;
            }
            b.samples.push_back(e);
        }
        return b;
    });
    ExcursionBatch out;
    for (auto& p : parts) {
        out.samples.insert(out.samples.end(), p.samples.begin(), p.samples.end());
        out.escaped += p.escaped;
        out.ct_length_approximate = out.ct_length_approximate || p.ct_length_approximate;
    }
    return out;
}

double hill_tail_exponent(std::vector<double> v, std::size_t k) {
    if (k == 0 || k >= v.size()) throw InvalidParameter("0 < k < sample size", "hill");
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(k), v.end(), std::greater<>());
    double xk = v[k];
    CompensatedSum acc;
    for (std::size_t i = 0; i < k; ++i) acc += std::log(v[i] / xk);
    return static_cast<double>(k) / acc.value();
}

// ---- renewal statistics -------------------------------------------------

namespace {

struct Moments {
    long double n = 0, si = 0, sb = 0, sii = 0, sbb = 0, sib = 0, sdd = 0;
    void add(double i, double b) {
        n += 1;
        si += i;
        sb += b;
        sii += static_cast<long double>(i) * i;
        sbb += static_cast<long double>(b) * b;
        sib += static_cast<long double>(i) * b;
        sdd += static_cast<long double>(i + b) * (i + b);
    }
    void merge(const Moments& o) {
        n += o.n;
        si += o.si;
        sb += o.sb;
        sii += o.sii;
        sbb += o.sbb;
        sib += o.sib;
        sdd += o.sdd;
    }
};

Estimate from_sums(long double n, long double s, long double ss) {
    long double m = s / n;
    long double var = (ss - n * m * m) / (n - 1);
    return {static_cast<double>(m), static_cast<double>(std::sqrt(std::max<long double>(var, 0) / n)),
            static_cast<std::uint64_t>(n)};
}

}  // namespace

RenewalDeltaStats renewal_delta_stats(const ModelSpec& s, const RunConfig& cfg, std::uint64_t cycles) {
    if (classify_dt(s) != Recurrence::PositiveRecurrent)
        throw NotApplicable("renewal decomposition needs a positive recurrent chain");
    DisasterTable q(s);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        Moments m;
        std::uint64_t want = replication_share(cycles, cfg.replications, r);
        for (std::uint64_t i = 0; i < want; ++i) {
            std::uint64_t idle = rng.geometric(s.p0);
            Climb c = climb_impl(s, q, rng, 1, std::uint64_t{1} << 62);
            std::uint64_t busy = c.fall_from + 1;
            m.add(static_cast<double>(idle), static_cast<double>(busy));
        }
        return m;
    });
    Moments m;
    for (auto& p : parts) m.merge(p);
    RenewalDeltaStats out;
    out.cycles = static_cast<std::uint64_t>(m.n);
    out.idle = from_sums(m.n, m.si, m.sii);
    out.busy = from_sums(m.n, m.sb, m.sbb);
    out.delta = from_sums(m.n, m.si + m.sb, m.sdd);
    long double cov = m.sib / m.n - (m.si / m.n) * (m.sb / m.n);
    long double vi = m.sii / m.n - (m.si / m.n) * (m.si / m.n);
    long double vb = m.sbb / m.n - (m.sb / m.n) * (m.sb / m.n);
    out.correlation = vi > 0 && vb > 0 ? static_cast<double>(cov / std::sqrt(vi * vb)) : 0.0;
    return out;
}

OccupationStats occupation_and_recurrence_stats(const ModelSpec& s, const RunConfig& cfg, std::uint64_t x,
                                                std::uint64_t y, std::uint64_t k) {
    if (classify_dt(s) == Recurrence::Transient) throw NotApplicable("occupation ratios need a recurrent chain");
    DisasterTable q(s);
    struct Part {
        double ratio = 0;
        std::uint64_t excursions = 0, reached = 0;
    };
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        Part p;
        std::uint64_t N = static_cast<std::uint64_t>(cfg.horizon);
        std::uint64_t state = 0, cx = 0, cy = 0;
        bool reached = k == 0;
        for (std::uint64_t n = 0; n < N; ++n) {
            if (state == x) ++cx;
            if (state == y) ++cy;
            state = rng.uniform() > q(state) ? state + 1 : 0;
            if (state == k) reached = true;
            if (state == 0) {
                ++p.excursions;
                if (reached) ++p.reached;
                reached = k == 0;
            }
        }
        p.ratio = cx > 0 ? static_cast<double>(cy) / static_cast<double>(cx) : 0.0;
        return p;
    });
    OccupationStats out;
    RunningStats ratio;
    std::uint64_t exc = 0, hits = 0;
    for (auto& p : parts) {
        ratio.add(p.ratio);
        exc += p.excursions;
        hits += p.reached;
    }
    out.visit_ratio = ratio.estimate();
    out.excursions = exc;
    double f = exc ? static_cast<double>(hits) / static_cast<double>(exc) : 0.0;
    out.reach_fraction = {f, exc ? std::sqrt(f * (1 - f) / static_cast<double>(exc)) : 0.0, exc};
    return out;
}

std::vector<double> backward_recurrence_law(const ModelSpec& s, const RunConfig& cfg) {
    validate(s);
    DisasterTable q(s);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        std::vector<std::uint64_t> hist(64, 0);
        std::uint64_t N = static_cast<std::uint64_t>(cfg.horizon);
        std::uint64_t x = 0, last_zero = 0;
        for (std::uint64_t n = 1; n <= N; ++n) {
            x = rng.uniform() > q(x) ? x + 1 : 0;
            if (x == 0) last_zero = n;
            std::uint64_t age = n - last_zero;
            if (age >= hist.size()) hist.resize(2 * age + 1, 0);
            ++hist[age];
        }
        return hist;
    });
    std::vector<double> pmf;
    double total = 0.0;
    for (auto& h : parts) {
        if (h.size() > pmf.size()) pmf.resize(h.size(), 0.0);
        for (std::size_t i = 0; i < h.size(); ++i) {
            pmf[i] += static_cast<double>(h[i]);
            total += static_cast<double>(h[i]);
        }
    }
    for (double& v : pmf) v /= total;
    while (!pmf.empty() && pmf.back() == 0.0) pmf.pop_back();
    return pmf;
}

std::vector<double> thinning_identity_law(const ModelSpec& s, const RunConfig& cfg, std::uint64_t excursions) {
    ExcursionBatch batch = sample_excursions(s, cfg, excursions);
    // re-derive the uniforms from a dedicated stream so the law does not reuse climb randomness
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed ^ 0x7468696e6e696e67ull, r);
        std::vector<double> hist;
        std::size_t lo = 0;
        for (std::uint64_t j = 0; j < r; ++j) lo += replication_share(batch.samples.size(), cfg.replications, j);
        std::size_t cnt = replication_share(batch.samples.size(), cfg.replications, r);
        for (std::size_t i = lo; i < lo + cnt; ++i) {
            std::uint64_t L = batch.samples[i].dt_length;
            std::binomial_distribution<std::uint64_t> bin(L - 1, rng.uniform());
            std::uint64_t b = bin(rng);
            if (b >= hist.size()) hist.resize(2 * b + 1, 0.0);
            hist[b] += static_cast<double>(L);
        }
        return hist;
    });
    std::vector<double> pmf;
    double total = 0.0;
    for (auto& h : parts) {
        if (h.size() > pmf.size()) pmf.resize(h.size(), 0.0);
        for (std::size_t i = 0; i < h.size(); ++i) {
            pmf[i] += h[i];
            total += h[i];
        }
    }
    for (double& v : pmf) v /= total;
    while (!pmf.empty() && pmf.back() == 0.0) pmf.pop_back();
    return pmf;
}

double total_variation(const std::vector<double>& e, const PmfTable& exact) {
    double acc = 0.0;
    std::int64_t top = std::max<std::int64_t>(static_cast<std::int64_t>(e.size()) - 1, exact.last());
    for (std::int64_t x = 0; x <= top; ++x) {
        double ev = x < static_cast<std::int64_t>(e.size()) ? e[x] : 0.0;
        acc += std::fabs(ev - exact.at(x));
    }
    return 0.5 * (acc + exact.tail_mass_bound);
}

// ---- transient regime ---------------------------------------------------

DriftStats drift_time_transient(const ModelSpec& s, const RunConfig& cfg, std::uint64_t x,
                                std::uint64_t nsamples) {
    if (classify_dt(s) != Recurrence::Transient) throw NotApplicable("drift time needs a transient chain");
    DisasterTable q(s);
    EscapeLevel esc = escape_level(s);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        std::vector<DriftSample> out;
        std::uint64_t want = replication_share(nsamples, cfg.replications, r);
        out.reserve(want);
        for (std::uint64_t i = 0; i < want; ++i) {
            DriftSample d;
            if (x == 0) {
                d.hit_zero = true;
            } else {
                Climb c = climb_impl(s, q, rng, x, std::max(esc.level, x + 1));
                if (!c.reached_limit) {
                    d.hit_zero = true;
                    d.tau_x0 = c.fall_from - x + 1;
                }
            }
            if (d.hit_zero) {
                d.tau_d = d.tau_x0;
                for (;;) {
                    Climb c = climb_impl(s, q, rng, 0, esc.level);
                    if (c.reached_limit) break;
                    ++d.returns;
                    d.tau_d += c.fall_from + 1;
                }
            }
            out.push_back(d);
        }
        return out;
    });
    DriftStats st;
    st.escape_bias_bound = esc.collapse_bound;
    std::uint64_t hits = 0;
    for (auto& p : parts)
        for (auto& d : p) {
            st.samples.push_back(d);
            hits += d.hit_zero ? 1 : 0;
        }
    double n = static_cast<double>(st.samples.size());
    double f = static_cast<double>(hits) / n;
    st.hit_frequency = {f, std::sqrt(f * (1 - f) / n), st.samples.size()};
    return st;
}

Estimate hit_zero_frequency(const ModelSpec& s, const RunConfig& cfg, std::uint64_t x, std::uint64_t n) {
    validate(s);
    DisasterTable q(s);
    EscapeLevel esc = escape_level(s);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        std::uint64_t want = replication_share(n, cfg.replications, r);
        std::uint64_t hits = 0;
        for (std::uint64_t i = 0; i < want; ++i)
            if (!climb_impl(s, q, rng, x, std::max(esc.level, x + 1)).reached_limit) ++hits;
        return hits;
    });
    std::uint64_t hits = 0;
    for (auto h : parts) hits += h;
    double f = static_cast<double>(hits) / static_cast<double>(n);
    return {f, std::sqrt(f * (1 - f) / static_cast<double>(n)), n};
}

std::vector<std::uint64_t> visit_counts_transient(const ModelSpec& s, const RunConfig& cfg, std::uint64_t x,
                                                  std::uint64_t nsamples) {
    if (classify_dt(s) != Recurrence::Transient) throw NotApplicable("visit counts are finite only when transient");
    DisasterTable q(s);
    EscapeLevel esc = escape_level(s);
    std::uint64_t L = std::max(esc.level, x + 1);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        std::vector<std::uint64_t> out;
        std::uint64_t want = replication_share(nsamples, cfg.replications, r);
        for (std::uint64_t i = 0; i < want; ++i) {
            std::uint64_t visits = 1;
            for (;;) {
                // from x: escape, or fall to 0 and (re)climb to x
                Climb c = climb_impl(s, q, rng, x, L);
                if (c.reached_limit) break;
                if (x == 0) {
                    ++visits;
                    continue;
                }
                while (climb_impl(s, q, rng, 0, x).reached_limit == false) {
                }
                ++visits;
            }
            out.push_back(visits);
        }
        return out;
    });
    std::vector<std::uint64_t> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

// ---- Zipf samplers ------------------------------------------------------

std::vector<std::uint64_t> primes_up_to(std::uint64_t n) {
    std::vector<bool> composite(n + 1, false);
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 2; i <= n; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= n; j += i) composite[j] = true;
    }
    return out;
}

bool is_smooth(std::uint64_t v, std::uint64_t pmax) {
    if (v == 0) return false;
    for (std::uint64_t p = 2; p <= pmax && v > 1; ++p)
        while (v % p == 0) v /= p;
    return v == 1;
}

PrimeZipfSample zipf_prime_sampler(double alpha, const RunConfig& cfg, std::uint64_t n, std::uint64_t pmax) {
    if (!(alpha > 1)) throw InvalidParameter("alpha > 1", "zipf sampler");
    std::vector<std::uint64_t> primes = primes_up_to(pmax);
    std::vector<double> rate(primes.size());
    double log_smooth_zeta = 0.0;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        double lp = std::log(static_cast<double>(primes[i]));
        rate[i] = alpha * lp;
        log_smooth_zeta -= std::log1p(-std::exp(-alpha * lp));
    }
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        std::vector<std::uint64_t> out;
        std::uint64_t want = replication_share(n, cfg.replications, r);
        out.reserve(want);
        for (std::uint64_t i = 0; i < want; ++i) {
            std::uint64_t y = 1;
            bool overflow = false;
            for (std::size_t j = 0; j < primes.size(); ++j) {
                // G ~ Geometric: P(G = k) = p^{-alpha k} (1 - p^{-alpha})
                double g = std::floor(-std::log(rng.uniform()) / rate[j]);
                for (double k = 0; k < g && !overflow; k += 1.0)
                    overflow = __builtin_mul_overflow(y, primes[j], &y);
            }
            out.push_back(overflow ? std::numeric_limits<std::uint64_t>::max() : y);
        }
        return out;
    });
    PrimeZipfSample out;
    for (auto& p : parts) out.values.insert(out.values.end(), p.begin(), p.end());
    for (auto v : out.values)
        if (v == std::numeric_limits<std::uint64_t>::max()) ++out.overflowed;
    out.smooth_probability = std::exp(log_smooth_zeta) / zeta(alpha);
    return out;
}

ZipfInverseCdf::ZipfInverseCdf(double alpha, std::size_t table) : alpha_(alpha), zeta_(0.0) {
    if (!(alpha > 1)) throw InvalidParameter("alpha > 1", "zipf sampler");
    zeta_ = zeta(alpha);
    survival_.resize(table + 1);
    survival_[0] = 1.0;
    for (std::size_t x = 1; x <= table; ++x) survival_[x] = zeta_tail(alpha, static_cast<double>(x + 1)) / zeta_;
}

double ZipfInverseCdf::survival(std::uint64_t x) const {
    if (x < survival_.size()) return survival_[x];
    return zeta_tail(alpha_, static_cast<double>(x) + 1.0) / zeta_;
}

std::uint64_t ZipfInverseCdf::operator()(Stream& rng) const {
    // smallest x with P(Y > x) < V
    double v = rng.uniform();
    std::size_t T = survival_.size() - 1;
    if (survival_[T] < v) {
        auto it = std::lower_bound(survival_.begin(), survival_.end(), v, std::greater_equal<double>());
        return static_cast<std::uint64_t>(it - survival_.begin());
    }
    std::uint64_t lo = T;  // survival(lo) >= v
    std::uint64_t hi = 2 * T;
    constexpr std::uint64_t kTop = std::uint64_t{1} << 62;
    while (hi < kTop && survival(hi) >= v) {
        lo = hi;
        hi *= 2;
    }
    if (hi >= kTop) return kTop;
    while (hi - lo > 1) {
        std::uint64_t mid = lo + (hi - lo) / 2;
        if (survival(mid) >= v)
            lo = mid;
        else
            hi = mid;
    }
    return hi;
}

std::vector<std::uint64_t> zipf_inverse_cdf_samples(double alpha, const RunConfig& cfg, std::uint64_t n) {
    ZipfInverseCdf sampler(alpha);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t r) {
        Stream rng(cfg.seed, r);
        std::vector<std::uint64_t> out;
        std::uint64_t want = replication_share(n, cfg.replications, r);
        out.reserve(want);
        for (std::uint64_t i = 0; i < want; ++i) out.push_back(sampler(rng));
        return out;
    });
    std::vector<std::uint64_t> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

// ---- limit laws ---------------------------------------------------------

double JumpLaw::pgf(double z) const {
    double acc = 0.0;
    double zk = 1.0;
    for (double p : probs) {
        zk *= z;
        acc += p * zk;
    }
    return acc;
}

namespace {

void check_jump_law(const JumpLaw& h) {
    double total = 0.0;
    for (double p : h.probs) {
        if (!(p >= 0)) throw InvalidParameter("jump probabilities >= 0", "");
        total += p;
    }
    if (std::fabs(total - 1.0) > 1e-12) throw InvalidParameter("jump probabilities sum to 1", "");
}

void check_limit_time(double t) {
    if (!(std::exp(-t) < 1e-4)) throw InvalidParameter("exp(-t) < 1e-4", "limit-law generator");
}

std::uint64_t draw_jump(const JumpLaw& h, Stream& rng) {
    double u = rng.uniform();
    double c = 0.0;
    for (std::size_t k = 0; k < h.probs.size(); ++k) {
        c += h.probs[k];
        if (u <= c) return k + 1;
    }
    return h.probs.size();
}

}  // namespace

double id_limit_pgf(double r, const JumpLaw& h, double z) { return std::exp(-r * (1.0 - h.pgf(z))); }

double sd_limit_pgf(double r, const JumpLaw& h, double z) {
    // (1 - h(s))/(1 - s) = sum_k h_k (1 + s + ... + s^{k-1})
    auto integrand = [&h](double s) {
        double acc = 0.0;
        double partial = 0.0;
        double sk = 1.0;
        for (double p : h.probs) {
            partial += sk;
            sk *= s;
            acc += p * partial;
        }
        return acc;
    };
    double I = boost::math::quadrature::gauss<double, 30>::integrate(integrand, z, 1.0);
    return std::exp(-r * I);
}

std::vector<std::uint64_t> limit_law_id_generator(double r, const JumpLaw& h, double t, const RunConfig& cfg,
                                                  std::uint64_t n) {
    check_jump_law(h);
    check_limit_time(t);
    double Rt = r * -std::expm1(-t);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t rep) {
        Stream rng(cfg.seed, rep);
        std::vector<std::uint64_t> out;
        std::uint64_t want = replication_share(n, cfg.replications, rep);
        std::poisson_distribution<std::uint64_t> pois(Rt);
        for (std::uint64_t i = 0; i < want; ++i) {
            std::uint64_t N = pois(rng);
            std::uint64_t x = 0;
            for (std::uint64_t k = 0; k < N; ++k) x += draw_jump(h, rng);
            out.push_back(x);
        }
        return out;
    });
    std::vector<std::uint64_t> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

std::vector<std::uint64_t> limit_law_sd_generator(double r, const JumpLaw& h, double t, const RunConfig& cfg,
                                                  std::uint64_t n) {
    check_jump_law(h);
    check_limit_time(t);
    auto parts = run_replications(cfg.replications, cfg.threads, [&](std::uint64_t rep) {
        Stream rng(cfg.seed, rep);
        std::vector<std::uint64_t> out;
        std::uint64_t want = replication_share(n, cfg.replications, rep);
        std::poisson_distribution<std::uint64_t> batches(r * t);
        for (std::uint64_t i = 0; i < want; ++i) {
            std::uint64_t M = batches(rng);
            std::uint64_t x = 0;
            for (std::uint64_t b = 0; b < M; ++b) {
                double age = t * rng.uniform();  // time since arrival
                std::uint64_t size = draw_jump(h, rng);
                std::binomial_distribution<std::uint64_t> alive(size, std::exp(-age));
                x += alive(rng);
            }
            out.push_back(x);
        }
        return out;
    });
    std::vector<std::uint64_t> all;
    for (auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    return all;
}

Estimate empirical_pgf(const std::vector<std::uint64_t>& values, double z) {
    RunningStats st;
    for (auto v : values) st.add(std::pow(z, static_cast<double>(v)));
    return st.estimate();
}

// ---- tests --------------------------------------------------------------

namespace {

double chi2_sf(double stat, std::uint64_t dof) {
    if (dof == 0) return 1.0;
    boost::math::chi_squared_distribution<double> d(static_cast<double>(dof));
    return boost::math::cdf(boost::math::complement(d, stat));
}

}  // namespace

ChiSquareTest chi2_homogeneity(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    std::uint64_t top = 0;
    for (auto v : a) top = std::max(top, v);
    for (auto v : b) top = std::max(top, v);
    std::size_t K = static_cast<std::size_t>(std::min<std::uint64_t>(top, 1 << 20)) + 1;
    std::vector<double> ca(K, 0.0), cb(K, 0.0);
    for (auto v : a) ca[std::min<std::uint64_t>(v, K - 1)] += 1;
    for (auto v : b) cb[std::min<std::uint64_t>(v, K - 1)] += 1;
    double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    // merge bins from the right until each pooled bin has expected count >= 5 in both samples
    std::vector<double> ba, bb;
    double acc_a = 0, acc_b = 0;
    double fa = na / (na + nb), fb = nb / (na + nb);
    for (std::size_t i = 0; i < K; ++i) {
        acc_a += ca[i];
        acc_b += cb[i];
        double pooled = acc_a + acc_b;
        if (pooled * fa >= 5 && pooled * fb >= 5) {
            ba.push_back(acc_a);
            bb.push_back(acc_b);
            acc_a = acc_b = 0;
        }
    }
    if (acc_a + acc_b > 0 && !ba.empty()) {
        ba.back() += acc_a;
        bb.back() += acc_b;
    }
    ChiSquareTest t;
    for (std::size_t i = 0; i < ba.size(); ++i) {
        double pooled = ba[i] + bb[i];
        double ea = pooled * fa, eb = pooled * fb;
        t.statistic += (ba[i] - ea) * (ba[i] - ea) / ea + (bb[i] - eb) * (bb[i] - eb) / eb;
    }
    t.dof = ba.size() > 0 ? ba.size() - 1 : 0;
    t.p_value = chi2_sf(t.statistic, t.dof);
    return t;
}

ChiSquareTest chi2_geometric_fit(const std::vector<std::uint64_t>& values, double ratio) {
    double n = static_cast<double>(values.size());
    std::size_t K = 0;
    while (n * (1 - ratio) * std::pow(ratio, static_cast<double>(K)) >= 5 && K < 10000) ++K;
    // bins 0..K-1 plus the tail {>= K}
    std::vector<double> obs(K + 1, 0.0);
    for (auto v : values) obs[std::min<std::uint64_t>(v, K)] += 1;
    ChiSquareTest t;
    for (std::size_t k = 0; k <= K; ++k) {
        double e = k < K ? n * (1 - ratio) * std::pow(ratio, static_cast<double>(k))
                         : n * std::pow(ratio, static_cast<double>(K));
        if (e <= 0) continue;
        t.statistic += (obs[k] - e) * (obs[k] - e) / e;
    }
    t.dof = K;
    t.p_value = chi2_sf(t.statistic, t.dof);
    return t;
}

}  // namespace disaster

#include "disaster/verify.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <sstream>

#include "disaster/ctmc.hpp"
#include "disaster/divisibility.hpp"
#include "disaster/errors.hpp"
#include "disaster/hitting_times.hpp"
#include "disaster/monte_carlo.hpp"
#include "disaster/products.hpp"
#include "disaster/special_functions.hpp"
#include "disaster/stationary.hpp"

namespace disaster {

namespace {

enum class Models { A, B, Both };

bool has_a(Models m) { return m != Models::B; }
bool has_b(Models m) { return m != Models::A; }

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag) { return seed ^ (tag * 0x9E3779B97F4A7C15ull); }

RunConfig mc_config(const SuiteOptions& o, std::uint64_t tag, std::uint64_t reps = 16) {
    RunConfig c;
    c.seed = mix_seed(o.seed, tag);
    c.replications = reps;
    c.threads = o.threads;
    return c;
}

Delta exact_check(std::string name, double analytic, double oracle, double tol, std::string rule = "abs") {
    Delta d;
    d.name = std::move(name);
    d.analytic = analytic;
    d.oracle = oracle;
    d.tolerance = tol;
    d.rule = rule;
    double err = std::fabs(analytic - oracle);
    if (rule == "rel") err /= std::fabs(oracle);
    d.pass = err <= tol;
    return d;
}

Delta mc_check(std::string name, double analytic, const Estimate& e, double sigmas = 3.0) {
    Delta d;
    d.name = std::move(name);
    d.analytic = analytic;
    d.mc_estimate = e.mean;
    d.mc_stderr = e.std_error;
    d.tolerance = sigmas;
    d.rule = "sigma";
    d.pass = std::fabs(e.mean - analytic) <= sigmas * e.std_error;
    return d;
}

Delta flag_check(std::string name, bool ok) {
    Delta d;
    d.name = std::move(name);
    d.analytic = ok ? 1.0 : 0.0;
    d.oracle = 1.0;
    d.rule = "exact";
    d.pass = ok;
    return d;
}

Delta range_check(std::string name, double value, double lo, double hi) {
    Delta d;
    d.name = std::move(name);
    d.analytic = value;
    d.oracle = 0.5 * (lo + hi);
    d.tolerance = 0.5 * (hi - lo);
    d.rule = "abs";
    d.pass = value >= lo && value <= hi;
    return d;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// ---- 1 ------------------------------------------------------------------

void classification(std::vector<Delta>& out) {
    for (ModelKind k : {ModelKind::A, ModelKind::B})
        for (double beta : {0.5, 1.0, 2.0})
            for (double alpha : {0.5, 2.0}) {
                ModelSpec s = k == ModelKind::A ? ModelSpec::model_a(alpha, beta, 1.0) : ModelSpec::model_b(alpha, beta);
                Recurrence expect = beta > 1   ? Recurrence::Transient
                                    : beta < 1 ? Recurrence::PositiveRecurrent
                                    : alpha > 1 ? Recurrence::PositiveRecurrent
                                                : Recurrence::NullRecurrent;
                Recurrence got = classify(s).recurrence;
                out.push_back(flag_check(describe(s) + " -> " + to_string(got), got == expect));
            }
    for (ModelKind k : {ModelKind::A, ModelKind::B}) {
        ModelSpec base = k == ModelKind::A ? ModelSpec::model_a(0.5, 1, 1.0) : ModelSpec::model_b(0.5, 1);
        out.push_back(flag_check(describe(base.with_ct(0.4)) + " null",
                                 classify(base.with_ct(0.4)).recurrence == Recurrence::NullRecurrent));
        out.push_back(flag_check(describe(base.with_ct(0.8)) + " positive",
                                 classify(base.with_ct(0.8)).recurrence == Recurrence::PositiveRecurrent));
        ModelSpec tr = k == ModelKind::A ? ModelSpec::model_a(0.5, 2, 1.0) : ModelSpec::model_b(0.5, 2);
        out.push_back(flag_check(describe(tr.with_ct(0.5)) + " not explosive", classify(tr.with_ct(0.5)).ct_explosive == false));
        out.push_back(flag_check(describe(tr.with_ct(2)) + " explosive", classify(tr.with_ct(2)).ct_explosive == true));
    }
}

// ---- 2 ------------------------------------------------------------------

void mean_return_time_three_ways(Models m, const SuiteOptions& o, std::uint64_t excursions, std::vector<Delta>& out) {
    std::vector<std::pair<ModelSpec, double>> points;
    if (has_a(m)) points.push_back({ModelSpec::model_a(2, 1, 1), 2.0});
    if (has_b(m)) points.push_back({ModelSpec::model_b(2, 1), 1.0 + zeta(2)});
    std::uint64_t tag = 20;
    for (auto& [s, closed] : points) {
        out.push_back(exact_check(describe(s) + " mu closed form", mean_return_time(s), closed, 1e-12, "rel"));
        auto pmf = return_time_pmf(s, 1'000'000);
        CompensatedSum acc;
        for (std::size_t x = 0; x < pmf.masses.size(); ++x) acc += (static_cast<double>(x) + 1.0) * pmf.masses[x];
        out.push_back(exact_check(describe(s) + " mu sum_{x<=1e6} (x+1) P(tau=x+1)", acc.value(), closed, 1e-4));
        auto cfg = mc_config(o, ++tag);
        auto batch = sample_excursions_stepwise(s, cfg, excursions);
        RunningStats st;
        for (auto& e : batch.samples) st.add(static_cast<double>(e.dt_length));
        Estimate e = st.estimate();
        Delta d = mc_check(describe(s) + " mu Monte Carlo (" + std::to_string(batch.samples.size()) + " excursions)",
                           closed, e);
        // degenerate chains have zero variance: require exact agreement
        if (e.std_error == 0.0) d.pass = e.mean == closed;
        if (batch.escaped) d.pass = false;
        out.push_back(d);
    }
}

// ---- 3 ------------------------------------------------------------------

std::vector<std::vector<std::vector<double>>> truncated_powers(const ModelSpec& s, std::size_t states, std::size_t nmax) {
    std::vector<std::vector<double>> P(states, std::vector<double>(states, 0.0));
    for (std::size_t x = 0; x < states; ++x) {
        double p = growth_prob(s, x);
        if (x + 1 < states) {
            P[x][x + 1] = p;
            P[x][0] += 1 - p;
        } else {
            P[x][0] += 1.0;
        }
    }
    std::vector<std::vector<std::vector<double>>> out;
    std::vector<std::vector<double>> cur(states, std::vector<double>(states, 0.0));
    for (std::size_t i = 0; i < states; ++i) cur[i][i] = 1.0;
    for (std::size_t n = 0; n <= nmax; ++n) {
        out.push_back(cur);
        std::vector<std::vector<double>> next(states, std::vector<double>(states, 0.0));
        for (std::size_t i = 0; i < states; ++i)
            for (std::size_t k = 0; k < states; ++k)
                if (cur[i][k] != 0.0)
                    for (std::size_t j = 0; j < states; ++j) next[i][j] += cur[i][k] * P[k][j];
        cur = std::move(next);
    }
    return out;
}

void green_oracle(Models m, std::vector<Delta>& out) {
    std::vector<ModelSpec> specs;
    if (has_a(m)) specs.push_back(ModelSpec::model_a(1.5, 1, 1));
    if (has_b(m)) specs.push_back(ModelSpec::model_b(1.5, 1));
    for (auto& s : specs) {
        auto Pn = truncated_powers(s, 60, 25);
        double err = 0.0;
        for (std::uint64_t x = 0; x <= 5; ++x)
            for (std::uint64_t y = 0; y <= 5; ++y) {
                PowerSeries g = green_kernel(s, x, y, 26);
                for (std::size_t n = 0; n <= 25; ++n) err = std::max(err, std::fabs(g[n] - Pn[n][x][y]));
            }
        out.push_back(exact_check(describe(s) + " max |[z^n]g_xy - P^n(x,y)|, x,y<=5, n<=25", err, 0.0, 1e-10));
    }
}

// ---- 4 ------------------------------------------------------------------

double fitted_slope(const std::vector<double>& u, std::size_t lo, std::size_t hi) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (int i = 0; i <= 40; ++i) {
        double x = std::round(static_cast<double>(lo) * std::pow(static_cast<double>(hi) / static_cast<double>(lo), i / 40.0));
        double lx = std::log(x), ly = std::log(u[static_cast<std::size_t>(x)]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        ++n;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

void contact_regimes(Models m, std::vector<Delta>& out) {
    std::vector<ModelSpec> pos, alg;
    if (has_a(m)) {
        pos.push_back(ModelSpec::model_a(2, 1, 2));
        alg.push_back(ModelSpec::model_a(0.5, 1, 1));
    }
    if (has_b(m)) {
        pos.push_back(ModelSpec::model_b(2, 1));
        alg.push_back(ModelSpec::model_b(0.5, 1));
    }
    for (auto& s : pos) {
        auto u = contact_probability(s, 10'000);
        out.push_back(exact_check(describe(s) + " P0(X_n=0) at n=1e4 vs pi0", u[10'000], stationary_atom(s), 1e-3));
    }
    for (auto& s : alg) {
        auto u = contact_probability(s, 10'000);
        out.push_back(exact_check(describe(s) + " log-log slope on [1e3,1e4]", fitted_slope(u, 1000, 10'000),
                                  -(1 - s.alpha), 0.05));
    }
    if (has_a(m)) {
        auto s = ModelSpec::model_a(1, 1, 2);
        auto u = contact_probability(s, 100'000);
        double v = std::log(1e5) * u[100'000];
        out.push_back(exact_check(describe(s) + " (log n) P0(X_n=0) at n=1e5 vs 1/(p0 nu)", v, 1 / (s.p0 * 2), 0.10, "rel"));
        auto s1 = ModelSpec::model_a(1, 1, 1);
        auto u1 = contact_probability(s1, 100'000);
        Delta info = exact_check(describe(s1) + " (log n) P0(X_n=0) at n=1e5 vs 1/(p0 nu) [slow log convergence, info]",
                                 std::log(1e5) * u1[100'000], 1.0, 0.10, "rel");
        info.gating = false;
        out.push_back(info);
    }
}

// ---- 5 ------------------------------------------------------------------

void scale_height_duality(Models m, std::vector<Delta>& out) {
    std::vector<ModelSpec> specs;
    if (has_a(m))
        for (auto s : {ModelSpec::model_a(1.5, 1, 1), ModelSpec::model_a(0.5, 1, 0.5, 0.7), ModelSpec::model_a(0.8, 0.5, 1),
                       ModelSpec::model_a(1, 2, 0.5, 0.3), ModelSpec::model_a(2, 1, 2), ModelSpec::model_a(0.7, 1, -0.2)})
            specs.push_back(s);
    if (has_b(m))
        for (auto s : {ModelSpec::model_b(2, 1), ModelSpec::model_b(0.5, 1, 0.6), ModelSpec::model_b(1.5, 2),
                       ModelSpec::model_b(0.7, 0.5, 0.3), ModelSpec::model_b(1, 1), ModelSpec::model_b(3, 1.5, 0.9)})
            specs.push_back(s);
    for (auto& s : specs) {
        HeightLaw h = height_law(s, 1000);
        double dual = 0.0, telescoping = 0.0;
        CompensatedSum below;
        below += h.atom_at_zero;
        for (std::uint64_t k = 1; k <= 1000; ++k) {
            double tail = height_tail(s, k);
            dual = std::max(dual, std::fabs(tail * scale_function(s, k) - 1.0));
            telescoping = std::max(telescoping, std::fabs(below.value() + tail - 1.0));
            below += h.masses.at(static_cast<std::int64_t>(k));
        }
        out.push_back(exact_check(describe(s) + " max |P(H>=h) phi(h) - 1|, h<=1000", dual, 0.0, 1e-12));
        out.push_back(exact_check(describe(s) + " max |P(H<h) + P(H>=h) - 1|, h<=1000", telescoping, 0.0, 1e-12));
    }
}

// ---- 6 ------------------------------------------------------------------

void extinction(const SuiteOptions& o, std::uint64_t runs, std::vector<Delta>& out) {
    ModelSpec s = ModelSpec::model_a(0.5, 2, 0.5);
    const std::uint64_t Y = 2'000'000;
    double worst = 0.0;
    for (std::uint64_t x = 1; x <= 50; ++x) {
        // resolvent series sum_{y>=x} q_y prod_{x<=y'<y} p_y' summed to x+Y, remainder
        // P_Y (1 - exp(-sum_{y>=x+Y} q_y)) with the q-tail from zeta tails
        CompensatedSum acc;
        double L = 0.0;
        for (std::uint64_t y = x; y < x + Y; ++y) {
            acc += disaster_prob(s, y) * std::exp(L);
            L += log_growth_prob(s, y);
        }
        double n0 = static_cast<double>(x + Y);
        double qtail = s.alpha * (zeta_tail(2, n0) - s.nu_or_zero() * zeta_tail(4, n0) +
                                  s.nu_or_zero() * s.nu_or_zero() * zeta_tail(6, n0));
        double series = acc.value() + std::exp(L) * -std::expm1(-qtail);
        worst = std::max(worst, std::fabs(series - extinction_prob(s, x)));
    }
    out.push_back(exact_check(describe(s) + " max_x<=50 |1 - prod p - resolvent series|", worst, 0.0, 1e-10));
    std::uint64_t tag = 60;
    for (std::uint64_t x : {1, 5, 20}) {
        Estimate e = hit_zero_frequency(s, mc_config(o, ++tag), x, runs);
        out.push_back(mc_check(describe(s) + " MC P(hit 0 from " + std::to_string(x) + ")", extinction_prob(s, x), e));
    }
}

// ---- 7 ------------------------------------------------------------------

void ct_tail(const SuiteOptions& o, std::vector<Delta>& out) {
    ModelSpec s = ModelSpec::model_b(0.5, 1).with_ct(0.5, 1.0);
    auto batch = sample_excursions(s, mc_config(o, 70), 1'000'000, true);
    std::vector<double> len;
    len.reserve(batch.samples.size());
    for (auto& e : batch.samples) len.push_back(*e.ct_length);
    double target = ct_excursion_tail_exponent(s).exponent;
    double est = hill_tail_exponent(len, 1000);
    Delta d = range_check(describe(s) + " Hill exponent (k=1000, 1e6 CT excursions)", est, 0.85, 1.15);
    d.oracle = target;
    out.push_back(d);
}

// ---- 8 ------------------------------------------------------------------

void divisibility_thresholds(std::vector<Delta>& out) {
    const double alpha = 1.5;
    const std::size_t n = 400;
    double last_id = -1, first_non_id = -1, last_sd = -1, first_non_sd = -1;
    double worst_rt = 0.0;
    bool sd_implies_id = true;
    for (int i = 1; i <= 100; ++i) {
        double p0 = i / 100.0;
        PmfTable pmf = sibuya_stationary_pmf(alpha, p0, n + 2);
        DivisibilityVerdict v = classify_divisibility(pmf, n);
        worst_rt = std::max(worst_rt, round_trip_error(canonical_sequence(pmf, n)));
        sd_implies_id = sd_implies_id && (!v.sd || v.id);
        if (v.inconclusive) continue;
        if (v.id) last_id = p0;
        if (!v.id && first_non_id < 0) first_non_id = p0;
        if (v.sd) last_sd = p0;
        if (!v.sd && first_non_sd < 0) first_non_sd = p0;
    }
    double id_flip = first_non_id > 0 && last_id < first_non_id ? 0.5 * (last_id + first_non_id) : -1;
    double sd_flip = first_non_sd > 0 && last_sd < first_non_sd ? 0.5 * (last_sd + first_non_sd) : -1;
    out.push_back(exact_check("model A nu=1 alpha=1.5: id flip point on p0 grid", id_flip, 2 - alpha, 0.02));
    out.push_back(exact_check("model A nu=1 alpha=1.5: sd flip point on p0 grid", sd_flip, 1 - alpha / 2, 0.02));
    out.push_back(exact_check("max canonical-sequence round-trip error", worst_rt, 0.0, 1e-10));
    out.push_back(flag_check("sd implies id on the grid", sd_implies_id));
}

// ---- 9 ------------------------------------------------------------------

void complete_monotonicity(std::vector<Delta>& out) {
    for (double alpha : {0.5, 1.0, 1.5}) {
        std::vector<double> tail(56);
        for (std::size_t x = 0; x < tail.size(); ++x) tail[x] = std::exp(-alpha * std::log(static_cast<double>(x) + 1.0));
        auto c = complete_monotonicity_check(tail, 5, 1e-12);
        out.push_back(flag_check("Pareto tail (x+1)^-" + fmt(alpha) + " completely monotone to order 5, x<=50", c.pass));
    }
}

// ---- 10 -----------------------------------------------------------------

void limit_laws(const SuiteOptions& o, std::vector<Delta>& out) {
    JumpLaw h{{0.5, 0.5}};
    const double r = 2.0, t = 12.0;
    auto id = limit_law_id_generator(r, h, t, mc_config(o, 100), 100'000);
    auto sd = limit_law_sd_generator(r, h, t, mc_config(o, 101), 100'000);
    for (double z : {0.2, 0.5, 0.8}) {
        out.push_back(mc_check("ID compound Poisson pgf at z=" + fmt(z), id_limit_pgf(r, h, z), empirical_pgf(id, z)));
        out.push_back(mc_check("SD immigration-death pgf at z=" + fmt(z), sd_limit_pgf(r, h, z), empirical_pgf(sd, z)));
    }
}

// ---- 11 -----------------------------------------------------------------

void renewal_identities(Models m, const SuiteOptions& o, std::vector<Delta>& out) {
    std::vector<ModelSpec> specs;
    if (has_a(m)) {
        specs.push_back(ModelSpec::model_a(2, 1, 2, 0.6));
        specs.push_back(ModelSpec::model_a(0.8, 0.5, 1));
    }
    if (has_b(m)) {
        specs.push_back(ModelSpec::model_b(2, 1, 0.5));
        specs.push_back(ModelSpec::model_b(1.5, 0.7, 0.8));
    }
    std::uint64_t tag = 110;
    for (auto& s : specs) {
        PmfTable pi = invariant_dt(s, 2000);
        double mu = mean_return_time(s);
        double err = 0.0;
        for (std::int64_t x = 0; x <= 2000; ++x) err = std::max(err, std::fabs(pi.at(x) - return_time_tail(s, x) / mu));
        out.push_back(exact_check(describe(s) + " max |pi_x - P(tau>x)/mu|", err, 0.0, 1e-10));

        RunConfig cfg = mc_config(o, ++tag, 1);
        cfg.horizon = 1e7;
        double tv = total_variation(backward_recurrence_law(s, cfg), invariant_dt(s, 20000));
        out.push_back(exact_check(describe(s) + " TV(backward recurrence time at 1e7 steps, pi)", tv, 0.0, 0.01));

        auto st = renewal_delta_stats(s, mc_config(o, ++tag), 1'000'000);
        double c2 = mu - 1.0;
        double q0 = 1.0 - s.p0;
        out.push_back(mc_check(describe(s) + " idle mean q0/p0", q0 / s.p0, st.idle));
        out.push_back(mc_check(describe(s) + " busy mean 1 + C2/p0", 1.0 + c2 / s.p0, st.busy));
        out.push_back(mc_check(describe(s) + " Delta mean mu/p0", mu / s.p0, st.delta));
    }
}

using Body = std::function<void(std::vector<Delta>&)>;

CriterionResult timed(int id, std::string title, const Body& body) {
    CriterionResult r;
    r.id = id;
    r.title = std::move(title);
    auto t0 = std::chrono::steady_clock::now();
    try {
        body(r.deltas);
    } catch (const std::exception& e) {
        Delta d;
        d.name = std::string("exception: ") + e.what();
        d.pass = false;
        r.deltas.push_back(d);
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (auto& d : r.deltas)
        if (d.gating && !d.pass) r.pass = false;
    return r;
}

}  // namespace

std::vector<std::string> suite_names() {
    return {"acceptance", "critical-modelA", "critical-modelB", "transient", "divisibility", "limit-laws"};
}

CriterionResult run_criterion(int id, const SuiteOptions& o) {
    switch (id) {
        case 1: return timed(1, "classification matrix and CT overlay", classification);
        case 2:
            return timed(2, "mean return time: closed form, series, Monte Carlo",
                         [&](auto& d) { mean_return_time_three_ways(Models::Both, o, 1'000'000, d); });
        case 3: return timed(3, "Green kernel vs truncated matrix powers", [](auto& d) { green_oracle(Models::Both, d); });
        case 4: return timed(4, "contact-probability regimes", [](auto& d) { contact_regimes(Models::Both, d); });
        case 5: return timed(5, "scale/height duality", [](auto& d) { scale_height_duality(Models::Both, d); });
        case 6: return timed(6, "extinction probabilities", [&](auto& d) { extinction(o, 1'000'000, d); });
        case 7: return timed(7, "CT excursion tail exponent", [&](auto& d) { ct_tail(o, d); });
        case 8: return timed(8, "divisibility thresholds", divisibility_thresholds);
        case 9: return timed(9, "complete monotonicity of Pareto tails", complete_monotonicity);
        case 10: return timed(10, "ID and SD limit laws", [&](auto& d) { limit_laws(o, d); });
        case 11: return timed(11, "renewal identities", [&](auto& d) { renewal_identities(Models::Both, o, d); });
        default: throw InvalidParameter("criterion in 1..11", std::to_string(id));
    }
}

std::vector<CriterionResult> run_suite(const std::string& name, const SuiteOptions& o) {
    std::vector<CriterionResult> out;
    if (name == "acceptance") {
        for (int i = 1; i <= 11; ++i) out.push_back(run_criterion(i, o));
        return out;
    }
    if (name == "critical-modelA" || name == "critical-modelB") {
        Models m = name == "critical-modelA" ? Models::A : Models::B;
        out.push_back(timed(2, "mean return time", [&](auto& d) { mean_return_time_three_ways(m, o, 200'000, d); }));
        out.push_back(timed(3, "Green kernel", [&](auto& d) { green_oracle(m, d); }));
        out.push_back(timed(4, "contact regimes", [&](auto& d) { contact_regimes(m, d); }));
        out.push_back(timed(5, "scale/height duality", [&](auto& d) { scale_height_duality(m, d); }));
        out.push_back(timed(11, "renewal identities", [&](auto& d) { renewal_identities(m, o, d); }));
        return out;
    }
    if (name == "transient") {
        out.push_back(timed(6, "extinction probabilities", [&](auto& d) { extinction(o, 200'000, d); }));
        return out;
    }
    if (name == "divisibility") {
        out.push_back(run_criterion(8, o));
        out.push_back(run_criterion(9, o));
        return out;
    }
    if (name == "limit-laws") {
        out.push_back(run_criterion(10, o));
        return out;
    }
    throw InvalidParameter("suite is one of acceptance, critical-modelA, critical-modelB, transient, divisibility, limit-laws",
                           name);
}

}  // namespace disaster

// Command-line front end: one subcommand per analytic family, each writing a
// CSV table (index, analytic, oracle, mc_estimate, mc_stderr) and a JSON sidecar.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "cli_io.hpp"
#include "disaster/ctmc.hpp"
#include "disaster/divisibility.hpp"
#include "disaster/errors.hpp"
#include "disaster/hitting_times.hpp"
#include "disaster/monte_carlo.hpp"
#include "disaster/special_functions.hpp"
#include "disaster/stationary.hpp"
#include "disaster/verify.hpp"

using namespace disaster;
using cli::Cell;
using cli::Json;
using cli::Kind;
using cli::OptionDef;
using cli::Result;
using cli::Settings;
using cli::Table;

namespace {

constexpr const char* kDefaultSeed = "20240101";

std::vector<OptionDef> common_options() {
    return {
        {"config", Kind::Text, "JSON file with default values for any option", std::nullopt},
        {"seed", Kind::Count, "master seed", kDefaultSeed},
        {"threads", Kind::Count, "worker threads (0: all cores)", "0"},
        {"out_dir", Kind::Text, "directory for CSV/JSON artifacts", "."},
        {"tag", Kind::Text, "file tag used instead of the timestamp; makes artifacts deterministic", std::nullopt},
    };
}

std::vector<OptionDef> model_options() {
    return {
        {"model", Kind::Text, "A or B", std::nullopt},
        {"alpha", Kind::Number, "alpha > 0", std::nullopt},
        {"beta", Kind::Number, "beta", "1"},
        {"nu", Kind::Number, "nu > -1 (model A only)", std::nullopt},
        {"p0", Kind::Number, "growth probability at 0, in (0,1]", "1"},
        {"lambda", Kind::Number, "CT rate exponent; enables the continuous-time layer", std::nullopt},
        {"r0", Kind::Number, "CT base rate", "1"},
    };
}

RunConfig mc_config(const Settings& s, std::uint64_t reps) {
    RunConfig c;
    c.seed = s.count("seed");
    c.threads = static_cast<unsigned>(s.count("threads"));
    c.replications = std::max<std::uint64_t>(1, reps);
    return c;
}

std::uint64_t mc_reps(const Settings& s, std::uint64_t n) { return std::min<std::uint64_t>(s.count("reps"), n); }

Cell num(double v) { return v; }

Table make_table(std::string index) { return Table{{std::move(index), "analytic", "oracle", "mc_estimate", "mc_stderr"}, {}}; }

std::pair<Cell, Cell> frequency(std::uint64_t hits, std::uint64_t n) {
    if (n == 0) return {std::monostate{}, std::monostate{}};
    double f = static_cast<double>(hits) / static_cast<double>(n);
    return {f, std::sqrt(f * (1 - f) / static_cast<double>(n))};
}

std::string fixed(double v) {
    std::ostringstream os;
    os.precision(10);
    os << v;
    return os.str();
}

// ---- classify -----------------------------------------------------------

Result classify_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s);
    r.spec = spec;
    ChainClassification c = classify(spec);
    CriterionReport cr = criteria(spec);
    r.text = to_string(c.recurrence) + "\n";
    r.summary["recurrence"] = to_string(c.recurrence);
    r.summary["dt_recurrence"] = to_string(classify_dt(spec));
    r.summary["c1_finite"] = cr.c1_finite;
    r.summary["c2_finite"] = cr.c2_finite;
    if (cr.c2_value) r.summary["c2_value"] = *cr.c2_value;
    if (c.ct_explosive) {
        r.summary["ct_explosive"] = *c.ct_explosive;
        r.text += *c.ct_explosive ? "explosive\n" : "non-explosive\n";
    }
    return r;
}

// ---- invariant ----------------------------------------------------------

Result invariant_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s);
    r.spec = spec;
    std::size_t xmax = s.count("xmax");
    bool ct = spec.ct.has_value();
    PmfTable pi = ct ? invariant_ct(spec, xmax) : invariant_dt(spec, xmax);
    // oracle: P(tau_00 > x) (x+1)^-lambda normalized by the C2-type sum
    std::optional<double> norm;
    if (pi.normalized) {
        double lambda = ct ? spec.ct->lambda : 0.0;
        norm = 1.0 + weighted_mass_tail(spec, lambda, 0);
    }
    std::vector<double> mc;
    if (s.count("mc_steps") > 0) {
        if (ct) throw cli::UsageError("--mc-steps is available for the discrete-time chain only");
        RunConfig c = mc_config(s, 1);
        c.horizon = static_cast<double>(s.count("mc_steps"));
        mc = backward_recurrence_law(spec, c);
        mc.resize(xmax + 1, 0.0);
    }
    Table t = make_table("x");
    for (std::size_t x = 0; x <= xmax; ++x) {
        std::optional<double> oracle;
        if (norm) {
            double w = ct ? std::pow(static_cast<double>(x) + 1.0, -spec.ct->lambda) : 1.0;
            oracle = return_time_tail(spec, x) * w / *norm;
        }
        t.rows.push_back({num(static_cast<double>(x)), pi.masses[x], cli::cell(oracle),
                          mc.empty() ? Cell{} : Cell{mc[x]}, Cell{}});
    }
    r.table = std::move(t);
    r.summary["normalized"] = pi.normalized;
    r.summary["tail_mass_bound"] = pi.tail_mass_bound;
    r.summary["layer"] = ct ? "ct" : "dt";
    if (!mc.empty()) r.summary["mc_steps"] = s.count("mc_steps");
    r.text = (pi.normalized ? "invariant law" : "invariant measure (not normalizable)") + std::string(", x <= ") +
             std::to_string(xmax) + "; pi_0 = " + fixed(pi.masses[0]) + "\n";
    return r;
}

// ---- return-time --------------------------------------------------------

Result return_time_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s).without_ct();
    r.spec = spec;
    std::size_t xmax = s.count("xmax");
    PmfTable pmf = return_time_pmf(spec, xmax);
    PowerSeries series = return_time_series(spec, xmax + 2);
    std::uint64_t n_mc = s.count("mc");
    std::vector<std::uint64_t> hits(xmax + 2, 0);
    std::uint64_t done = 0;
    RunningStats mean;
    if (n_mc > 0) {
        RunConfig c = mc_config(s, mc_reps(s, n_mc));
        ExcursionBatch b = sample_excursions_stepwise(spec, c, n_mc);
        for (auto& e : b.samples) {
            if (e.dt_length <= xmax + 1) ++hits[e.dt_length];
            mean.add(static_cast<double>(e.dt_length));
        }
        done = n_mc;
        r.summary["mc_unfinished"] = b.escaped;
    }
    Table t = make_table("n");
    for (std::size_t n = 1; n <= xmax + 1; ++n) {
        auto [f, se] = n_mc ? frequency(hits[n], done) : std::pair<Cell, Cell>{};
        t.rows.push_back({num(static_cast<double>(n)), pmf.at(static_cast<std::int64_t>(n)), series[n], f, se});
    }
    r.table = std::move(t);
    double mu = mean_return_time(spec);
    r.summary["mean_return_time"] = std::isfinite(mu) ? Json(mu) : Json("inf");
    r.summary["defect"] = pmf.defect;
    r.summary["tail_mass_bound"] = pmf.tail_mass_bound;
    if (n_mc) {
        Estimate e = mean.estimate();
        r.summary["mc_mean"] = e.mean;
        r.summary["mc_mean_stderr"] = e.std_error;
        Delta d{"mean return time", mu, std::nullopt, e.mean, e.std_error, 3.0, "sigma", true, true};
        d.pass = std::isfinite(mu) && std::fabs(e.mean - mu) <= 3.0 * e.std_error;
        r.deltas.push_back(d);
    }
    r.text = "mean return time " + (std::isfinite(mu) ? fixed(mu) : std::string("inf")) + ", P(tau = inf) = " +
             fixed(pmf.defect) + "\n";
    return r;
}

// ---- heights ------------------------------------------------------------

Result heights_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s).without_ct();
    r.spec = spec;
    std::size_t hmax = s.count("hmax");
    std::uint64_t n_mc = s.count("mc");
    std::vector<std::uint64_t> at_least(hmax + 1, 0);
    std::uint64_t total = 0;
    if (n_mc > 0) {
        ExcursionBatch b = sample_excursions(spec, mc_config(s, mc_reps(s, n_mc)), n_mc);
        for (auto& e : b.samples) ++at_least[std::min<std::uint64_t>(e.height, hmax)];
        for (std::size_t h = hmax; h-- > 0;) at_least[h] += at_least[h + 1];
        at_least[0] += b.escaped;
        for (std::size_t h = 1; h <= hmax; ++h) at_least[h] += b.escaped;
        total = n_mc;
    }
    Table t = make_table("h");
    CompensatedSum logp;
    for (std::size_t h = 0; h <= hmax; ++h) {
        // oracle: P(H >= h) = prod_{y<h} p_y
        auto [f, se] = n_mc ? frequency(at_least[h], total) : std::pair<Cell, Cell>{};
        t.rows.push_back({num(static_cast<double>(h)), height_tail(spec, h), std::exp(logp.value()), f, se});
        logp += log_growth_prob(spec, h);
    }
    r.table = std::move(t);
    r.summary["quantity"] = "P(H >= h)";
    r.text = "P(H >= " + std::to_string(hmax) + ") = " + fixed(height_tail(spec, hmax)) + "\n";
    return r;
}

// ---- green --------------------------------------------------------------

// n-step law from `start`, exact on states 0..start+steps.
std::vector<std::vector<double>> propagate(const ModelSpec& spec, std::uint64_t start, std::size_t steps) {
    std::size_t top = start + steps + 1;
    std::vector<double> q(top + 1);
    for (std::size_t x = 0; x <= top; ++x) q[x] = disaster_prob(spec, x);
    std::vector<std::vector<double>> out;
    std::vector<double> v(top + 1, 0.0), w(top + 1);
    v[start] = 1.0;
    out.push_back(v);
    for (std::size_t n = 1; n <= steps; ++n) {
        std::fill(w.begin(), w.end(), 0.0);
        CompensatedSum zero;
        std::size_t reach = std::min(top - 1, start + n - 1);
        for (std::size_t x = 0; x <= reach; ++x) {
            if (v[x] == 0.0) continue;
            zero += v[x] * q[x];
            w[x + 1] += v[x] * (1.0 - q[x]);
        }
        w[0] += zero.value();
        v.swap(w);
        out.push_back(v);
    }
    return out;
}

Result green_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s).without_ct();
    r.spec = spec;
    std::uint64_t x = s.count("x"), y = s.count("y");
    std::size_t order = s.count("order");
    PowerSeries g = green_kernel(spec, x, y, order + 1);
    auto laws = propagate(spec, x, order);
    Table t = make_table("n");
    double worst = 0.0;
    for (std::size_t n = 0; n <= order; ++n) {
        double oracle = y < laws[n].size() ? laws[n][y] : 0.0;
        worst = std::max(worst, std::fabs(g[n] - oracle));
        t.rows.push_back({num(static_cast<double>(n)), g[n], oracle, Cell{}, Cell{}});
    }
    r.table = std::move(t);
    r.summary["x"] = x;
    r.summary["y"] = y;
    r.summary["max_abs_error"] = worst;
    r.deltas.push_back({"max |g coefficient - matrix power|", std::nullopt, worst, std::nullopt, std::nullopt, 1e-10,
                        "abs", worst <= 1e-10, true});
    r.text = "g_{" + std::to_string(x) + "," + std::to_string(y) + "} coefficients 0.." + std::to_string(order) +
             ", max |series - matrix power| = " + fixed(worst) + "\n";
    return r;
}

// ---- contact ------------------------------------------------------------

Result contact_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s).without_ct();
    r.spec = spec;
    std::size_t nmax = s.count("nmax");
    std::vector<double> u = contact_probability(spec, nmax);
    std::size_t oracle_max = std::min<std::size_t>(nmax, s.count("oracle_max"));
    std::vector<double> direct(oracle_max + 1);
    {
        // propagate the law from 0, keeping only u_n
        std::size_t top = oracle_max + 1;
        std::vector<double> q(top + 1);
        for (std::size_t x = 0; x <= top; ++x) q[x] = disaster_prob(spec, x);
        std::vector<double> v(top + 1, 0.0), w(top + 1);
        v[0] = 1.0;
        direct[0] = 1.0;
        for (std::size_t n = 1; n <= oracle_max; ++n) {
            std::fill(w.begin(), w.end(), 0.0);
            CompensatedSum zero;
            for (std::size_t x = 0; x < n && x < top; ++x) {
                zero += v[x] * q[x];
                w[x + 1] += v[x] * (1.0 - q[x]);
            }
            w[0] = zero.value();
            v.swap(w);
            direct[n] = v[0];
        }
    }
    Table t = make_table("n");
    double worst = 0.0;
    for (std::size_t n = 0; n <= nmax; ++n) {
        std::optional<double> o;
        if (n <= oracle_max) {
            o = direct[n];
            worst = std::max(worst, std::fabs(u[n] - direct[n]));
        }
        t.rows.push_back({num(static_cast<double>(n)), u[n], cli::cell(o), Cell{}, Cell{}});
    }
    r.table = std::move(t);
    if (classify_dt(spec) != Recurrence::Transient && spec.critical()) {
        ContactAsymptote a = contact_asymptote(spec);
        r.summary["regime"] = to_string(a.regime);
        r.summary["constant"] = a.constant;
        r.summary["exponent"] = a.exponent;
        r.summary["asymptote_at_nmax"] = a(static_cast<double>(nmax));
        r.text = "regime " + to_string(a.regime) + ", u_" + std::to_string(nmax) + " = " + fixed(u[nmax]) +
                 ", asymptote " + fixed(a(static_cast<double>(nmax))) + "\n";
    } else {
        r.text = "u_" + std::to_string(nmax) + " = " + fixed(u[nmax]) + "\n";
    }
    r.summary["oracle_max_abs_error"] = worst;
    r.deltas.push_back({"max |renewal recursion - direct propagation|", std::nullopt, worst, std::nullopt,
                        std::nullopt, 1e-10, "abs", worst <= 1e-10, true});
    return r;
}

// ---- extinction ---------------------------------------------------------

Result extinction_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s).without_ct();
    r.spec = spec;
    std::uint64_t xmax = s.count("xmax");
    std::uint64_t terms = s.count("terms");
    std::uint64_t n_mc = s.count("mc");
    Table t = make_table("x");
    for (std::uint64_t x = 1; x <= xmax; ++x) {
        BoundedValue e = extinction_prob_bounded(spec, x);
        std::optional<double> oracle;
        if (spec.beta > 1) {
            // sum_{y>=x} q_y prod_{x<=y'<y} p_y' to x+terms; remainder from the tail sum of q ~ alpha y^-beta
            CompensatedSum acc;
            double L = 0.0;
            for (std::uint64_t y = x; y < x + terms; ++y) {
                acc += disaster_prob(spec, y) * std::exp(L);
                L += log_growth_prob(spec, y);
            }
            double qtail = spec.alpha * zeta_tail(spec.beta, static_cast<double>(x + terms));
            oracle = acc.value() + std::exp(L) * -std::expm1(-qtail);
        }
        Cell f, se;
        if (n_mc) {
            Estimate h = hit_zero_frequency(spec, mc_config(s, mc_reps(s, n_mc)), x, n_mc);
            f = h.mean;
            se = h.std_error;
        }
        t.rows.push_back({num(static_cast<double>(x)), e.value, cli::cell(oracle), f, se});
    }
    r.table = std::move(t);
    r.summary["recurrence"] = to_string(classify_dt(spec));
    r.summary["series_terms"] = terms;
    r.text = "P(hit 0 from 1) = " + fixed(extinction_prob(spec, 1)) + "\n";
    return r;
}

// ---- ct-excursion -------------------------------------------------------

Result ct_excursion_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s);
    if (!spec.ct) throw MissingCtLayer();
    r.spec = spec;
    std::size_t hmax = s.count("hmax");
    double time = s.number("t");
    std::uint64_t n_mc = s.count("mc");
    std::vector<std::uint64_t> seen(hmax + 1, 0), survived(hmax + 1, 0);
    if (n_mc) {
        ExcursionBatch b = sample_excursions(spec, mc_config(s, mc_reps(s, n_mc)), n_mc, true);
        std::vector<double> len;
        len.reserve(b.samples.size());
        for (auto& e : b.samples) {
            len.push_back(*e.ct_length);
            if (e.height <= hmax) {
                ++seen[e.height];
                if (*e.ct_length > time) ++survived[e.height];
            }
        }
        std::size_t k = s.has("hill_k") ? s.count("hill_k") : std::max<std::size_t>(10, len.size() / 1000);
        if (k < len.size()) {
            double est = hill_tail_exponent(len, k);
            r.summary["hill_k"] = k;
            r.summary["hill_exponent"] = est;
        }
        r.summary["mc_escaped"] = b.escaped;
        r.summary["ct_length_approximate"] = b.ct_length_approximate;
    }
    Table t = make_table("h");
    std::vector<double> rates;
    for (std::size_t h = 0; h <= hmax; ++h) {
        rates.push_back(jump_rate(spec, h));
        auto [f, se] = n_mc ? frequency(survived[h], seen[h]) : std::pair<Cell, Cell>{};
        t.rows.push_back({num(static_cast<double>(h)), excursion_survival_given_height(spec, h, time),
                          hypoexp_survival_uniformized(rates, time), f, se});
    }
    r.table = std::move(t);
    r.summary["quantity"] = "P(T > t | H = h)";
    r.summary["t"] = time;
    try {
        TailRegime tr = ct_excursion_tail_exponent(spec);
        r.summary["tail_kind"] = tr.kind == TailKind::PowerLaw ? "power-law" : "exponential";
        if (tr.kind == TailKind::PowerLaw) r.summary["tail_exponent"] = tr.exponent;
        else r.summary["mean_bound"] = tr.mean_bound;
        r.text = tr.kind == TailKind::PowerLaw ? "P(T > t) ~ t^-" + fixed(tr.exponent) + "\n"
                                               : "exponential tail, E T <= " + fixed(tr.mean_bound) + "\n";
    } catch (const Unsupported& e) {
        r.summary["tail_kind"] = std::string("unsupported: ") + e.what();
        r.text = std::string("tail regime unsupported: ") + e.what() + "\n";
    }
    if (r.summary.contains("hill_exponent"))
        r.text += "Hill estimate " + fixed(r.summary["hill_exponent"].get<double>()) + "\n";
    return r;
}

// ---- divisibility -------------------------------------------------------

Json verdict_json(const DivisibilityVerdict& v) {
    Json j = {{"id", v.id},
              {"sd", v.sd},
              {"inconclusive", v.inconclusive},
              {"id_margin", v.id_margin},
              {"sd_margin", v.sd_margin},
              {"tolerance", v.tolerance_used}};
    if (v.first_violation_index) j["first_violation_index"] = *v.first_violation_index;
    return j;
}

std::string verdict_text(const DivisibilityVerdict& v) {
    if (v.inconclusive) return "inconclusive";
    return v.sd ? "self-decomposable" : v.id ? "infinitely divisible, not self-decomposable" : "not infinitely divisible";
}

Result divisibility_explore(const Settings& s, const ModelSpec& base, std::size_t n) {
    Result r;
    r.spec = base;
    double step = s.number("p0_step");
    if (!(step > 0 && step <= 1)) throw InvalidParameter("p0 step in (0,1]", "");
    Table t{{"p0", "id", "sd", "inconclusive", "id_margin", "sd_margin", "round_trip_error"}, {}};
    std::optional<double> last_id, last_sd;
    auto steps = static_cast<std::size_t>(std::floor(1.0 / step + 1e-9));
    for (std::size_t i = 1; i <= steps; ++i) {
        ModelSpec spec = base;
        spec.p0 = static_cast<double>(i) * step;
        PmfTable pi = invariant_dt(spec, n + 1);
        CanonicalSequence cs = canonical_sequence(pi, n);
        DivisibilityVerdict v = classify_divisibility(pi, n);
        t.rows.push_back({spec.p0, v.id ? "true" : "false", v.sd ? "true" : "false",
                          v.inconclusive ? "true" : "false", v.id_margin, v.sd_margin, round_trip_error(cs)});
        if (!v.inconclusive && v.id) last_id = spec.p0;
        if (!v.inconclusive && v.sd) last_sd = spec.p0;
    }
    r.table = std::move(t);
    r.summary["largest_id_p0"] = last_id ? Json(*last_id) : Json(nullptr);
    r.summary["largest_sd_p0"] = last_sd ? Json(*last_sd) : Json(nullptr);
    if (base.kind == ModelKind::A && base.nu == 1.0 && base.beta == 1.0 && base.alpha > 1 && base.alpha < 2)
        r.summary["closed_form_thresholds"] = {{"id", 2.0 - base.alpha}, {"sd", 1.0 - base.alpha / 2.0}};
    // discrete Pareto P - 1: self-decomposability left open; report the thinning remainders
    PmfTable pareto = pareto_shifted_pmf(base.alpha, n + 1);
    Json pj = verdict_json(classify_divisibility(pareto, n));
    for (double u : {0.25, 0.5, 0.75}) {
        ThinningRemainder tr = thinning_remainder(pareto, u, std::min<std::size_t>(n, 200));
        double lo = *std::min_element(tr.coeffs.begin(), tr.coeffs.end());
        pj["thinning"].push_back({{"u", u},
                                  {"valid_pgf", tr.valid_pgf},
                                  {"min_coefficient", lo},
                                  {"truncation_error_bound", tr.truncation_error_bound}});
    }
    r.summary["pareto_minus_one"] = pj;
    std::ostringstream os;
    os << "largest p0 with id: " << (last_id ? fixed(*last_id) : "none")
       << ", with sd: " << (last_sd ? fixed(*last_sd) : "none") << "\n";
    r.text = os.str();
    return r;
}

Result divisibility_cmd(const Settings& s) {
    ModelSpec spec = cli::model_from(s).without_ct();
    std::size_t n = s.count("n");
    if (s.flag("explore")) return divisibility_explore(s, spec, n);
    Result r;
    r.spec = spec;
    PmfTable pi = invariant_dt(spec, n + 1);
    if (!pi.normalized) throw NoInvariantMeasure("divisibility needs a positive recurrent chain");
    CanonicalSequence cs = canonical_sequence(pi, n);
    std::vector<double> back = reconvolve(cs);
    DivisibilityVerdict v = classify_divisibility(pi, n);
    Table t{{"x", "analytic", "oracle", "mc_estimate", "mc_stderr", "canonical_r"}, {}};
    for (std::size_t x = 0; x <= n; ++x)
        t.rows.push_back({num(static_cast<double>(x)), cs.source[x], back[x], Cell{}, Cell{}, cs.r[x]});
    r.table = std::move(t);
    r.summary = verdict_json(v);
    double rt = round_trip_error(cs);
    r.summary["round_trip_error"] = rt;
    r.summary["log_convex"] = log_convex(pi, n);
    r.deltas.push_back({"canonical-sequence round trip", std::nullopt, rt, std::nullopt, std::nullopt, 1e-10, "abs",
                        rt <= 1e-10, true});
    r.text = verdict_text(v) + "\n";
    return r;
}

// ---- simulate -----------------------------------------------------------

Result simulate_cmd(const Settings& s) {
    Result r;
    ModelSpec spec = cli::model_from(s);
    r.spec = spec;
    std::size_t hmax = s.count("hmax");
    RunConfig c = mc_config(s, 1);
    c.horizon = s.number("horizon");
    c.max_events = s.count("max_events");
    std::uint64_t reps = std::max<std::uint64_t>(1, s.count("reps"));
    std::vector<std::uint64_t> hist(hmax + 2, 0);
    std::uint64_t complete = 0;
    RunningStats height;
    Json runs = Json::array();
    for (std::uint64_t k = 0; k < reps; ++k) {
        std::vector<ExcursionSample> ex;
        Json run;
        if (spec.ct) {
            CtRun cr = simulate_ct(spec, c, k);
            run = {{"events", cr.events},
                   {"time", cr.time},
                   {"final_state", cr.final_state},
                   {"stop", cr.stop == CtStop::Horizon ? "horizon" : "max_events"},
                   {"anomaly", cr.anomaly}};
            ex = std::move(cr.excursions);
        } else {
            DtRun dr = simulate_dt(spec, c, k);
            run = {{"steps", dr.steps}, {"final_state", dr.final_state}, {"zero_visits", dr.zero_visits}};
            ex = std::move(dr.excursions);
        }
        std::uint64_t mine = 0;
        for (auto& e : ex) {
            if (!e.complete) continue;
            ++complete;
            ++mine;
            ++hist[std::min<std::uint64_t>(e.height, hmax + 1)];
            height.add(static_cast<double>(e.height));
        }
        run["excursions"] = mine;
        runs.push_back(run);
    }
    HeightLaw law = height_law(spec.without_ct(), hmax);
    Table t = make_table("h");
    for (std::size_t h = 0; h <= hmax; ++h) {
        double a = h == 0 ? law.atom_at_zero : law.masses.at(static_cast<std::int64_t>(h));
        auto [f, se] = frequency(hist[h], complete);
        t.rows.push_back({num(static_cast<double>(h)), a, Cell{}, f, se});
    }
    r.table = std::move(t);
    r.summary["quantity"] = "P(H = h)";
    r.summary["runs"] = runs;
    r.summary["complete_excursions"] = complete;
    if (complete) {
        Estimate e = height.estimate();
        r.summary["mean_height"] = e.mean;
        r.summary["mean_height_stderr"] = e.std_error;
    }
    r.text = std::to_string(complete) + " complete excursions over " + std::to_string(reps) + " run(s)\n";
    return r;
}

// ---- verify -------------------------------------------------------------

Result verify_cmd(const Settings& s) {
    Result r;
    std::string suite = s.text("suite");
    auto names = suite_names();
    if (std::find(names.begin(), names.end(), suite) == names.end()) {
        std::string all;
        for (auto& n : names) all += (all.empty() ? "" : ", ") + n;
        throw cli::UsageError("--suite: expected one of " + all);
    }
    SuiteOptions o;
    o.seed = s.count("seed");
    o.threads = static_cast<unsigned>(s.count("threads"));
    auto results = run_suite(suite, o);
    Table t{{"check", "criterion", "analytic", "oracle", "mc_estimate", "mc_stderr", "tolerance", "rule", "pass",
             "gating"},
            {}};
    std::ostringstream os;
    int failed = 0;
    Json crit = Json::array();
    for (auto& c : results) {
        failed += c.pass ? 0 : 1;
        char line[160];
        std::snprintf(line, sizeof line, "%s  criterion %2d  %s\n", c.pass ? "PASS" : "FAIL", c.id, c.title.c_str());
        os << line;
        crit.push_back({{"id", c.id}, {"title", c.title}, {"pass", c.pass}});
        for (auto& d : c.deltas) {
            t.rows.push_back({d.name, num(c.id), cli::cell(d.analytic), cli::cell(d.oracle),
                              cli::cell(d.mc_estimate), cli::cell(d.mc_stderr), d.tolerance, d.rule,
                              d.pass ? "true" : "false", d.gating ? "true" : "false"});
            r.deltas.push_back(d);
            os << "      " << (d.pass ? "ok  " : "BAD ") << (d.gating ? "" : "[info] ") << d.name;
            if (d.analytic) os << "  analytic=" << fixed(*d.analytic);
            if (d.oracle) os << "  oracle=" << fixed(*d.oracle);
            if (d.mc_estimate) os << "  mc=" << fixed(*d.mc_estimate) << " se=" << fixed(d.mc_stderr.value_or(0));
            os << "\n";
        }
    }
    os << failed << " of " << results.size() << " criteria failed\n";
    r.table = std::move(t);
    r.summary["suite"] = suite;
    r.summary["criteria"] = crit;
    r.summary["failed"] = failed;
    r.text = os.str();
    r.status = failed ? 1 : 0;
    return r;
}

// ---- command registry ---------------------------------------------------

struct Command {
    std::string name;
    std::string help;
    bool needs_model;
    std::vector<OptionDef> extra;
    std::function<Result(const Settings&)> run;
};

std::vector<Command> commands() {
    const std::vector<OptionDef> mc = {
        {"mc", Kind::Count, "Monte Carlo sample size (0: none)", "0"},
        {"reps", Kind::Count, "independent replications (streams) the sample is split over", "8"},
    };
    auto with = [](std::vector<OptionDef> a, const std::vector<OptionDef>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };
    return {
        {"classify", "recurrence class (and explosion for the CT layer)", true, {}, classify_cmd},
        {"invariant", "invariant law of the DT chain, or of the CT chain with --lambda", true,
         {{"xmax", Kind::Count, "largest state tabulated", "100"},
          {"mc_steps", Kind::Count, "also tally one simulated path of this many steps", "0"}},
         invariant_cmd},
        {"return-time", "law of the return time to 0", true,
         with({{"xmax", Kind::Count, "table runs to n = xmax + 1", "100"}}, mc), return_time_cmd},
        {"heights", "excursion height tail P(H >= h)", true,
         with({{"hmax", Kind::Count, "largest height tabulated", "100"}}, mc), heights_cmd},
        {"green", "coefficients of the Green kernel g_{x,y}", true,
         {{"x", Kind::Count, "start state", "0"},
          {"y", Kind::Count, "target state", "0"},
          {"order", Kind::Count, "largest power", "25"}},
         green_cmd},
        {"contact", "contact probabilities P_0(X_n = 0)", true,
         {{"nmax", Kind::Count, "largest n", "1000"},
          {"oracle_max", Kind::Count, "largest n checked by direct propagation", "20000"}},
         contact_cmd},
        {"extinction", "probability of ever hitting 0 from x", true,
         with({{"xmax", Kind::Count, "largest start state", "50"},
               {"terms", Kind::Count, "terms of the resolvent series oracle", "1000000"}},
              mc),
         extinction_cmd},
        {"ct-excursion", "CT excursion length given its height", true,
         with({{"hmax", Kind::Count, "largest height tabulated", "20"},
               {"t", Kind::Number, "time at which P(T > t | H = h) is evaluated", "1"},
               {"hill_k", Kind::Count, "order statistics used by the Hill estimate", std::nullopt}},
              mc),
         ct_excursion_cmd},
        {"divisibility", "infinite divisibility and self-decomposability of the stationary law", true,
         {{"n", Kind::Count, "length of the canonical sequence", "400"},
          {"explore", Kind::Flag, "sweep p0 over (0,1] and probe the Pareto thinning remainders", std::nullopt},
          {"p0_step", Kind::Number, "p0 grid step for --explore", "0.01"}},
         divisibility_cmd},
        {"simulate", "simulate paths and compare the excursion heights with their law", true,
         {{"horizon", Kind::Number, "steps (DT) or time (CT) per run", "1000000"},
          {"reps", Kind::Count, "independent runs", "1"},
          {"max_events", Kind::Count, "CT event cap", "10000000"},
          {"hmax", Kind::Count, "largest height tabulated", "50"}},
         simulate_cmd},
        {"verify", "run a verification suite", false,
         {{"suite", Kind::Text, "acceptance, critical-modelA, critical-modelB, transient, divisibility, limit-laws",
           "acceptance"}},
         verify_cmd},
    };
}

// ---- report -------------------------------------------------------------

struct ReportItem {
    std::string file;
    std::string command;
    std::map<std::string, std::string> values;
};

std::vector<ReportItem> report_items() {
    return {
        {"classify-A", "classify", {{"model", "A"}, {"alpha", "2"}, {"nu", "1"}}},
        {"invariant-A", "invariant", {{"model", "A"}, {"alpha", "1.5"}, {"nu", "1"}}},
        {"invariant-B", "invariant", {{"model", "B"}, {"alpha", "2"}}},
        {"invariant-ct-B", "invariant", {{"model", "B"}, {"alpha", "0.5"}, {"lambda", "0.8"}}},
        {"return-time-A", "return-time", {{"model", "A"}, {"alpha", "2"}, {"nu", "2"}}},
        {"return-time-B", "return-time", {{"model", "B"}, {"alpha", "2"}}},
        {"heights-A", "heights", {{"model", "A"}, {"alpha", "0.5"}, {"nu", "1"}}},
        {"heights-B", "heights", {{"model", "B"}, {"alpha", "0.5"}}},
        {"green-A", "green", {{"model", "A"}, {"alpha", "1.5"}, {"nu", "1"}, {"x", "2"}, {"y", "3"}}},
        {"green-B", "green", {{"model", "B"}, {"alpha", "1.5"}, {"x", "2"}, {"y", "3"}}},
        {"contact-A-constant", "contact", {{"model", "A"}, {"alpha", "2"}, {"nu", "2"}, {"nmax", "10000"}}},
        {"contact-A-log", "contact", {{"model", "A"}, {"alpha", "1"}, {"nu", "2"}, {"nmax", "10000"}}},
        {"contact-A-power", "contact", {{"model", "A"}, {"alpha", "0.5"}, {"nu", "1"}, {"nmax", "10000"}}},
        {"contact-B-power", "contact", {{"model", "B"}, {"alpha", "0.5"}, {"nmax", "10000"}}},
        {"extinction-A", "extinction", {{"model", "A"}, {"alpha", "0.5"}, {"beta", "2"}, {"nu", "0.5"}}},
        {"extinction-B", "extinction", {{"model", "B"}, {"alpha", "1"}, {"beta", "2"}}},
        {"ct-excursion-B", "ct-excursion", {{"model", "B"}, {"alpha", "0.5"}, {"lambda", "0.5"}}},
        {"divisibility-A", "divisibility", {{"model", "A"}, {"alpha", "1.5"}, {"nu", "1"}, {"explore", "true"}}},
        {"divisibility-B", "divisibility", {{"model", "B"}, {"alpha", "1.5"}, {"explore", "true"}}},
    };
}

int report_cmd(const Settings& s, const std::vector<std::string>& argv, const std::optional<std::string>& stamp) {
    namespace fs = std::filesystem;
    auto cmds = commands();
    std::string dir = (fs::path(s.text("out_dir")) / ("report-" + (stamp ? *stamp : s.text("tag")))).string();
    Json index = Json::array();
    for (const auto& item : report_items()) {
        auto cmd = std::find_if(cmds.begin(), cmds.end(), [&](const Command& c) { return c.name == item.command; });
        std::vector<OptionDef> defs = model_options();
        defs.insert(defs.end(), cmd->extra.begin(), cmd->extra.end());
        Settings local;
        for (const auto& d : defs) {
            if (auto it = item.values.find(d.key); it != item.values.end())
                local.set(d.key, it->second, "report", d.kind);
            else if (d.fallback)
                local.set(d.key, *d.fallback, "default", d.kind);
        }
        for (const char* k : {"seed", "threads"}) local.set(k, s.text(k), "inherited", Kind::Count);
        auto t0 = std::chrono::steady_clock::now();
        Result r = cmd->run(local);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        cli::write_artifacts(dir, item.file, item.command, r, local, argv, stamp, secs);
        std::cout << item.file << ": " << r.text;
        index.push_back({{"file", item.file}, {"command", item.command}});
    }
    std::ofstream(fs::path(dir) / "index.json") << index.dump(2) << '\n';
    std::cout << "tables written to " << dir << "\n";
    return 0;
}

// ---- main ---------------------------------------------------------------

std::string flag_name(const std::string& key) {
    std::string f = key;
    std::replace(f.begin(), f.end(), '_', '-');
    return "--" + f;
}

int usage_error(const std::string& msg, const CLI::App& app) {
    std::cerr << "error: " << msg << "\n\n" << app.help();
    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Growth-collapse chains with total disasters: exact laws, oracles and simulation.", "disaster"};
    app.require_subcommand(1);
    app.set_version_flag("--version", DISASTER_VERSION);

    auto cmds = commands();
    struct Bound {
        CLI::App* sub;
        std::vector<OptionDef> defs;
        std::map<std::string, std::string> storage;
    };
    std::map<std::string, Bound> bound;
    auto bind = [&](const std::string& name, const std::string& help, std::vector<OptionDef> defs) {
        Bound& b = bound[name];
        b.sub = app.add_subcommand(name, help);
        b.defs = std::move(defs);
        for (const auto& d : b.defs) {
            std::string desc = d.help + (d.fallback ? " [" + *d.fallback + "]" : "");
            if (d.kind == Kind::Flag)
                b.sub->add_flag(flag_name(d.key))->description(desc);
            else
                b.sub->add_option(flag_name(d.key), b.storage[d.key], desc)
                    ->type_name(d.kind == Kind::Number ? "NUM" : d.kind == Kind::Count ? "INT" : "TEXT");
        }
    };
    for (const auto& c : cmds) {
        std::vector<OptionDef> defs = common_options();
        if (c.needs_model) {
            auto m = model_options();
            defs.insert(defs.end(), m.begin(), m.end());
        }
        defs.insert(defs.end(), c.extra.begin(), c.extra.end());
        bind(c.name, c.help, defs);
    }
    bind("report", "regenerate the standard tables into <out-dir>/report-<timestamp>/", common_options());

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForVersion&) {
        std::cout << DISASTER_VERSION << "\n";
        return 0;
    } catch (const CLI::ParseError& e) {
        const CLI::App* where = &app;
        for (auto& [n, b] : bound)
            if (b.sub->parsed()) where = b.sub;
        return usage_error(e.what(), *where);
    }

    auto active = std::find_if(bound.begin(), bound.end(), [](auto& kv) { return kv.second.sub->parsed(); });
    const std::string& name = active->first;
    Bound& b = active->second;
    std::vector<std::string> args(argv, argv + argc);

    try {
        std::map<std::string, std::string> given;
        for (const auto& d : b.defs) {
            std::size_t n = b.sub->count(flag_name(d.key));
            if (n == 0) continue;
            given[d.key] = d.kind == Kind::Flag ? "true" : b.storage[d.key];
        }
        Settings s = Settings::resolve(b.defs, given);
        std::optional<std::string> stamp;
        if (!s.has("tag")) stamp = cli::utc_stamp();

        if (name == "report") return report_cmd(s, args, stamp);

        auto cmd = std::find_if(cmds.begin(), cmds.end(), [&](const Command& c) { return c.name == name; });
        auto t0 = std::chrono::steady_clock::now();
        Result r = cmd->run(s);
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        std::string base = name + "-" + (stamp ? *stamp : s.text("tag"));
        cli::Artifacts a = cli::write_artifacts(s.text("out_dir"), base, name, r, s, args, stamp, secs);
        std::cout << r.text;
        if (!a.csv.empty()) std::cerr << "wrote " << a.csv << "\n";
        std::cerr << "wrote " << a.json << "\n";
        return r.status;
    } catch (const cli::UsageError& e) {
        return usage_error(e.what(), *b.sub);
    } catch (const InvalidParameter& e) {
        std::cerr << "invalid parameter: violated invariant '" << e.invariant() << "'";
        if (e.invariant() != e.what()) std::cerr << " (" << e.what() << ")";
        std::cerr << "\n";
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "not applicable: " << e.what() << "\n";
        return 4;
    }
}

#include "geophase_cli/runner.hpp"

#include "geophase/classical_phase.hpp"
#include "geophase/dynamics_oracle.hpp"
#include "geophase/errors.hpp"
#include "geophase/quantum_phase.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

namespace geophase::cli {

namespace {

// Reads typed keys from a parameter object, records what was used (with
// defaults filled in) and rejects keys nobody asked for.
class Params {
public:
    Params(const Json& raw, std::string scenario) : raw_(raw), scenario_(std::move(scenario)) {
        if (!raw_.is_object()) throw ConfigError(scenario_ + ": parameters must be a JSON object");
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const Json* v = find(key, fallback.has_value());
        const double x = v ? as_number(key, *v) : *fallback;
        resolved_[key] = x;
        return x;
    }

    long long integer(const std::string& key, std::optional<long long> fallback = std::nullopt) {
        const Json* v = find(key, fallback.has_value());
        long long x = 0;
        if (v) {
            if (!v->is_number_integer()) {
                const double d = as_number(key, *v);
                if (d != std::floor(d)) throw ConfigError(scenario_ + ": key '" + key + "' must be an integer");
                x = static_cast<long long>(d);
            } else {
                x = v->get<long long>();
            }
        } else {
            x = *fallback;
        }
        resolved_[key] = x;
        return x;
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        const Json* v = find(key, fallback.has_value());
        std::string x;
        if (v) {
            if (!v->is_string()) throw ConfigError(scenario_ + ": key '" + key + "' must be a string");
            x = v->get<std::string>();
        } else {
            x = *fallback;
        }
        resolved_[key] = x;
        return x;
    }

    bool flag(const std::string& key, bool fallback) {
        const Json* v = find(key, true);
        bool x = fallback;
        if (v) {
            if (!v->is_boolean()) throw ConfigError(scenario_ + ": key '" + key + "' must be true or false");
            x = v->get<bool>();
        }
        resolved_[key] = x;
        return x;
    }

    // A number, an array of numbers, or {"start", "stop", "count"} (inclusive).
    std::vector<double> grid(const std::string& key) {
        const Json* v = find(key, false);
        std::vector<double> out;
        if (v->is_number()) {
            out.push_back(v->get<double>());
        } else if (v->is_array()) {
            for (const auto& e : *v) out.push_back(as_number(key, e));
        } else if (v->is_object()) {
            for (const char* k : {"start", "stop", "count"}) {
                if (!v->contains(k)) throw ConfigError(scenario_ + ": grid '" + key + "' needs start, stop and count");
            }
            const double a = as_number(key, v->at("start"));
            const double b = as_number(key, v->at("stop"));
            const Json& cj = v->at("count");
            if (!cj.is_number_integer() || cj.get<long long>() < 1) {
                throw ConfigError(scenario_ + ": grid '" + key + "' count must be a positive integer");
            }
            const auto n = cj.get<long long>();
            for (long long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * i / static_cast<double>(n - 1));
        } else {
            throw ConfigError(scenario_ + ": key '" + key + "' must be a number, array or {start, stop, count}");
        }
        if (out.empty()) throw ConfigError(scenario_ + ": grid '" + key + "' is empty");
        resolved_[key] = out;
        return out;
    }

    std::uint64_t seed(std::optional<std::uint64_t> override_seed) {
        std::uint64_t s = 0;
        if (override_seed) {
            s = *override_seed;
        } else {
            const Json* v = find("seed", true);
            if (!v) throw ConfigError(scenario_ + ": a seed is required (config key 'seed' or --seed)");
            if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
                throw ConfigError(scenario_ + ": seed must be a non-negative integer");
            }
            s = v->get<std::uint64_t>();
        }
        used_.insert("seed");
        resolved_["seed"] = s;
        return s;
    }

    bool has(const std::string& key) const { return raw_.contains(key) && !raw_.at(key).is_null(); }

    // Marks seed as consumed for scenarios that do not need it.
    void ignore_seed() { used_.insert("seed"); }

    Json finish() const {
        for (const auto& [k, v] : raw_.items()) {
            if (!used_.count(k)) throw ConfigError(scenario_ + ": unknown key '" + k + "'");
        }
        return resolved_;
    }

private:
    const Json* find(const std::string& key, bool optional) {
        used_.insert(key);
        if (raw_.contains(key) && !raw_.at(key).is_null()) return &raw_.at(key);
        if (!optional) throw ConfigError(scenario_ + ": missing required key '" + key + "'");
        return nullptr;
    }

    double as_number(const std::string& key, const Json& v) const {
        if (!v.is_number()) throw ConfigError(scenario_ + ": key '" + key + "' must be numeric");
        const double d = v.get<double>();
        if (!std::isfinite(d)) throw ConfigError(scenario_ + ": key '" + key + "' must be finite");
        return d;
    }

    const Json& raw_;
    std::string scenario_;
    std::set<std::string> used_;
    Json resolved_ = Json::object();
};

std::size_t positive_count(long long n, const std::string& what) {
    if (n < 1) throw ConfigError(what + " must be >= 1");
    return static_cast<std::size_t>(n);
}

Cell nullable(double x) { return std::isfinite(x) ? Cell{x} : Cell{}; }

Json json_number(double x) { return std::isfinite(x) ? Json(x) : Json(nullptr); }

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double lx = std::log(x[i]);
        const double ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

NoiseStatistics noise_stats(Params& p, std::uint64_t seed, int default_k_max, const std::string& default_mode) {
    NoiseStatistics s;
    s.sigma = p.number("sigma", 1.0);
    s.k_max = static_cast<int>(p.integer("k_max", default_k_max));
    s.mode = noise_mode_from_string(p.text("mode", default_mode));
    s.periodic = p.flag("periodic", true);
    s.seed = seed;
    s.validate();
    return s;
}

// ---------------------------------------------------------------------------
// classical scenarios

ScenarioResult classical_sweep(Params& p, std::optional<std::uint64_t> seed_override, unsigned workers) {
    const auto thetas = p.grid("theta0");
    const double eps = p.number("epsilon");
    const auto n = positive_count(p.integer("n_realizations"), "n_realizations");
    const auto nq = positive_count(p.integer("n_quadrature", 1024), "n_quadrature");
    const auto seed = p.seed(seed_override);
    const auto stats = noise_stats(p, seed, 4, "isotropic3");

    ScenarioResult r;
    r.table.columns = {"theta0",       "phi_plus",      "mean_phase", "std_error", "first_order",
                       "second_order", "prediction",    "sigma_z_phase"};
    for (double th : thetas) {
        const auto e = ensemble_average(th, eps, stats, n, {workers, nq});
        const double var = stats.sigma * stats.sigma;
        const double prediction = stats.mode == NoiseMode::isotropic3
                                      ? ensemble_mean_prediction(th, eps, 2.0 * var)
                                      : precession_phase(th) - z_only_shift(th, eps, var);
        r.table.add_row({th, precession_phase(th), e.mean_phase, e.std_error, e.first_order, e.second_order,
                         prediction, e.sigma_z_phase});
    }
    return r;
}


struct ZAmplitude {
    double epsilon{0.0};
    double sigma{1.0};
};

// Either (epsilon, sigma) or the physical pair (noise_strength P, omega_L),
// which sets eps * sigma = 2 P / omega_L.
ZAmplitude z_amplitude(Params& p) {
    ZAmplitude a;
    if (p.has("noise_strength")) {
        const double strength = p.number("noise_strength");
        const double omega_l = p.number("omega_L");
        if (!(omega_l > 0.0)) throw ConfigError("omega_L must be > 0");
        a.epsilon = 2.0 * strength / omega_l;
        a.sigma = 1.0;
    } else {
        a.epsilon = p.number("epsilon");
        a.sigma = p.number("sigma", 1.0);
    }
    return a;
}

NoiseStatistics z_stats(double sigma, int k_max, std::uint64_t seed) {
    NoiseStatistics s;
    s.sigma = sigma;
    s.k_max = k_max;
    s.mode = NoiseMode::z_only;
    s.seed = seed;
    s.validate();
    return s;
}

ScenarioResult z_only_noise(Params& p, std::optional<std::uint64_t> seed_override, unsigned workers) {
    const auto thetas = p.grid("theta0");
    const auto amp = z_amplitude(p);
    const long long n = p.integer("n_realizations", 0);
    const int k_max = static_cast<int>(p.integer("k_max", 4));
    const auto n_intervals = positive_count(p.integer("n_intervals", 1024), "n_intervals");
    std::optional<NoiseStatistics> stats;
    if (n > 0) {
        stats = z_stats(amp.sigma, k_max, p.seed(seed_override));
    } else {
        p.ignore_seed();
    }

    ScenarioResult r;
    r.table.columns = {"theta0", "shape", "delta_phi_analytic", "delta_phi_mc", "std_error"};
    double best = -1.0;
    double best_theta = 0.0;
    for (double th : thetas) {
        const double s = std::sin(th);
        const double shape = s * s * std::cos(th);
        const double analytic = z_only_shift(th, amp.epsilon, amp.sigma * amp.sigma);
        Cell mc, se;
        if (stats) {
            const auto e = ensemble_exact(th, amp.epsilon, *stats, static_cast<std::size_t>(n), n_intervals, 1, workers);
            mc = precession_phase(th) - e.mean;
            se = e.std_error;
        }
        if (analytic > best) {
            best = analytic;
            best_theta = th;
        }
        r.table.add_row({th, shape, analytic, mc, se});
    }
    r.summary["grid_peak_theta0"] = best_theta;
    r.summary["grid_peak_delta_phi"] = best;
    r.summary["peak_theta0"] = kZOnlyPeakTheta;
    r.summary["peak_shape"] = kZOnlyPeakValue;
    r.summary["peak_delta_phi"] = z_only_shift(kZOnlyPeakTheta, amp.epsilon, amp.sigma * amp.sigma);
    return r;
}

ScenarioResult filipp_recover(Params& p, std::optional<std::uint64_t> seed_override, unsigned workers) {
    const double delta = p.number("delta_phi_max");
    const double omega_l = p.number("omega_L");
    const long long n = p.integer("n_realizations", 0);
    const int k_max = static_cast<int>(p.integer("k_max", 4));
    const auto n_intervals = positive_count(p.integer("n_intervals", 1024), "n_intervals");
    const double strength = recover_noise_strength(delta, omega_l);

    ScenarioResult r;
    r.table.columns = {"delta_phi_max", "omega_L", "peak_theta0", "noise_strength", "noise_strength_incorrect_average",
                       "mc_noise_strength", "mc_std_error"};
    Cell mc_p, mc_se;
    if (n > 0) {
        // closes the loop: simulate at the recovered strength and fit again
        const auto stats = z_stats(1.0, k_max, p.seed(seed_override));
        const double eps = 2.0 * strength / omega_l;
        const auto e = ensemble_exact(kZOnlyPeakTheta, eps, stats, static_cast<std::size_t>(n), n_intervals, 1, workers);
        const double shift = precession_phase(kZOnlyPeakTheta) - e.mean;
        const double fitted = recover_noise_strength(shift, omega_l);
        mc_p = fitted;
        // P ~ sqrt(shift)
        mc_se = 0.5 * fitted * e.std_error / shift;
    } else {
        p.ignore_seed();
    }
    // A fit that averages theta instead of cos(theta) sees 2/3 of the shift per unit P^2.
    r.table.add_row({delta, omega_l, kZOnlyPeakTheta, strength, strength * std::sqrt(1.5), mc_p, mc_se});
    return r;
}

ScenarioResult aperiodic_check(Params& p, std::optional<std::uint64_t> seed_override, unsigned workers) {
    const double th = p.number("theta0");
    const double eps = p.number("epsilon");
    const auto n = positive_count(p.integer("n_realizations"), "n_realizations");
    const int n_turns = static_cast<int>(positive_count(p.integer("n_turns", 8), "n_turns"));
    const auto n_intervals = positive_count(p.integer("n_intervals", 1024), "n_intervals");
    const auto seed = p.seed(seed_override);
    NoiseStatistics stats;
    // sigma = 1 with k_max = 8 lets the azimuth run backwards in a fair share of realizations
    stats.sigma = p.number("sigma", 0.5);
    stats.k_max = static_cast<int>(p.integer("k_max", 8));
    stats.mode = noise_mode_from_string(p.text("mode", "isotropic3"));
    stats.periodic = false;

    // independent ensembles for the two estimators
    stats.seed = derive_seed(seed, 0);
    const auto one = ensemble_exact(th, eps, stats, n, n_intervals, 1, workers);
    stats.seed = derive_seed(seed, 1);
    const auto many = ensemble_exact(th, eps, stats, n, n_intervals, n_turns, workers);
    const double combined = std::hypot(one.std_error, many.std_error);

    ScenarioResult r;
    r.table.columns = {"theta0",     "one_turn_mean",      "one_turn_std_error", "multi_turn_mean",
                       "multi_turn_std_error", "difference", "combined_std_error", "prediction"};
    const double var = stats.sigma * stats.sigma;
    const double prediction = stats.mode == NoiseMode::isotropic3 ? ensemble_mean_prediction(th, eps, 2.0 * var)
                                                                  : precession_phase(th) - z_only_shift(th, eps, var);
    r.table.add_row({th, one.mean, one.std_error, many.mean, many.std_error, one.mean - many.mean, combined,
                     prediction});
    return r;
}

ScenarioResult averaging_diagnostic(Params& p, std::optional<std::uint64_t> seed_override, unsigned workers) {
    AveragingInputs in;
    in.theta0 = p.number("theta0");
    in.epsilon = p.number("epsilon");
    in.sigma = p.number("sigma", 1.0);
    in.k_max = static_cast<int>(p.integer("k_max", 4));
    in.mode = p.text("mode", "z_only");
    in.n_realizations = positive_count(p.integer("n_realizations", 1000), "n_realizations");
    in.n_grid = positive_count(p.integer("n_grid", 256), "n_grid");
    in.seed = p.seed(seed_override);
    in.workers = workers;
    const auto d = diagnose_averaging_conventions(in);

    ScenarioResult r;
    r.table.columns = {"theta0",          "delta_correct", "delta_correct_std_error", "delta_incorrect",
                       "delta_incorrect_std_error", "ratio", "ratio_std_error", "p_ratio", "p_ratio_std_error"};
    r.table.add_row({in.theta0, d.delta_correct, d.delta_correct_std_error, d.delta_incorrect,
                     d.delta_incorrect_std_error, nullable(d.ratio), nullable(d.ratio_std_error), nullable(d.p_ratio),
                     nullable(d.p_ratio_std_error)});
    return r;
}

// ---------------------------------------------------------------------------
// quantum scenarios

struct QuantumValues {
    double p_minus_exact{std::numeric_limits<double>::quiet_NaN()};
    double p_minus_pert{std::numeric_limits<double>::quiet_NaN()};
    double phi_exact{std::numeric_limits<double>::quiet_NaN()};
    double phi_pert{std::numeric_limits<double>::quiet_NaN()};
    PhaseBreakdown breakdown;
    Json details = Json::object();
};

ScenarioResult quantum_result(const std::string& scenario, const QuantumValues& q) {
    ScenarioResult r;
    r.table.columns = {"p_minus_exact", "p_minus_pert", "phi_exact", "phi_pert",
                       "fluctuation",   "commutator",   "r0",        "epsilon"};
    r.table.add_row({nullable(q.p_minus_exact), nullable(q.p_minus_pert), nullable(q.phi_exact), nullable(q.phi_pert),
                     q.breakdown.fluctuation, q.breakdown.commutator, q.breakdown.r0, q.breakdown.epsilon});
    Json doc;
    doc["schema"] = kQuantumSchema;
    doc["scenario"] = scenario;
    doc["parameters"] = Json::object();  // filled by run_scenario
    doc["p_minus_exact"] = json_number(q.p_minus_exact);
    doc["p_minus_pert"] = json_number(q.p_minus_pert);
    doc["phi_exact"] = json_number(q.phi_exact);
    doc["phi_pert"] = json_number(q.phi_pert);
    doc["breakdown"] = {{"fluctuation", q.breakdown.fluctuation},
                        {"commutator", q.breakdown.commutator},
                        {"r0", q.breakdown.r0},
                        {"epsilon", q.breakdown.epsilon}};
    doc["details"] = q.details;
    r.document = std::move(doc);
    return r;
}

// Exact p_minus from the tracked eigenstate of the full hamiltonian.
double exact_p_minus(const VectorOperatorSystem& sys, double lambda, Json& details) {
    const auto tracked = tracked_eigenstate(build_hamiltonian(sys, lambda), reference_state(sys));
    const auto s = schmidt(tracked.state, sys.n_hat());
    details["tracked_energy"] = tracked.energy;
    details["tracked_overlap"] = tracked.overlap;
    details["tracked_multiplicity"] = static_cast<std::int64_t>(tracked.multiplicity);
    details["schmidt_degenerate"] = s.degenerate;
    return s.p_minus;
}

ScenarioResult quantum_sho(Params& p) {
    p.ignore_seed();
    const double th = p.number("theta0");
    const double eps = p.number("epsilon");
    const int n_max = static_cast<int>(p.integer("n_max", 3));
    const double rho = p.number("rho", 1.0);
    const double phi = p.number("phi", 0.0);
    const auto sys = sho_system(n_max, eps, Direction(th, phi), rho);
    const auto rep = spin_phase_perturbative(sys);
    QuantumValues q;
    q.p_minus_pert = rep.p_minus;
    q.phi_pert = rep.phi_total;
    q.breakdown = rep.breakdown;
    q.details["phi_classical"] = rep.phi_classical;
    q.details["phi_commutator_free"] = rep.phi_commutator_free;
    q.details["theta_eff"] = effective_polar_angle(rep.phi_total);
    q.details["theta_eff_minus_theta0"] = effective_polar_angle(rep.phi_total) - th;
    q.details["regime_valid"] = rep.regime_valid;
    return quantum_result("quantum-sho", q);
}

ScenarioResult quantum_two_spin(Params& p) {
    p.ignore_seed();
    const double th = p.number("theta0");
    const double phi = p.number("phi", 0.0);
    const double lambda = p.number("lambda", 1.0);
    const double field = p.number("field", 0.0);
    const auto sys = two_spin_system(Direction(th, phi), field);
    QuantumValues q;
    q.p_minus_exact = exact_p_minus(sys, lambda, q.details);
    q.phi_exact = spin_phase_from_schmidt(q.p_minus_exact, th).phi_total;
    const auto rep = spin_phase_perturbative(sys);
    q.p_minus_pert = rep.p_minus;
    q.phi_pert = rep.phi_total;
    q.breakdown = rep.breakdown;
    q.details["phi_commutator_free"] = rep.phi_commutator_free;
    q.details["total_system_phase"] = total_system_phase(0.5, th);
    return quantum_result("quantum-two-spin", q);
}

ScenarioResult quantum_angular_momentum(Params& p) {
    p.ignore_seed();
    const double l = p.number("l");
    const double m = p.number("m");
    const double th = p.number("theta0");
    const double phi = p.number("phi", 0.0);
    const double lambda = p.number("lambda", 1.0);
    const double field = p.number("field", 0.0);
    const auto sys = angular_momentum_system(l, m, Direction(th, phi), field);
    QuantumValues q;
    q.p_minus_exact = exact_p_minus(sys, lambda, q.details);
    q.phi_exact = spin_phase_from_schmidt(q.p_minus_exact, th).phi_total;
    if (sys.rho() > VectorOperatorSystem::kTolerance) {
        const auto rep = spin_phase_perturbative(sys);
        q.p_minus_pert = rep.p_minus;
        q.phi_pert = rep.phi_total;
        q.breakdown = rep.breakdown;
        q.details["regime_valid"] = rep.regime_valid;
    } else {
        q.details["regime_valid"] = false;
    }
    q.details["total_system_phase"] = total_system_phase(m, th);
    return quantum_result("quantum-angular-momentum", q);
}

ScenarioResult exact_vs_pert(Params& p) {
    p.ignore_seed();
    const auto ms = p.grid("m");
    const double k = p.number("k", 1.0);
    const double th = p.number("theta0");
    const double lambda = p.number("lambda", 1.0);

    ScenarioResult r;
    r.table.columns = {"l", "m", "p_minus_exact", "p_minus_pert", "phi_exact", "phi_pert", "abs_difference"};
    std::vector<double> xs, ys;
    for (double m : ms) {
        LmScenario s;
        s.l = m + k;
        s.m = m;
        s.lambda = lambda;
        s.theta0 = th;
        const auto e = exact_lm_scenario(s);
        const double diff = std::abs(e.phi_exact - e.phi_pert);
        r.table.add_row({s.l, m, e.p_minus_exact, nullable(e.p_minus_pert), e.phi_exact, nullable(e.phi_pert),
                         nullable(diff)});
        if (m > 0.0 && diff > 0.0 && std::isfinite(diff)) {
            xs.push_back(m);
            ys.push_back(diff);
        }
    }
    r.summary["loglog_slope"] = xs.size() >= 2 ? Json(log_log_slope(xs, ys)) : Json(nullptr);
    return r;
}

// ---------------------------------------------------------------------------
// dynamics

ScenarioResult dynamics_check(Params& p, std::optional<std::uint64_t> seed_override) {
    const std::string system = p.text("system", "spin-half");
    const double th = p.number("theta0");
    const double ratio = p.number("adiabaticity", 1e-3);
    const double dt = p.number("dt", 0.1);
    const int n_turns = static_cast<int>(positive_count(p.integer("n_turns", 1), "n_turns"));
    if (!(ratio > 0.0)) throw ConfigError("adiabaticity must be > 0");

    EvolutionConfig cfg;
    cfg.n_turns = n_turns;
    cfg.dt = dt;
    cfg.adiabaticity = ratio;
    CVector initial;
    double expected = 0.0;
    double gap = 1.0;
    double tolerance = 5.0 * ratio;

    if (system == "spin-half" || system == "noisy-field") {
        const double coupling = p.number("coupling", 1.0);
        gap = coupling;
        const double omega = ratio * gap;
        cfg.omega = omega;
        if (system == "spin-half") {
            p.ignore_seed();
            cfg.path = std::make_shared<SpinHalfFieldPath>(
                [=](double t) {
                    return Vec3(std::sin(th) * std::cos(omega * t), std::sin(th) * std::sin(omega * t), std::cos(th));
                },
                coupling);
            initial = spin_up(Direction(th, 0.0));
            expected = n_turns * precession_phase(th);
        } else {
            NoiseStatistics stats;
            stats.sigma = p.number("sigma", 1.0);
            stats.k_max = static_cast<int>(p.integer("k_max", 1));
            stats.seed = p.seed(seed_override);
            const double eps = p.number("epsilon", 0.05);
            const auto noise = sample_noise(stats);
            cfg.path = std::make_shared<SpinHalfFieldPath>(
                [=](double t) { return field_at_time(th, eps, noise, omega, t); }, coupling);
            initial = spin_up(Direction::from_cartesian(field_at_time(th, eps, noise, omega, 0.0)));
            expected = phase_exact(th, eps, noise, 2048, n_turns);
        }
    } else if (system == "two-spin" || system == "angular-momentum") {
        p.ignore_seed();
        const double lambda = p.number("lambda", 0.5);
        const double field = p.number("field", 10.0);
        Direction n0(th, 0.0);
        std::optional<VectorOperatorSystem> sys;
        double mu = 0.5;
        if (system == "two-spin") {
            sys.emplace(two_spin_system(n0, field));
        } else {
            const double l = p.number("l");
            mu = p.number("m");
            sys.emplace(angular_momentum_system(l, mu, n0, field));
        }
        const Operator h0 = build_hamiltonian(*sys, lambda);
        const auto tracked = tracked_eigenstate(h0, reference_state(*sys));
        if (tracked.multiplicity != 1) throw ConfigError("dynamics-check: tracked level is degenerate; set field != 0");
        gap = tracked.gap;
        cfg.omega = ratio * gap;
        cfg.path = std::make_shared<PrecessingPath>(h0.matrix(), composite_jz(sys->l()[2]), cfg.omega);
        initial = tracked.state.amplitudes();
        expected = n_turns * total_system_phase(mu, th);
        // the non-adiabatic error grows with the phase itself, roughly as 2 mu + 1
        tolerance *= std::max(1.0, mu + 0.5);
    } else {
        throw ConfigError("dynamics-check: system must be spin-half, noisy-field, two-spin or angular-momentum");
    }

    const auto res = berry_phase_numeric(cfg, initial);
    const double error = wrap_phase(res.geometric_phase - expected);
    ScenarioResult r;
    r.table.columns = {"theta0",      "geometric_phase", "expected_phase", "phase_error", "tolerance",
                       "total_phase", "dynamical_phase", "final_overlap",  "norm_drift",  "steps"};
    r.table.add_row({th, res.geometric_phase, expected, error, tolerance, res.total_phase, res.dynamical_phase,
                     res.final_overlap, res.norm_drift, static_cast<std::int64_t>(res.steps)});
    Json doc;
    doc["schema"] = kDynamicsSchema;
    doc["scenario"] = "dynamics-check";
    doc["parameters"] = Json::object();  // filled by run_scenario
    const Json body = Json::parse(to_json(cfg, res));
    for (const auto& [k, v] : body.items()) doc[k] = v;
    doc["config"]["gap"] = gap;
    doc["config"]["system"] = system;
    doc["expected_phase"] = expected;
    doc["phase_error"] = error;
    r.document = std::move(doc);
    return r;
}

using Runner = std::function<ScenarioResult(Params&, std::optional<std::uint64_t>, unsigned)>;

const std::map<std::string, Runner>& registry() {
    static const std::map<std::string, Runner> r{
        {"classical-sweep", classical_sweep},
        {"z-only-noise", z_only_noise},
        {"filipp-recover", filipp_recover},
        {"aperiodic-check", aperiodic_check},
        {"averaging-diagnostic", averaging_diagnostic},
        {"quantum-sho", [](Params& p, auto, unsigned) { return quantum_sho(p); }},
        {"quantum-two-spin", [](Params& p, auto, unsigned) { return quantum_two_spin(p); }},
        {"quantum-angular-momentum", [](Params& p, auto, unsigned) { return quantum_angular_momentum(p); }},
        {"exact-vs-pert", [](Params& p, auto, unsigned) { return exact_vs_pert(p); }},
        {"dynamics-check", [](Params& p, auto seed, unsigned) { return dynamics_check(p, seed); }},
    };
    return r;
}

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string cell_text(const Cell& c) {
    struct Visitor {
        std::string operator()(std::monostate) const { return ""; }
        std::string operator()(double x) const { return std::isfinite(x) ? format_double(x) : ""; }
        std::string operator()(std::int64_t x) const { return std::to_string(x); }
        std::string operator()(const std::string& s) const { return csv_field(s); }
        std::string operator()(bool b) const { return b ? "true" : "false"; }
    };
    return std::visit(Visitor{}, c);
}

Json cell_json(const Cell& c) {
    struct Visitor {
        Json operator()(std::monostate) const { return nullptr; }
        Json operator()(double x) const { return json_number(x); }
        Json operator()(std::int64_t x) const { return x; }
        Json operator()(const std::string& s) const { return s; }
        Json operator()(bool b) const { return b; }
    };
    return std::visit(Visitor{}, c);
}

}  // namespace

OutputFormat output_format_from_string(const std::string& s) {
    if (s == "csv") return OutputFormat::csv;
    if (s == "json") return OutputFormat::json;
    throw ConfigError("format must be csv or json, got '" + s + "'");
}

const char* to_string(OutputFormat f) noexcept { return f == OutputFormat::csv ? "csv" : "json"; }

void Table::add_row(std::vector<Cell> row) {
    if (row.size() != columns.size()) throw std::logic_error("Table::add_row: width mismatch");
    rows.push_back(std::move(row));
}

const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [k, f] : registry()) v.push_back(k);
        return v;
    }();
    return names;
}

ScenarioResult run_scenario(const std::string& scenario, const Json& params, std::optional<std::uint64_t> seed,
                            unsigned workers) {
    const auto it = registry().find(scenario);
    if (it == registry().end()) throw ConfigError("unknown scenario '" + scenario + "'");
    Params p(params, scenario);
    ScenarioResult r = it->second(p, seed, workers);
    r.scenario = scenario;
    r.parameters = p.finish();
    if (r.document) (*r.document)["parameters"] = r.parameters;
    return r;
}

std::string to_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) {
        if (i) out << ',';
        out << csv_field(table.columns[i]);
    }
    out << "\r\n";
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            out << cell_text(row[i]);
        }
        out << "\r\n";
    }
    return out.str();
}

std::string to_json_text(const ScenarioResult& result) {
    if (result.document) return result.document->dump(2) + "\n";
    Json doc;
    doc["schema"] = kResultSchema;
    doc["scenario"] = result.scenario;
    doc["parameters"] = result.parameters;
    doc["summary"] = result.summary;
    Json rows = Json::array();
    for (const auto& row : result.table.rows) {
        Json o = Json::object();
        for (std::size_t i = 0; i < row.size(); ++i) o[result.table.columns[i]] = cell_json(row[i]);
        rows.push_back(std::move(o));
    }
    doc["rows"] = std::move(rows);
    return doc.dump(2) + "\n";
}

std::string render(const ScenarioResult& result, OutputFormat format) {
    return format == OutputFormat::csv ? to_csv(result.table) : to_json_text(result);
}

Json manifest(const ScenarioResult& result, const Json& config_echo, std::optional<std::uint64_t> seed,
              OutputFormat format, const std::string& data_path, double wall_seconds) {
    Json m;
    m["schema"] = kManifestSchema;
    m["scenario"] = result.scenario;
    m["version"] = GEOPHASE_VERSION_STRING;
    m["seed"] = seed ? Json(*seed) : (result.parameters.contains("seed") ? result.parameters["seed"] : Json(nullptr));
    m["format"] = to_string(format);
    m["data"] = data_path;
    m["config"] = config_echo;
    m["parameters"] = result.parameters;
    m["summary"] = result.summary;
    m["wall_time_seconds"] = wall_seconds;
    return m;
}

}  // namespace geophase::cli

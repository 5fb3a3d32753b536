// classical_phase.cpp

#include "geophase/classical_phase.hpp"

#include "geophase/ensemble.hpp"
#include "geophase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace geophase {

namespace {

constexpr std::size_t kMinTimeSamples = 16;
// Relative disagreement between h and 2h central differences above which
// db_2/dt is considered unresolved.
constexpr double kDerivativeResolution = 0.05;

std::vector<double> central_difference(std::span<const double> t, std::span<const double> y, std::size_t stride,
                                       bool periodic) {
    const std::size_t n = y.size();
    std::vector<double> d(n, 0.0);
    const double h = (t.back() - t.front()) / static_cast<double>(n - 1) * static_cast<double>(stride);
    for (std::size_t k = 0; k < n; ++k) {
        if (k >= stride && k + stride < n) {
            d[k] = (y[k + stride] - y[k - stride]) / (2.0 * h);
        } else if (periodic) {
            // index n-1 duplicates index 0
            const std::size_t m = n - 1;
            const std::size_t kp = (k + stride) % m;
            const std::size_t km = (k + m - (stride % m)) % m;
            d[k] = (y[kp] - y[km]) / (2.0 * h);
        } else if (k < stride) {
            d[k] = (-3.0 * y[k] + 4.0 * y[k + stride] - y[k + 2 * stride]) / (2.0 * h);
        } else {
            d[k] = (3.0 * y[k] - 4.0 * y[k - stride] + y[k - 2 * stride]) / (2.0 * h);
        }
    }
    return d;
}

}  // namespace

const char* to_string(PhaseMethod m) noexcept {
    return m == PhaseMethod::exact ? "exact" : "perturbative";
}

ClassicalPhaseReport phase_perturbative_phi(double theta0, double epsilon, const NoiseRealization& n,
                                            std::size_t n_quadrature, int n_turns) {
    adapted_frame(theta0, 0.0);
    if (n_quadrature < 8) throw InsufficientResolution("phase_perturbative_phi: need >= 8 quadrature intervals");
    if (n_turns < 1) throw DomainError("phase_perturbative_phi: n_turns must be >= 1");
    const double st = std::sin(theta0);
    const double ct = std::cos(theta0);
    const std::size_t m = n_quadrature * static_cast<std::size_t>(n_turns);
    const double h = kTwoPi * n_turns / static_cast<double>(m);

    double int_b1 = 0.0;
    double int_second = 0.0;
    for (std::size_t k = 0; k <= m; ++k) {
        const double w = (k == 0 || k == m) ? 0.5 * h : h;
        const Vec3 b = n.adapted(h * static_cast<double>(k), theta0);
        int_b1 += w * b.x();
        int_second += w * (st * b.x() * b.z() - 0.5 * ct * (b.x() * b.x() + b.y() * b.y()));
    }
    ClassicalPhaseReport r;
    r.zeroth = precession_phase(theta0, n_turns);
    r.first_order = -0.5 * epsilon * st * int_b1;
    r.second_order = 0.5 * epsilon * epsilon * int_second;
    return r;
}

ClassicalPhaseReport phase_perturbative_time(double theta0, double epsilon, const TimeSeries& ts) {
    adapted_frame(theta0, 0.0);
    const std::size_t n = ts.t.size();
    if (n != ts.b.size()) throw DimensionMismatch("phase_perturbative_time: t and b sizes differ");
    if (!ts.b2_dot.empty() && ts.b2_dot.size() != n) {
        throw DimensionMismatch("phase_perturbative_time: b2_dot size differs from t");
    }
    if (n < kMinTimeSamples) {
        throw InsufficientResolution("phase_perturbative_time: need at least " + std::to_string(kMinTimeSamples) +
                                     " samples");
    }
    if (!(ts.omega > 0.0)) throw DomainError("phase_perturbative_time: omega must be > 0");
    for (std::size_t k = 1; k < n; ++k) {
        if (!(ts.t[k] > ts.t[k - 1])) throw ParametrizationError("phase_perturbative_time: t not increasing");
    }
    const double omega = ts.omega;
    const double span = ts.t.back() - ts.t.front();
    const int n_turns = static_cast<int>(std::lround(omega * span / kTwoPi));
    if (n_turns < 1 || std::abs(omega * span - kTwoPi * n_turns) > 1e-9 * std::max(1.0, omega * span)) {
        throw DomainError("phase_perturbative_time: samples must cover whole turns, T = 2 pi n / omega");
    }

    std::vector<double> b2_dot = ts.b2_dot;
    if (b2_dot.empty()) {
        const double h = span / static_cast<double>(n - 1);
        for (std::size_t k = 1; k < n; ++k) {
            if (std::abs((ts.t[k] - ts.t[k - 1]) - h) > 1e-9 * h) {
                throw InsufficientResolution("phase_perturbative_time: derivative estimation needs a uniform grid");
            }
        }
        std::vector<double> b2(n);
        for (std::size_t k = 0; k < n; ++k) b2[k] = ts.b[k].y();
        const bool periodic = (ts.b.back() - ts.b.front()).norm() <= 1e-12 * (1.0 + ts.b.front().norm());
        b2_dot = central_difference(ts.t, b2, 1, periodic);
        const auto coarse = central_difference(ts.t, b2, 2, periodic);
        double scale = 0.0;
        double diff = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            scale = std::max(scale, std::abs(b2_dot[k]));
            diff = std::max(diff, std::abs(b2_dot[k] - coarse[k]));
        }
        if (diff > kDerivativeResolution * scale) {
            throw InsufficientResolution("phase_perturbative_time: grid too coarse to resolve db_2/dt");
        }
    }

    const double st = std::sin(theta0);
    const double ct = std::cos(theta0);
    double int_b1 = 0.0;
    double int_second = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        double w = 0.0;
        if (k > 0) w += 0.5 * (ts.t[k] - ts.t[k - 1]);
        if (k + 1 < n) w += 0.5 * (ts.t[k + 1] - ts.t[k]);
        const Vec3& b = ts.b[k];
        int_b1 += w * b.x();
        int_second += w * (-0.25 * omega * ct * (b.x() * b.x() + b.y() * b.y()) - 0.5 * b.x() * b2_dot[k] +
                           0.5 * omega * st * b.x() * b.z());
    }
    ClassicalPhaseReport r;
    r.zeroth = precession_phase(theta0, n_turns);
    r.first_order = -0.5 * epsilon * omega * st * int_b1;
    r.second_order = epsilon * epsilon * int_second;
    return r;
}

double phase_exact(double theta0, double epsilon, const NoiseRealization& n, std::size_t n_intervals, int n_turns) {
    const auto grid = azimuth_grid(n_intervals * static_cast<std::size_t>(n_turns), n_turns);
    const auto fs = field_from_noise(theta0, epsilon, n, grid);
    return solid_angle_phase(curve_from_field(fs.field, fs.precession));
}

double cos_theta_exact(double theta0, double epsilon, const Vec3& b) {
    const double z = std::cos(theta0) * (1.0 + epsilon * b.z()) - epsilon * b.x() * std::sin(theta0);
    const double norm = std::sqrt((1.0 + epsilon * b.z()) * (1.0 + epsilon * b.z()) +
                                  epsilon * epsilon * (b.x() * b.x() + b.y() * b.y()));
    return z / norm;
}

EnsembleResult ensemble_average(double theta0, double epsilon, const NoiseStatistics& stats,
                                std::size_t n_realizations, const EnsembleOptions& options) {
    stats.validate();
    adapted_frame(theta0, 0.0);
    if (n_realizations < 2) throw DomainError("ensemble_average: need at least 2 realizations");

    struct Member {
        ClassicalPhaseReport phase;
        double sigma_z{0.0};
    };
    const std::size_t nq = options.n_quadrature;
    auto members = parallel_map<Member>(n_realizations, options.workers, [&](std::size_t i) {
        NoiseStatistics s = stats;
        s.seed = derive_seed(stats.seed, i);
        const auto n = sample_noise(s);
        Member m;
        m.phase = phase_perturbative_phi(theta0, epsilon, n, nq);
        double acc = 0.0;
        for (std::size_t k = 0; k < nq; ++k) {
            acc += cos_theta_exact(theta0, epsilon, n.adapted(kTwoPi * static_cast<double>(k) / nq, theta0));
        }
        m.sigma_z = acc / static_cast<double>(nq);
        return m;
    });

    std::vector<double> total(n_realizations), first(n_realizations), second(n_realizations),
        sz(n_realizations);
    for (std::size_t i = 0; i < n_realizations; ++i) {
        total[i] = members[i].phase.total();
        first[i] = members[i].phase.first_order;
        second[i] = members[i].phase.second_order;
        sz[i] = members[i].sigma_z;
    }
    const auto s_total = summarize(total);
    const auto s_first = summarize(first);
    const auto s_second = summarize(second);
    const auto s_sz = summarize(sz);

    EnsembleResult r;
    r.n_realizations = n_realizations;
    r.zeroth = precession_phase(theta0);
    r.first_order = s_first.mean;
    r.second_order = s_second.mean;
    r.mean_phase = r.zeroth + r.first_order + r.second_order;
    r.std_error = s_total.std_error;
    r.first_order_std_error = s_first.std_error;
    r.second_order_std_error = s_second.std_error;
    r.mean_sigma_z = s_sz.mean;
    r.sigma_z_phase = -kPi * (1.0 - s_sz.mean);
    return r;
}

SampleSummary ensemble_exact(double theta0, double epsilon, const NoiseStatistics& stats, std::size_t n_realizations,
                             std::size_t n_intervals, int n_turns, unsigned workers) {
    stats.validate();
    if (n_realizations < 2) throw DomainError("ensemble_exact: need at least 2 realizations");
    if (n_turns < 1) throw DomainError("ensemble_exact: n_turns must be >= 1");
    const auto phases = parallel_map<double>(n_realizations, workers, [&](std::size_t i) {
        NoiseStatistics s = stats;
        s.seed = derive_seed(stats.seed, i);
        return phase_exact(theta0, epsilon, sample_noise(s), n_intervals, n_turns) / n_turns;
    });
    return summarize(phases);
}

double ensemble_mean_prediction(double theta0, double epsilon, double transverse_variance) {
    return precession_phase(theta0) - 0.5 * epsilon * epsilon * kPi * std::cos(theta0) * transverse_variance;
}

double z_only_shift(double theta0, double epsilon, double var_bz) {
    adapted_frame(theta0, 0.0);
    if (!(var_bz >= 0.0)) throw DomainError("z_only_shift: var_bz must be >= 0");
    const double s = std::sin(theta0);
    return 1.5 * kPi * epsilon * epsilon * var_bz * s * s * std::cos(theta0);
}

double recover_noise_strength(double delta_phi_max, double omega_L) {
    if (!(delta_phi_max > 0.0)) throw DomainError("recover_noise_strength: delta_phi_max must be > 0");
    if (!(omega_L > 0.0)) throw DomainError("recover_noise_strength: omega_L must be > 0");
    return 0.5 * omega_L * std::sqrt(2.0 * delta_phi_max / (kZOnlyPeakValue * 3.0 * kPi));
}

}  // namespace geophase

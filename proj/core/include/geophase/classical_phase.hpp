// classical_phase.hpp: geometric phase of a spin-1/2 in a noisy precessing
// classical field, to second order in the noise amplitude.

#pragma once

#include "geophase/ensemble.hpp"
#include "geophase/noise.hpp"

#include <cstddef>
#include <cstdint>

namespace geophase {

enum class PhaseMethod { exact, perturbative };

const char* to_string(PhaseMethod m) noexcept;

// Order-by-order decomposition of one perturbative phase.
struct ClassicalPhaseReport {
    double zeroth{0.0};        // -pi (1 - cos theta0) per turn
    double first_order{0.0};   // -(eps/2) sin(theta0) integral b~_1
    double second_order{0.0};  // (eps^2/2) integral {sin b~_1 b~_3 - cos/2 (b~_1^2 + b~_2^2)}
    PhaseMethod method{PhaseMethod::perturbative};

    double total() const noexcept { return zeroth + first_order + second_order; }
};

// Phase of one realization over n_turns full turns, integrating the
// adapted-frame formula on a uniform azimuth grid of n_quadrature intervals
// per turn (trapezoid rule).
ClassicalPhaseReport phase_perturbative_phi(double theta0, double epsilon, const NoiseRealization& n,
                                            std::size_t n_quadrature = 1024, int n_turns = 1);

// Same phase written in terms of b(t), including the -1/2 b_1 db_2/dt term.
// Uses ts.b2_dot when present, otherwise central differences; throws
// InsufficientResolution when the grid cannot resolve db_2/dt.
ClassicalPhaseReport phase_perturbative_time(double theta0, double epsilon, const TimeSeries& ts);

// Exact solid-angle phase of the field built from a realization: the oracle
// for the perturbative formulas.
double phase_exact(double theta0, double epsilon, const NoiseRealization& n, std::size_t n_intervals = 2048,
                   int n_turns = 1);

// Exact cos(theta) of the field direction at azimuth phi (= <sigma_z> of an
// aligned spin).
double cos_theta_exact(double theta0, double epsilon, const Vec3& adapted_noise);

struct EnsembleOptions {
    unsigned workers{0};  // 0: GEOPHASE_WORKERS or hardware concurrency
    std::size_t n_quadrature{1024};
};

struct EnsembleResult {
    double mean_phase{0.0};
    double std_error{0.0};
    std::size_t n_realizations{0};
    // breakdown of mean_phase; mean_phase == zeroth + first_order + second_order
    double zeroth{0.0};
    double first_order{0.0};
    double second_order{0.0};
    double first_order_std_error{0.0};
    double second_order_std_error{0.0};
    // ensemble and azimuth average of the exact <sigma_z>, and -pi (1 - it)
    double mean_sigma_z{0.0};
    double sigma_z_phase{0.0};
};

// Monte Carlo mean of phase_perturbative_phi over realizations seeded by
// derive_seed(stats.seed, i).
EnsembleResult ensemble_average(double theta0, double epsilon, const NoiseStatistics& stats,
                                std::size_t n_realizations, const EnsembleOptions& options = {});

// Ensemble of phase_exact(...) / n_turns; member i uses derive_seed(stats.seed, i).
// An open curve (aperiodic noise over one turn) is closed by a geodesic.
SampleSummary ensemble_exact(double theta0, double epsilon, const NoiseStatistics& stats, std::size_t n_realizations,
                             std::size_t n_intervals = 1024, int n_turns = 1, unsigned workers = 0);

// Closed form of the isotropic mean: phi_+ - (eps^2 pi / 2) cos(theta0) (sigma_1^2 + sigma_2^2).
double ensemble_mean_prediction(double theta0, double epsilon, double transverse_variance);

// z-only noise: phi_+ - mean phase = (3 pi / 2) eps^2 var_bz sin^2(theta0) cos(theta0).
double z_only_shift(double theta0, double epsilon, double var_bz);

// Location and value of the maximum of sin^2(theta) cos(theta) on (0, pi/2).
inline constexpr double kZOnlyPeakTheta = 0.95531661812450927816;  // acos(1/sqrt(3))
inline constexpr double kZOnlyPeakValue = 0.38490017945975050967;  // 2 / (3 sqrt(3))

// Noise strength P (rad/s) from the maximal shift, with eps b~_z -> 2P / omega_L.
double recover_noise_strength(double delta_phi_max, double omega_L);

}  // namespace geophase

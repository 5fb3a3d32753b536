// noise.hpp: stochastic fluctuation fields in the adapted frame.
//
// A realization is a set of truncated Fourier series b~_i(phi), i = 1..3,
// expressed in the frame adapted to the unperturbed precession and
// parametrized by the azimuth of the total field. The isotropic ensemble
// has zero mean, uncorrelated b~_1 b~_3 and stationary b~_1^2 + b~_2^2; the
// z-only ensemble projects a single cartesian b_z onto the frame.

#pragma once

#include "geophase/frames_and_curves.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace geophase {

enum class NoiseMode { isotropic3, z_only };

const char* to_string(NoiseMode mode) noexcept;
NoiseMode noise_mode_from_string(const std::string& name);  // throws DomainError

struct NoiseStatistics {
    double sigma{1.0};  // per-component standard deviation at every phi
    int k_max{4};       // highest harmonic; callers keep k_max << 1/epsilon
    NoiseMode mode{NoiseMode::isotropic3};
    bool periodic{true};
    std::uint64_t seed{0};

    void validate() const;  // throws DomainError
};

// Zero-mean truncated Fourier series
//   f(phi) = sum_k a_k cos(k phi) + b_k sin(k phi)
//          + c cos(nu phi) + d sin(nu phi)
// where the optional last term has a non-integer frequency nu and breaks
// 2pi-periodicity.
struct FourierSeries {
    std::vector<double> cos_coeff;  // a_k, k = 1..k_max
    std::vector<double> sin_coeff;  // b_k, k = 1..k_max
    double extra_frequency{0.0};
    double extra_cos{0.0};
    double extra_sin{0.0};

    double value(double phi) const;
    double derivative(double phi) const;
    bool periodic() const noexcept { return extra_cos == 0.0 && extra_sin == 0.0; }
};

class NoiseRealization {
public:
    // Three independent adapted-frame components.
    static NoiseRealization isotropic(std::array<FourierSeries, 3> components);
    // One cartesian z component, projected onto the frame on evaluation.
    static NoiseRealization z_only(FourierSeries bz);

    NoiseMode mode() const noexcept { return mode_; }
    std::span<const FourierSeries> series() const noexcept { return series_; }
    bool periodic() const noexcept;

    // (b~_1, b~_2, b~_3) at azimuth phi for precession angle theta0.
    Vec3 adapted(double phi, double theta0) const;
    Vec3 adapted_derivative(double phi, double theta0) const;

    // Cartesian b_z for z-only realizations; throws DomainError otherwise.
    double bz(double phi) const;

private:
    NoiseRealization(NoiseMode mode, std::vector<FourierSeries> series);

    NoiseMode mode_{NoiseMode::isotropic3};
    std::vector<FourierSeries> series_;
};

// Draws one realization. Harmonic amplitudes are i.i.d. Gaussian with
// variance sigma^2 / n_terms so that every component has variance sigma^2
// at every phi. Non-periodic statistics add one term of incommensurate
// frequency k_max * (sqrt(5) - 1) / 2.
NoiseRealization sample_noise(const NoiseStatistics& stats);

// Per-index seed for ensemble member `index` of master seed `seed`.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept;

// JSON archive: {"schema": "geophase.noise/1", "mode": ..., "components": [...]}.
std::string to_json(const NoiseRealization& n);
NoiseRealization noise_from_json(const std::string& text);

// ---------------------------------------------------------------------------
// Fields built from a realization.

using AdaptedComponents = std::function<Vec3(double phi)>;

struct FieldSamples {
    std::vector<double> azimuth;         // actual azimuth of B at each sample
    std::vector<double> precession;      // omega * t, the phase of B_0 at that sample
    std::vector<Vec3> field;             // B = e3 + eps * sum_i b~_i e_i
};

// Uniform azimuth grid 0 .. 2pi * n_turns with n_intervals + 1 points.
std::vector<double> azimuth_grid(std::size_t n_intervals, int n_turns = 1);

// B = B_0(t) + eps * b(t) with b(t(phi)) = b~(phi): at each grid azimuth the
// returned vector has exactly that azimuth, and its adapted components with
// respect to the frame of B_0 at the same instant are b~(phi). Unit |B_0|.
FieldSamples field_from_noise(double theta0, double epsilon, const NoiseRealization& n,
                              std::span<const double> azimuth_grid);
FieldSamples field_from_components(double theta0, double epsilon, const AdaptedComponents& b,
                                   std::span<const double> azimuth_grid);

// Inverse map: azimuth of the total field at precession phase omega * t.
double azimuth_at_precession(double theta0, double epsilon, const NoiseRealization& n, double precession);

// Time-domain view b(t) = b~(phi(t)) on a uniform grid t_k = k * T / n_intervals,
// T = 2pi * n_turns / omega, with the exact derivative of b_2.
struct TimeSeries {
    double omega{1.0};
    std::vector<double> t;
    std::vector<Vec3> b;
    std::vector<double> b2_dot;
};

TimeSeries noise_in_time(double theta0, double epsilon, const NoiseRealization& n, double omega,
                         std::size_t n_intervals, int n_turns = 1);

// Total field at time t for the same construction.
Vec3 field_at_time(double theta0, double epsilon, const NoiseRealization& n, double omega, double t);

}  // namespace geophase

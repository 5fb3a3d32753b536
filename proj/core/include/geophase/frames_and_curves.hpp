// frames_and_curves.hpp: spherical geometry for field directions.
//
// Adapted frames co-rotating with a precessing field, curves on the unit
// sphere parametrized by azimuth, and the solid-angle geometric phase
// -1/2 * integral of (1 - cos(theta)) d(phi) for closed and open curves.

#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace geophase {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Polar/azimuthal angles of a unit vector. phi is kept in [0, 2pi).
struct Direction {
    double theta{0.0};
    double phi{0.0};

    Direction() = default;
    Direction(double theta_, double phi_);

    static Direction from_cartesian(const Vec3& v);  // throws DegenerateField for v == 0
    Vec3 cartesian() const;
};

// Orthonormal triad adapted to the precessing direction at polar angle
// theta0 and azimuth phi. e3 points along the field, e2 is the azimuthal
// unit vector and e1 = e2 x e3.
struct AdaptedFrame {
    Vec3 e1;
    Vec3 e2;
    Vec3 e3;
};

AdaptedFrame adapted_frame(double theta0, double phi);

// Unit-norm e1, e2 completing n_hat to a right-handed triad, obtained by
// rotating x and y about z x n_hat by the polar angle of n_hat. Unlike
// adapted_frame this is regular at the north pole.
struct TransverseBasis {
    Vec3 e1;
    Vec3 e2;
};

TransverseBasis transverse_basis(const Vec3& n_hat);

struct CurvePoint {
    double phi{0.0};
    double theta{0.0};
};

// A curve on the unit sphere given as samples (phi_k, theta_k) with phi
// strictly increasing. Periodic curves span exactly n_turns * 2pi in phi
// and return to their starting polar angle; open curves are closed by a
// great-circle segment when their phase is evaluated.
class SphericalCurve {
public:
    static constexpr double kClosureTolerance = 1e-8;

    SphericalCurve(std::vector<CurvePoint> samples, bool periodic);

    std::span<const CurvePoint> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }
    bool periodic() const noexcept { return periodic_; }
    int n_turns() const noexcept { return n_turns_; }
    double phi_begin() const noexcept { return samples_.front().phi; }
    double phi_end() const noexcept { return samples_.back().phi; }

    // Cubic Hermite interpolation of cos(theta) in phi, with slopes from
    // three-point differences.
    double cos_theta_at(double phi) const;
    std::span<const double> cos_theta_slopes() const noexcept { return slopes_; }

    // Same curve on a uniform phi grid of n_points samples (endpoints kept).
    SphericalCurve resampled(std::size_t n_points) const;

    // Copy whose sample grid is phi_k -> warp(phi_k); warp must be strictly
    // increasing and fix both endpoints.
    template <typename Warp>
    SphericalCurve reparametrized(Warp&& warp) const {
        std::vector<CurvePoint> out;
        out.reserve(samples_.size());
        for (const auto& p : samples_) {
            const double phi = warp(p.phi);
            out.push_back({phi, theta_from_cos(cos_theta_at(phi))});
        }
        return SphericalCurve(std::move(out), periodic_);
    }

private:
    static double theta_from_cos(double c);
    std::vector<double> slopes() const;

    std::vector<CurvePoint> samples_;
    std::vector<double> slopes_;  // d cos(theta) / d phi at each sample
    bool periodic_{true};
    int n_turns_{1};
};

// Direction samples of a field B(t) (any magnitude) -> azimuth-parametrized
// curve. Samples are taken in timestamp order; the azimuth is unwrapped by
// nearest-branch continuation. The curve is flagged periodic when its ends
// coincide after a whole number of turns.
SphericalCurve curve_from_field(std::span<const Vec3> field, std::span<const double> timestamps);

// Signed value of integral (1 - cos(theta)) d(phi) along the great-circle
// arc from `from` to `to` (the area of the geodesic triangle north-from-to).
double geodesic_sweep(const Vec3& from, const Vec3& to);

// Geometric phase of a spin-1/2 aligned with a field tracing `curve`:
// -1/2 of the enclosed solid angle, accumulated without reduction mod 2pi.
// The integral is taken over the curve's Hermite interpolant.
// Throws InsufficientResolution for fewer than 8 samples.
double solid_angle_phase(const SphericalCurve& curve);

// phi-only reference value -pi * (1 - cos(theta0)) per turn.
double precession_phase(double theta0, int n_turns = 1);

}  // namespace geophase

// frames_and_curves.cpp

#include "geophase/frames_and_curves.hpp"

#include "geophase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace geophase {

namespace {

// Maximum azimuth advance between consecutive field samples before the
// nearest-branch unwrap is considered ambiguous.
constexpr double kMaxAzimuthStep = 0.5 * kPi;
constexpr double kPoleSine = 1e-10;

double wrap_to_pi(double a) {
    a = std::remainder(a, kTwoPi);
    if (a <= -kPi) a += kTwoPi;
    return a;
}

void require_off_pole(double theta0, const char* where) {
    if (!std::isfinite(theta0) || std::sin(theta0) < kPoleSine || theta0 <= 0.0 || theta0 >= kPi) {
        throw PoleSingularity(std::string(where) + ": theta0 must lie strictly inside (0, pi), got " +
                              std::to_string(theta0));
    }
}

}  // namespace

Direction::Direction(double theta_, double phi_) : theta(theta_), phi(phi_) {
    if (!std::isfinite(theta) || !std::isfinite(phi)) {
        throw DomainError("Direction: angles must be finite");
    }
    if (theta < 0.0 || theta > kPi) {
        throw DomainError("Direction: theta must lie in [0, pi]");
    }
    phi = std::fmod(phi, kTwoPi);
    if (phi < 0.0) phi += kTwoPi;
}

Direction Direction::from_cartesian(const Vec3& v) {
    const double r = v.norm();
    if (!(r > 0.0) || !std::isfinite(r)) {
        throw DegenerateField("Direction::from_cartesian: zero or non-finite vector");
    }
    const double rho = std::hypot(v.x(), v.y());
    return Direction(std::atan2(rho, v.z()), std::atan2(v.y(), v.x()));
}

Vec3 Direction::cartesian() const {
    const double s = std::sin(theta);
    return {s * std::cos(phi), s * std::sin(phi), std::cos(theta)};
}

AdaptedFrame adapted_frame(double theta0, double phi) {
    require_off_pole(theta0, "adapted_frame");
    const double ct = std::cos(theta0);
    const double st = std::sin(theta0);
    const double cp = std::cos(phi);
    const double sp = std::sin(phi);
    return AdaptedFrame{
        Vec3{ct * cp, ct * sp, -st},
        Vec3{-sp, cp, 0.0},
        Vec3{st * cp, st * sp, ct},
    };
}

TransverseBasis transverse_basis(const Vec3& n_hat) {
    const double r = n_hat.norm();
    if (!(r > 0.0)) throw DegenerateField("transverse_basis: zero direction");
    const Vec3 n = n_hat / r;
    const Vec3 z = Vec3::UnitZ();
    const Vec3 axis = z.cross(n);
    const double s = axis.norm();
    const double c = z.dot(n);
    if (s < 1e-14) {
        if (c > 0.0) return {Vec3::UnitX(), Vec3::UnitY()};
        // South pole: rotation by pi about x.
        return {Vec3::UnitX(), -Vec3::UnitY()};
    }
    const Eigen::AngleAxisd rot(std::atan2(s, c), axis / s);
    return {rot * Vec3::UnitX(), rot * Vec3::UnitY()};
}

// ---------------------------------------------------------------------------
// SphericalCurve

SphericalCurve::SphericalCurve(std::vector<CurvePoint> samples, bool periodic)
    : samples_(std::move(samples)), periodic_(periodic) {
    if (samples_.size() < 2) {
        throw InsufficientResolution("SphericalCurve: need at least two samples");
    }
    for (std::size_t k = 0; k < samples_.size(); ++k) {
        const auto& p = samples_[k];
        if (!std::isfinite(p.phi) || !std::isfinite(p.theta)) {
            throw DomainError("SphericalCurve: non-finite sample");
        }
        if (std::sin(p.theta) < kPoleSine || p.theta <= 0.0 || p.theta >= kPi) {
            throw PoleSingularity("SphericalCurve: curve touches a pole at sample " + std::to_string(k));
        }
        if (k > 0 && !(p.phi > samples_[k - 1].phi)) {
            throw ParametrizationError("SphericalCurve: phi must be strictly increasing (sample " +
                                       std::to_string(k) + ")");
        }
    }
    const double span = phi_end() - phi_begin();
    const int turns = static_cast<int>(std::lround(span / kTwoPi));
    if (periodic_) {
        if (turns < 1 || std::abs(span - kTwoPi * turns) > kClosureTolerance * std::max(1.0, span)) {
            throw ParametrizationError("SphericalCurve: periodic curve must span a whole number of turns");
        }
        if (std::abs(std::cos(samples_.back().theta) - std::cos(samples_.front().theta)) > kClosureTolerance) {
            throw ParametrizationError("SphericalCurve: periodic curve does not close on itself");
        }
    }
    n_turns_ = std::max(1, turns);
    slopes_ = slopes();
}

double SphericalCurve::theta_from_cos(double c) {
    return std::acos(std::clamp(c, -1.0, 1.0));
}

std::vector<double> SphericalCurve::slopes() const {
    const std::size_t n = samples_.size();
    std::vector<double> x(n), y(n), d(n);
    for (std::size_t k = 0; k < n; ++k) {
        x[k] = samples_[k].phi;
        y[k] = std::cos(samples_[k].theta);
    }
    auto central = [](double x0, double x1, double x2, double y0, double y1, double y2) {
        const double h0 = x1 - x0;
        const double h1 = x2 - x1;
        return (h0 * h0 * y2 - h1 * h1 * y0 + (h1 * h1 - h0 * h0) * y1) / (h0 * h1 * (h0 + h1));
    };
    for (std::size_t k = 1; k + 1 < n; ++k) {
        d[k] = central(x[k - 1], x[k], x[k + 1], y[k - 1], y[k], y[k + 1]);
    }
    if (n == 2) {
        d[0] = d[1] = (y[1] - y[0]) / (x[1] - x[0]);
        return d;
    }
    if (periodic_) {
        const double span = x[n - 1] - x[0];
        d[0] = central(x[n - 2] - span, x[0], x[1], y[n - 2], y[0], y[1]);
        d[n - 1] = d[0];
    } else {
        double h0 = x[1] - x[0];
        double h1 = x[2] - x[1];
        d[0] = -(2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[0] + (h0 + h1) / (h0 * h1) * y[1] -
               h0 / (h1 * (h0 + h1)) * y[2];
        h0 = x[n - 1] - x[n - 2];
        h1 = x[n - 2] - x[n - 3];
        d[n - 1] = (2.0 * h0 + h1) / (h0 * (h0 + h1)) * y[n - 1] - (h0 + h1) / (h0 * h1) * y[n - 2] +
                   h0 / (h1 * (h0 + h1)) * y[n - 3];
    }
    return d;
}

double SphericalCurve::cos_theta_at(double phi) const {
    const double lo = phi_begin();
    const double hi = phi_end();
    if (phi < lo || phi > hi) {
        if (!periodic_) throw DomainError("SphericalCurve::cos_theta_at: phi outside the open curve");
        const double span = hi - lo;
        phi = lo + std::fmod(std::fmod(phi - lo, span) + span, span);
    }
    auto it = std::upper_bound(samples_.begin(), samples_.end(), phi,
                               [](double v, const CurvePoint& p) { return v < p.phi; });
    std::size_t k = static_cast<std::size_t>(std::distance(samples_.begin(), it));
    k = std::clamp<std::size_t>(k, 1, samples_.size() - 1);
    const auto& a = samples_[k - 1];
    const auto& b = samples_[k];
    const double h = b.phi - a.phi;
    const double t = (phi - a.phi) / h;
    const auto& d = slopes_;
    const double ya = std::cos(a.theta);
    const double yb = std::cos(b.theta);
    const double t2 = t * t;
    const double t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * ya + (t3 - 2 * t2 + t) * h * d[k - 1] + (-2 * t3 + 3 * t2) * yb +
           (t3 - t2) * h * d[k];
}

SphericalCurve SphericalCurve::resampled(std::size_t n_points) const {
    if (n_points < 2) throw InsufficientResolution("SphericalCurve::resampled: need at least two points");
    const auto& d = slopes_;
    const double lo = phi_begin();
    const double hi = phi_end();
    std::vector<CurvePoint> out;
    out.reserve(n_points);
    std::size_t k = 1;
    for (std::size_t i = 0; i < n_points; ++i) {
        const double phi = (i + 1 == n_points) ? hi : lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);
        while (k + 1 < samples_.size() && samples_[k].phi < phi) ++k;
        const auto& a = samples_[k - 1];
        const auto& b = samples_[k];
        const double h = b.phi - a.phi;
        const double t = std::clamp((phi - a.phi) / h, 0.0, 1.0);
        const double t2 = t * t;
        const double t3 = t2 * t;
        const double c = (2 * t3 - 3 * t2 + 1) * std::cos(a.theta) + (t3 - 2 * t2 + t) * h * d[k - 1] +
                         (-2 * t3 + 3 * t2) * std::cos(b.theta) + (t3 - t2) * h * d[k];
        out.push_back({phi, theta_from_cos(c)});
    }
    if (periodic_) out.back().theta = out.front().theta;
    return SphericalCurve(std::move(out), periodic_);
}

// ---------------------------------------------------------------------------

SphericalCurve curve_from_field(std::span<const Vec3> field, std::span<const double> timestamps) {
    if (field.size() != timestamps.size()) {
        throw DimensionMismatch("curve_from_field: field and timestamp counts differ");
    }
    if (field.size() < 2) throw InsufficientResolution("curve_from_field: need at least two samples");

    std::vector<std::size_t> order(field.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return timestamps[a] < timestamps[b]; });

    std::vector<CurvePoint> pts;
    pts.reserve(field.size());
    std::vector<Vec3> unit;
    unit.reserve(field.size());
    double prev_raw = 0.0;
    for (std::size_t i = 0; i < order.size(); ++i) {
        const std::size_t k = order[i];
        if (i > 0 && !(timestamps[k] > timestamps[order[i - 1]])) {
            throw ParametrizationError("curve_from_field: duplicate timestamps");
        }
        const Vec3& b = field[k];
        const double r = b.norm();
        if (!(r > 0.0) || !std::isfinite(r)) {
            throw DegenerateField("curve_from_field: zero field at sample " + std::to_string(k));
        }
        const double rho = std::hypot(b.x(), b.y());
        if (rho <= kPoleSine * r) {
            throw PoleSingularity("curve_from_field: field along the z axis at sample " + std::to_string(k));
        }
        const double raw = std::atan2(b.y(), b.x());
        const double theta = std::atan2(rho, b.z());
        double phi = raw;
        if (i > 0) {
            const double step = wrap_to_pi(raw - prev_raw);
            if (!(step > 0.0)) {
                throw ParametrizationError("curve_from_field: azimuth not increasing at sample " +
                                           std::to_string(k));
            }
            if (step > kMaxAzimuthStep) {
                throw ParametrizationError("curve_from_field: azimuth step too large to unwrap at sample " +
                                           std::to_string(k));
            }
            phi = pts.back().phi + step;
        }
        prev_raw = raw;
        pts.push_back({phi, theta});
        unit.push_back(b / r);
    }

    const double span = pts.back().phi - pts.front().phi;
    const long turns = std::lround(span / kTwoPi);
    const bool closes = turns >= 1 &&
                        std::abs(span - kTwoPi * static_cast<double>(turns)) <= 1e-9 * std::max(1.0, span) &&
                        (unit.back() - unit.front()).norm() <= 1e-9;
    if (closes) pts.back().theta = pts.front().theta;
    return SphericalCurve(std::move(pts), closes);
}

double geodesic_sweep(const Vec3& from, const Vec3& to) {
    const Vec3 a = from.normalized();
    const Vec3 b = to.normalized();
    const Vec3 n = Vec3::UnitZ();
    const double triple = n.dot(a.cross(b));
    const double denom = 1.0 + n.dot(a) + n.dot(b) + a.dot(b);
    return 2.0 * std::atan2(triple, denom);
}

double solid_angle_phase(const SphericalCurve& curve) {
    if (curve.size() < 8) {
        throw InsufficientResolution("solid_angle_phase: need at least 8 samples, got " +
                                     std::to_string(curve.size()));
    }
    const auto s = curve.samples();
    const auto d = curve.cos_theta_slopes();
    // Exact integral of the cubic Hermite interpolant: trapezoid plus an end
    // correction that telescopes away on uniform periodic grids.
    double area = 0.0;
    for (std::size_t k = 1; k < s.size(); ++k) {
        const double h = s[k].phi - s[k - 1].phi;
        const double f0 = 1.0 - std::cos(s[k - 1].theta);
        const double f1 = 1.0 - std::cos(s[k].theta);
        area += 0.5 * (f0 + f1) * h - h * h * (d[k - 1] - d[k]) / 12.0;
    }
    if (!curve.periodic()) {
        const Vec3 last = Direction(s.back().theta, s.back().phi).cartesian();
        const Vec3 first = Direction(s.front().theta, s.front().phi).cartesian();
        area += geodesic_sweep(last, first);
    }
    return -0.5 * area;
}

double precession_phase(double theta0, int n_turns) {
    return -kPi * static_cast<double>(n_turns) * (1.0 - std::cos(theta0));
}

}  // namespace geophase

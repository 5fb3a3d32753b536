// noise.cpp

#include "geophase/noise.hpp"

#include "geophase/errors.hpp"

#include <json.hpp>

#include <cmath>
#include <random>

namespace geophase {

namespace {

constexpr int kMaxNewtonIterations = 60;

struct AzimuthOffset {
    double value;       // azimuth of B minus precession phase
    double derivative;  // d(value)/d(phi)
};

// Offset between the azimuth of e3 + eps*b~ and the precession phase of its
// frame. Depends on phi only through b~(phi).
AzimuthOffset azimuth_offset(double theta0, double epsilon, const Vec3& b, const Vec3& db) {
    const double st = std::sin(theta0);
    const double ct = std::cos(theta0);
    const double x = st * (1.0 + epsilon * b.z()) + epsilon * b.x() * ct;
    const double y = epsilon * b.y();
    if (!(x > 0.0)) {
        throw DomainError("noise: fluctuation too large, field folds back through the z axis");
    }
    const double dx = epsilon * (st * db.z() + ct * db.x());
    const double dy = epsilon * db.y();
    return {std::atan2(y, x), (x * dy - y * dx) / (x * x + y * y)};
}

Vec3 total_field(double theta0, double epsilon, double precession, const Vec3& b) {
    const auto f = adapted_frame(theta0, precession);
    return f.e3 + epsilon * (b.x() * f.e1 + b.y() * f.e2 + b.z() * f.e3);
}

FourierSeries draw_series(std::mt19937_64& rng, int k_max, double scale, bool periodic) {
    std::normal_distribution<double> gauss(0.0, scale);
    FourierSeries s;
    s.cos_coeff.resize(static_cast<std::size_t>(k_max));
    s.sin_coeff.resize(static_cast<std::size_t>(k_max));
    for (int k = 0; k < k_max; ++k) {
        s.cos_coeff[k] = gauss(rng);
        s.sin_coeff[k] = gauss(rng);
    }
    if (!periodic) {
        s.extra_frequency = k_max * 0.5 * (std::sqrt(5.0) - 1.0);
        s.extra_cos = gauss(rng);
        s.extra_sin = gauss(rng);
    }
    return s;
}

void validate_series(const FourierSeries& s) {
    if (s.cos_coeff.size() != s.sin_coeff.size()) {
        throw DimensionMismatch("FourierSeries: cosine and sine coefficient counts differ");
    }
    for (double c : s.cos_coeff) {
        if (!std::isfinite(c)) throw DomainError("FourierSeries: non-finite coefficient");
    }
    for (double c : s.sin_coeff) {
        if (!std::isfinite(c)) throw DomainError("FourierSeries: non-finite coefficient");
    }
    if (!std::isfinite(s.extra_frequency) || !std::isfinite(s.extra_cos) || !std::isfinite(s.extra_sin)) {
        throw DomainError("FourierSeries: non-finite extra term");
    }
}

}  // namespace

const char* to_string(NoiseMode mode) noexcept {
    switch (mode) {
        case NoiseMode::isotropic3: return "isotropic3";
        case NoiseMode::z_only: return "z_only";
    }
    return "?";
}

NoiseMode noise_mode_from_string(const std::string& name) {
    if (name == "isotropic3") return NoiseMode::isotropic3;
    if (name == "z_only" || name == "z-only") return NoiseMode::z_only;
    throw DomainError("unknown noise mode '" + name + "'");
}

void NoiseStatistics::validate() const {
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw DomainError("NoiseStatistics: sigma must be > 0");
    if (k_max < 1) throw DomainError("NoiseStatistics: k_max must be >= 1");
}

double FourierSeries::value(double phi) const {
    double v = 0.0;
    for (std::size_t i = 0; i < cos_coeff.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        v += cos_coeff[i] * std::cos(k * phi) + sin_coeff[i] * std::sin(k * phi);
    }
    if (extra_cos != 0.0 || extra_sin != 0.0) {
        v += extra_cos * std::cos(extra_frequency * phi) + extra_sin * std::sin(extra_frequency * phi);
    }
    return v;
}

double FourierSeries::derivative(double phi) const {
    double v = 0.0;
    for (std::size_t i = 0; i < cos_coeff.size(); ++i) {
        const double k = static_cast<double>(i + 1);
        v += k * (sin_coeff[i] * std::cos(k * phi) - cos_coeff[i] * std::sin(k * phi));
    }
    if (extra_cos != 0.0 || extra_sin != 0.0) {
        const double w = extra_frequency;
        v += w * (extra_sin * std::cos(w * phi) - extra_cos * std::sin(w * phi));
    }
    return v;
}

// ---------------------------------------------------------------------------

NoiseRealization::NoiseRealization(NoiseMode mode, std::vector<FourierSeries> series)
    : mode_(mode), series_(std::move(series)) {
    for (const auto& s : series_) validate_series(s);
}

NoiseRealization NoiseRealization::isotropic(std::array<FourierSeries, 3> components) {
    return NoiseRealization(NoiseMode::isotropic3,
                            std::vector<FourierSeries>(components.begin(), components.end()));
}

NoiseRealization NoiseRealization::z_only(FourierSeries bz) {
    return NoiseRealization(NoiseMode::z_only, std::vector<FourierSeries>{std::move(bz)});
}

bool NoiseRealization::periodic() const noexcept {
    for (const auto& s : series_) {
        if (!s.periodic()) return false;
    }
    return true;
}

Vec3 NoiseRealization::adapted(double phi, double theta0) const {
    if (mode_ == NoiseMode::z_only) {
        const double bz = series_[0].value(phi);
        return {-std::sin(theta0) * bz, 0.0, std::cos(theta0) * bz};
    }
    return {series_[0].value(phi), series_[1].value(phi), series_[2].value(phi)};
}

Vec3 NoiseRealization::adapted_derivative(double phi, double theta0) const {
    if (mode_ == NoiseMode::z_only) {
        const double dbz = series_[0].derivative(phi);
        return {-std::sin(theta0) * dbz, 0.0, std::cos(theta0) * dbz};
    }
    return {series_[0].derivative(phi), series_[1].derivative(phi), series_[2].derivative(phi)};
}

double NoiseRealization::bz(double phi) const {
    if (mode_ != NoiseMode::z_only) throw DomainError("NoiseRealization::bz: not a z-only realization");
    return series_[0].value(phi);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) noexcept {
    // splitmix64 finalizer over (seed, index)
    std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

NoiseRealization sample_noise(const NoiseStatistics& stats) {
    stats.validate();
    std::mt19937_64 rng(stats.seed);
    const int n_terms = stats.k_max + (stats.periodic ? 0 : 1);
    const double scale = stats.sigma / std::sqrt(static_cast<double>(n_terms));
    if (stats.mode == NoiseMode::z_only) {
        return NoiseRealization::z_only(draw_series(rng, stats.k_max, scale, stats.periodic));
    }
    std::array<FourierSeries, 3> c;
    for (auto& s : c) s = draw_series(rng, stats.k_max, scale, stats.periodic);
    return NoiseRealization::isotropic(std::move(c));
}

// ---------------------------------------------------------------------------
// JSON

std::string to_json(const NoiseRealization& n) {
    nlohmann::json j;
    j["schema"] = "geophase.noise/1";
    j["mode"] = to_string(n.mode());
    auto& comps = j["components"] = nlohmann::json::array();
    for (const auto& s : n.series()) {
        comps.push_back({{"cos", s.cos_coeff},
                         {"sin", s.sin_coeff},
                         {"extra", {{"frequency", s.extra_frequency}, {"cos", s.extra_cos}, {"sin", s.extra_sin}}}});
    }
    return j.dump(2);
}

NoiseRealization noise_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("noise_from_json: ") + e.what());
    }
    if (j.value("schema", "") != "geophase.noise/1") {
        throw DomainError("noise_from_json: unsupported schema");
    }
    try {
        std::vector<FourierSeries> series;
        for (const auto& c : j.at("components")) {
            FourierSeries s;
            s.cos_coeff = c.at("cos").get<std::vector<double>>();
            s.sin_coeff = c.at("sin").get<std::vector<double>>();
            const auto& e = c.at("extra");
            s.extra_frequency = e.at("frequency").get<double>();
            s.extra_cos = e.at("cos").get<double>();
            s.extra_sin = e.at("sin").get<double>();
            series.push_back(std::move(s));
        }
        const NoiseMode mode = noise_mode_from_string(j.at("mode").get<std::string>());
        if (mode == NoiseMode::z_only) {
            if (series.size() != 1) throw DomainError("noise_from_json: z_only needs one component");
            return NoiseRealization::z_only(std::move(series[0]));
        }
        if (series.size() != 3) throw DomainError("noise_from_json: isotropic3 needs three components");
        return NoiseRealization::isotropic({std::move(series[0]), std::move(series[1]), std::move(series[2])});
    } catch (const nlohmann::json::exception& e) {
        throw DomainError(std::string("noise_from_json: ") + e.what());
    }
}

// ---------------------------------------------------------------------------
// Fields

std::vector<double> azimuth_grid(std::size_t n_intervals, int n_turns) {
    if (n_intervals < 1 || n_turns < 1) throw DomainError("azimuth_grid: need n_intervals, n_turns >= 1");
    std::vector<double> g(n_intervals + 1);
    const double span = kTwoPi * n_turns;
    for (std::size_t k = 0; k <= n_intervals; ++k) {
        g[k] = span * static_cast<double>(k) / static_cast<double>(n_intervals);
    }
    return g;
}

FieldSamples field_from_components(double theta0, double epsilon, const AdaptedComponents& b,
                                   std::span<const double> grid) {
    adapted_frame(theta0, 0.0);  // pole check
    if (!(epsilon >= 0.0)) throw DomainError("field_from_noise: epsilon must be >= 0");
    FieldSamples out;
    out.azimuth.assign(grid.begin(), grid.end());
    out.precession.reserve(grid.size());
    out.field.reserve(grid.size());
    for (double phi : grid) {
        const Vec3 bt = b(phi);
        const double shift = azimuth_offset(theta0, epsilon, bt, Vec3::Zero()).value;
        const double s = phi - shift;
        out.precession.push_back(s);
        out.field.push_back(total_field(theta0, epsilon, s, bt));
    }
    return out;
}

FieldSamples field_from_noise(double theta0, double epsilon, const NoiseRealization& n,
                              std::span<const double> grid) {
    return field_from_components(
        theta0, epsilon, [&](double phi) { return n.adapted(phi, theta0); }, grid);
}

double azimuth_at_precession(double theta0, double epsilon, const NoiseRealization& n, double precession) {
    double phi = precession;
    for (int it = 0; it < kMaxNewtonIterations; ++it) {
        const auto off = azimuth_offset(theta0, epsilon, n.adapted(phi, theta0), n.adapted_derivative(phi, theta0));
        const double f = phi - off.value - precession;
        const double df = 1.0 - off.derivative;
        if (!(df > 0.0)) {
            throw ParametrizationError("azimuth_at_precession: azimuth of the noisy field is not monotone");
        }
        const double step = f / df;
        phi -= step;
        if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(phi))) return phi;
    }
    throw NumericalError("azimuth_at_precession: Newton iteration did not converge");
}

TimeSeries noise_in_time(double theta0, double epsilon, const NoiseRealization& n, double omega,
                         std::size_t n_intervals, int n_turns) {
    if (!(omega > 0.0)) throw DomainError("noise_in_time: omega must be > 0");
    if (n_intervals < 1 || n_turns < 1) throw DomainError("noise_in_time: need n_intervals, n_turns >= 1");
    adapted_frame(theta0, 0.0);
    const double period = kTwoPi * n_turns / omega;
    TimeSeries ts;
    ts.omega = omega;
    ts.t.reserve(n_intervals + 1);
    ts.b.reserve(n_intervals + 1);
    ts.b2_dot.reserve(n_intervals + 1);
    for (std::size_t k = 0; k <= n_intervals; ++k) {
        const double t = period * static_cast<double>(k) / static_cast<double>(n_intervals);
        const double phi = azimuth_at_precession(theta0, epsilon, n, omega * t);
        const Vec3 b = n.adapted(phi, theta0);
        const Vec3 db = n.adapted_derivative(phi, theta0);
        const auto off = azimuth_offset(theta0, epsilon, b, db);
        const double phi_dot = omega / (1.0 - off.derivative);
        ts.t.push_back(t);
        ts.b.push_back(b);
        ts.b2_dot.push_back(db.y() * phi_dot);
    }
    return ts;
}

Vec3 field_at_time(double theta0, double epsilon, const NoiseRealization& n, double omega, double t) {
    const double s = omega * t;
    const double phi = azimuth_at_precession(theta0, epsilon, n, s);
    return total_field(theta0, epsilon, s, n.adapted(phi, theta0));
}

}  // namespace geophase

#include "generators.hpp"

#include "geophase/ensemble.hpp"
#include "geophase/errors.hpp"
#include "geophase/noise.hpp"

#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

using namespace geophase;
using geophase::testing::for_all;
using geophase::testing::Gen;

TEST_CASE("noise statistics validation") {
    NoiseStatistics s;
    CHECK_NOTHROW(s.validate());
    s.sigma = 0.0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    s.sigma = 1.0;
    s.k_max = 0;
    CHECK_THROWS_AS(s.validate(), DomainError);
    CHECK_THROWS_AS(sample_noise(s), DomainError);

    CHECK(noise_mode_from_string("isotropic3") == NoiseMode::isotropic3);
    CHECK(noise_mode_from_string("z_only") == NoiseMode::z_only);
    CHECK(std::string(to_string(NoiseMode::z_only)) == "z_only");
    CHECK_THROWS_AS(noise_mode_from_string("pink"), DomainError);
}

TEST_CASE("same seed gives identical realizations") {
    for_all(50, 21, [](Gen& g) {
        const auto stats = g.noise_stats(g.integer(0, 1) ? NoiseMode::z_only : NoiseMode::isotropic3);
        const auto a = sample_noise(stats);
        const auto b = sample_noise(stats);
        REQUIRE(a.series().size() == b.series().size());
        for (std::size_t i = 0; i < a.series().size(); ++i) {
            CHECK(a.series()[i].cos_coeff == b.series()[i].cos_coeff);
            CHECK(a.series()[i].sin_coeff == b.series()[i].sin_coeff);
        }
        auto other = stats;
        other.seed ^= 1;
        CHECK(sample_noise(other).series()[0].cos_coeff != a.series()[0].cos_coeff);
    });
    std::set<std::uint64_t> seeds;
    for (std::uint64_t i = 0; i < 1000; ++i) seeds.insert(derive_seed(42, i));
    CHECK(seeds.size() == 1000);
}

TEST_CASE("Fourier series evaluation") {
    FourierSeries f{{1.0, 0.0}, {0.0, 2.0}};
    CHECK(f.value(0.3) == doctest::Approx(std::cos(0.3) + 2.0 * std::sin(0.6)));
    CHECK(f.derivative(0.3) == doctest::Approx(-std::sin(0.3) + 4.0 * std::cos(0.6)));
    CHECK(f.periodic());

    for_all(50, 22, [](Gen& g) {
        auto stats = g.noise_stats();
        stats.periodic = g.integer(0, 1) == 1;
        const auto n = sample_noise(stats);
        const double phi = g.uniform(0.0, 20.0);
        const double h = 1e-5;
        for (const auto& s : n.series()) {
            CHECK(s.derivative(phi) == doctest::Approx((s.value(phi + h) - s.value(phi - h)) / (2 * h)).epsilon(1e-6));
            CHECK(s.periodic() == stats.periodic);
            if (stats.periodic) CHECK(std::abs(s.value(phi + kTwoPi) - s.value(phi)) < 1e-12);
        }
        CHECK(n.periodic() == stats.periodic);
    });
}

TEST_CASE("isotropic ensemble: zero mean and unit-normalized variance at every azimuth") {
    NoiseStatistics s;
    s.sigma = 1.0;
    s.k_max = 4;
    s.seed = 2024;
    const double th = 0.9;
    const int n_grid = 32;
    const std::size_t n = 100000;
    std::vector<Vec3> mean(n_grid, Vec3::Zero());
    std::vector<Vec3> square(n_grid, Vec3::Zero());
    std::vector<double> cross13(n_grid, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        auto si = s;
        si.seed = derive_seed(s.seed, i);
        const auto r = sample_noise(si);
        for (int k = 0; k < n_grid; ++k) {
            const Vec3 b = r.adapted(kTwoPi * k / n_grid, th);
            mean[k] += b;
            square[k] += b.cwiseProduct(b);
            cross13[k] += b.x() * b.z();
        }
    }
    for (int k = 0; k < n_grid; ++k) {
        CAPTURE(k);
        const Vec3 m = mean[k] / static_cast<double>(n);
        CHECK(std::abs(m.x()) < 0.01);
        CHECK(std::abs(m.y()) < 0.01);
        CHECK(std::abs(m.z()) < 0.01);
        const Vec3 v = square[k] / static_cast<double>(n);
        CHECK(v.x() == doctest::Approx(1.0).epsilon(0.02));
        CHECK(v.y() == doctest::Approx(1.0).epsilon(0.02));
        CHECK(std::abs(cross13[k] / n) < 0.02);
    }
}

TEST_CASE("z-only ensemble moments in the adapted frame") {
    const double th = 0.7;
    NoiseStatistics s;
    s.mode = NoiseMode::z_only;
    s.sigma = 1.0;
    s.k_max = 3;
    s.seed = 77;
    std::vector<double> transverse, cross, bz2;
    for (std::size_t i = 0; i < 20000; ++i) {
        auto si = s;
        si.seed = derive_seed(s.seed, i);
        const auto r = sample_noise(si);
        const double phi = 1.3;
        const Vec3 b = r.adapted(phi, th);
        // exact per realization: only the cartesian z component is present
        CHECK(b.y() == 0.0);
        CHECK(b.x() == doctest::Approx(-std::sin(th) * r.bz(phi)));
        CHECK(b.z() == doctest::Approx(std::cos(th) * r.bz(phi)));
        transverse.push_back(b.x() * b.x() + b.y() * b.y());
        cross.push_back(b.x() * b.z());
    }
    const auto t = summarize(transverse);
    const auto c = summarize(cross);
    CHECK(std::abs(t.mean - std::sin(th) * std::sin(th)) < 4 * t.std_error);
    CHECK(std::abs(c.mean + std::sin(th) * std::cos(th)) < 4 * c.std_error);

    const auto iso = sample_noise(NoiseStatistics{});
    CHECK_THROWS_AS(iso.bz(0.0), DomainError);
}

TEST_CASE("aperiodic realizations do not close") {
    NoiseStatistics s;
    s.periodic = false;
    s.k_max = 4;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        s.seed = seed;
        const auto n = sample_noise(s);
        CHECK_FALSE(n.periodic());
        CHECK((n.adapted(0.0, 1.0) - n.adapted(kTwoPi, 1.0)).norm() > 1e-6);
        const auto& series = n.series()[0];
        CHECK(series.extra_frequency == doctest::Approx(4.0 * (std::sqrt(5.0) - 1.0) / 2.0));
    }
}

TEST_CASE("noise JSON round trip") {
    for_all(30, 23, [](Gen& g) {
        auto stats = g.noise_stats(g.integer(0, 1) ? NoiseMode::z_only : NoiseMode::isotropic3);
        stats.periodic = g.integer(0, 1) == 1;
        const auto n = sample_noise(stats);
        const auto back = noise_from_json(to_json(n));
        CHECK(back.mode() == n.mode());
        for (int k = 0; k < 5; ++k) {
            const double phi = g.uniform(0.0, 10.0);
            CHECK((back.adapted(phi, 1.0) - n.adapted(phi, 1.0)).norm() == 0.0);
        }
    });
    CHECK_THROWS_AS(noise_from_json("{}"), DomainError);
    CHECK_THROWS_AS(noise_from_json("not json"), DomainError);
    CHECK_THROWS_AS(noise_from_json(R"({"schema":"other/1"})"), DomainError);
}

TEST_CASE("field construction") {
    const double th = 1.0;
    const auto grid = azimuth_grid(64);
    CHECK(grid.size() == 65);
    CHECK(grid.back() == doctest::Approx(kTwoPi));
    CHECK_THROWS_AS(azimuth_grid(0), DomainError);

    SUBCASE("zero noise is the precession circle") {
        const auto fs = field_from_noise(th, 0.0, sample_noise(NoiseStatistics{}), grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            CHECK((fs.field[k] - adapted_frame(th, grid[k]).e3).norm() < 1e-15);
            CHECK(fs.precession[k] == doctest::Approx(grid[k]));
        }
    }
    SUBCASE("constant e1 pattern tilts the field by eps along e1") {
        const double eps = 0.05;
        const auto fs = field_from_components(th, eps, [](double) { return Vec3(1, 0, 0); }, grid);
        for (std::size_t k = 0; k < grid.size(); ++k) {
            const auto f = adapted_frame(th, grid[k]);
            CHECK((fs.field[k] - (f.e3 + eps * f.e1)).norm() < 1e-14);
        }
    }
    CHECK_THROWS_AS(field_from_noise(th, -0.1, sample_noise(NoiseStatistics{}), grid), DomainError);
}

TEST_CASE("field sits at the grid azimuth with the requested adapted components") {
    for_all(40, 24, [](Gen& g) {
        const double th = g.uniform(0.4, 2.7);
        const double eps = g.uniform(0.0, 0.08);
        const auto n = sample_noise(g.noise_stats());
        const auto grid = azimuth_grid(128);
        const auto fs = field_from_noise(th, eps, n, grid);
        for (std::size_t k = 0; k < grid.size(); k += 7) {
            const Vec3& b = fs.field[k];
            double dphi = std::atan2(b.y(), b.x()) - grid[k];
            dphi = std::remainder(dphi, kTwoPi);
            CHECK(std::abs(dphi) < 1e-12);
            const auto f = adapted_frame(th, fs.precession[k]);
            const Vec3 bt = n.adapted(grid[k], th);
            CHECK((b - f.e3 - eps * (bt.x() * f.e1 + bt.y() * f.e2 + bt.z() * f.e3)).norm() < 1e-12);
            CHECK(azimuth_at_precession(th, eps, n, fs.precession[k]) == doctest::Approx(grid[k]).epsilon(1e-10));
        }
    });
}

TEST_CASE("time-domain view agrees with the azimuth view") {
    const double th = 0.8;
    const double eps = 0.05;
    const double omega = 2.5;
    NoiseStatistics s;
    s.k_max = 2;
    s.seed = 9;
    const auto n = sample_noise(s);
    const auto ts = noise_in_time(th, eps, n, omega, 256);
    REQUIRE(ts.t.size() == 257);
    CHECK(ts.t.back() == doctest::Approx(kTwoPi / omega));
    for (std::size_t k = 1; k + 1 < ts.t.size(); k += 17) {
        const double h = ts.t[k + 1] - ts.t[k - 1];
        CHECK(ts.b2_dot[k] == doctest::Approx((ts.b[k + 1].y() - ts.b[k - 1].y()) / h).epsilon(2e-3));
        // the total field at time t has its noise components in the frame of B_0(t)
        const auto f = adapted_frame(th, omega * ts.t[k]);
        const Vec3 b = field_at_time(th, eps, n, omega, ts.t[k]);
        const Vec3 comp(f.e1.dot(b - f.e3), f.e2.dot(b - f.e3), f.e3.dot(b - f.e3));
        CHECK((comp / eps - ts.b[k]).norm() < 1e-10);
    }
    CHECK_THROWS_AS(noise_in_time(th, eps, n, 0.0, 64), DomainError);
}

#include "geophase_cli/runner.hpp"

#include "geophase/classical_phase.hpp"
#include "geophase/ensemble.hpp"
#include "geophase/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace geophase::cli {

AveragingDiagnostic diagnose_averaging_conventions(const AveragingInputs& in) {
    adapted_frame(in.theta0, 0.0);
    if (in.n_realizations < 2) throw DomainError("diagnose_averaging_conventions: need at least 2 realizations");
    if (in.n_grid < 8) throw DomainError("diagnose_averaging_conventions: n_grid must be >= 8");
    NoiseStatistics stats;
    stats.sigma = in.sigma;
    stats.k_max = in.k_max;
    stats.mode = noise_mode_from_string(in.mode);
    stats.seed = in.seed;
    stats.validate();

    struct Member {
        double mean_cos{0.0};
        double mean_theta{0.0};
    };
    const std::size_t g = in.n_grid;
    const auto members = parallel_map<Member>(in.n_realizations, in.workers, [&](std::size_t i) {
        NoiseStatistics s = stats;
        s.seed = derive_seed(stats.seed, i);
        const auto noise = sample_noise(s);
        Member m;
        for (std::size_t k = 0; k < g; ++k) {
            const double phi = kTwoPi * static_cast<double>(k) / static_cast<double>(g);
            const double c = cos_theta_exact(in.theta0, in.epsilon, noise.adapted(phi, in.theta0));
            m.mean_cos += c;
            m.mean_theta += std::acos(std::clamp(c, -1.0, 1.0));
        }
        m.mean_cos /= static_cast<double>(g);
        m.mean_theta /= static_cast<double>(g);
        return m;
    });

    const std::size_t n = members.size();
    std::vector<double> cs(n), ts(n);
    for (std::size_t i = 0; i < n; ++i) {
        cs[i] = members[i].mean_cos;
        ts[i] = members[i].mean_theta;
    }
    const auto sc = summarize(cs);
    const auto st = summarize(ts);
    double cov = 0.0;
    for (std::size_t i = 0; i < n; ++i) cov += (cs[i] - sc.mean) * (ts[i] - st.mean);
    // covariance of the two sample means
    cov /= static_cast<double>(n - 1) * static_cast<double>(n);

    const double c0 = std::cos(in.theta0);
    AveragingDiagnostic d;
    d.n_realizations = n;
    // shift = phi_+ - phi_avg with phi = -pi (1 - x)
    d.delta_correct = kPi * (c0 - sc.mean);
    d.delta_correct_std_error = kPi * sc.std_error;
    d.delta_incorrect = kPi * (c0 - std::cos(st.mean));
    const double db_dt = kPi * std::sin(st.mean);  // d(delta_incorrect)/d(mean theta)
    d.delta_incorrect_std_error = db_dt * st.std_error;

    const double nan = std::numeric_limits<double>::quiet_NaN();
    if (d.delta_incorrect == 0.0) {
        d.ratio = d.ratio_std_error = d.p_ratio = d.p_ratio_std_error = nan;
        return d;
    }
    const double a = d.delta_correct;
    const double b = d.delta_incorrect;
    d.ratio = a / b;
    // delta method with da = -pi dc, db = pi sin(t) dt
    const double var_a = d.delta_correct_std_error * d.delta_correct_std_error;
    const double var_b = d.delta_incorrect_std_error * d.delta_incorrect_std_error;
    const double cov_ab = -kPi * db_dt * cov;
    const double rel = var_a / (a * a) + var_b / (b * b) - 2.0 * cov_ab / (a * b);
    d.ratio_std_error = std::abs(d.ratio) * std::sqrt(std::max(rel, 0.0));
    if (d.ratio > 0.0) {
        d.p_ratio = std::sqrt(d.ratio);
        d.p_ratio_std_error = 0.5 * d.ratio_std_error / d.p_ratio;
    } else {
        d.p_ratio = d.p_ratio_std_error = nan;
    }
    return d;
}

}  // namespace geophase::cli

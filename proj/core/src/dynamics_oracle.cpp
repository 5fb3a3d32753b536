#include "geophase/dynamics_oracle.hpp"

#include "geophase/errors.hpp"

#include <json.hpp>

#include <cmath>

namespace geophase {

namespace {

// Below this modulus the phase of the gauge component is not trustworthy.
constexpr double kGaugeFloor = 1e-6;

CVector rotating_phases(const Eigen::VectorXd& jz, double angle) {
    return (jz.cast<cplx>() * (-kI * angle)).array().exp();
}

}  // namespace

double HamiltonianPath::step(CVector& psi, double t_mid, double dt) const {
    Eigen::SelfAdjointEigenSolver<CMatrix> es(at(t_mid));
    const CVector c = es.eigenvectors().adjoint() * psi;
    const double e = (es.eigenvalues().array() * c.array().abs2()).sum();
    const CVector ph = (es.eigenvalues().cast<cplx>() * (-kI * dt)).array().exp();
    psi = es.eigenvectors() * (ph.array() * c.array()).matrix();
    return e;
}

FunctionPath::FunctionPath(Eigen::Index dim, std::function<CMatrix(double)> h) : dim_(dim), h_(std::move(h)) {
    if (dim_ < 1) throw DomainError("FunctionPath: dim must be >= 1");
    if (!h_) throw DomainError("FunctionPath: empty hamiltonian function");
}

PrecessingPath::PrecessingPath(const CMatrix& h0, Eigen::VectorXd jz, double omega)
    : jz_(std::move(jz)), omega_(omega), h0_(h0) {
    if (h0.rows() != h0.cols() || h0.rows() != jz_.size()) {
        throw DimensionMismatch("PrecessingPath: H0 and J_z dimensions differ");
    }
    if (hermiticity_defect(h0) > kHermitianTolerance * std::max(1.0, h0.norm())) {
        throw DomainError("PrecessingPath: H0 is not hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h0);
    energies_ = es.eigenvalues();
    vectors_ = es.eigenvectors();
}

CMatrix PrecessingPath::at(double t) const {
    const CVector u = rotating_phases(jz_, omega_ * t);
    return u.asDiagonal() * h0_ * u.conjugate().asDiagonal();
}

double PrecessingPath::step(CVector& psi, double t_mid, double dt) const {
    const CVector u = rotating_phases(jz_, omega_ * t_mid);
    const CVector c = vectors_.adjoint() * (u.conjugate().array() * psi.array()).matrix();
    const double e = (energies_.array() * c.array().abs2()).sum();
    const CVector ph = (energies_.cast<cplx>() * (-kI * dt)).array().exp();
    psi = u.asDiagonal() * (vectors_ * (ph.array() * c.array()).matrix());
    return e;
}

SpinHalfFieldPath::SpinHalfFieldPath(std::function<Vec3(double)> field, double coupling)
    : field_(std::move(field)), coupling_(coupling) {
    if (!field_) throw DomainError("SpinHalfFieldPath: empty field function");
}

CMatrix SpinHalfFieldPath::at(double t) const {
    const Vec3 b = coupling_ * field_(t);
    CMatrix h(2, 2);
    h << 0.5 * b.z(), 0.5 * cplx(b.x(), -b.y()), 0.5 * cplx(b.x(), b.y()), -0.5 * b.z();
    return h;
}

double SpinHalfFieldPath::step(CVector& psi, double t_mid, double dt) const {
    const Vec3 b = coupling_ * field_(t_mid);
    const double mag = b.norm();
    const cplx up = psi(0);
    const cplx dn = psi(1);
    // (n.sigma) psi
    const cplx sup = b.z() * up + cplx(b.x(), -b.y()) * dn;
    const cplx sdn = cplx(b.x(), b.y()) * up - b.z() * dn;
    const double e = 0.5 * (std::conj(up) * sup + std::conj(dn) * sdn).real();
    if (mag == 0.0) return e;
    const double c = std::cos(0.5 * mag * dt);
    const double s = std::sin(0.5 * mag * dt) / mag;
    psi(0) = c * up - kI * s * sup;
    psi(1) = c * dn - kI * s * sdn;
    return e;
}

Eigen::VectorXd composite_jz(const Operator& lz) {
    const CMatrix& m = lz.matrix();
    const double off = (m - CMatrix(m.diagonal().asDiagonal())).norm();
    if (off > kHermitianTolerance * std::max(1.0, m.norm()) || m.diagonal().imag().cwiseAbs().maxCoeff() > 1e-12) {
        throw DomainError("composite_jz: L_z is not real diagonal in this basis");
    }
    Eigen::VectorXd jz(2 * m.rows());
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        jz(2 * i) = m(i, i).real() + 0.5;
        jz(2 * i + 1) = m(i, i).real() - 0.5;
    }
    return jz;
}

double EvolutionConfig::period() const { return kTwoPi * n_turns / omega; }

void EvolutionConfig::validate() const {
    if (!path) throw DomainError("EvolutionConfig: no hamiltonian path");
    if (!(omega > 0.0) || !std::isfinite(omega)) throw DomainError("EvolutionConfig: omega must be > 0");
    if (n_turns < 1) throw DomainError("EvolutionConfig: n_turns must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw DomainError("EvolutionConfig: dt must be > 0");
    if (!(overlap_threshold >= 0.0 && overlap_threshold <= 1.0)) {
        throw DomainError("EvolutionConfig: overlap_threshold must lie in [0, 1]");
    }
    if (gauge_component && (*gauge_component < 0 || *gauge_component >= path->dim())) {
        throw DomainError("EvolutionConfig: gauge_component out of range");
    }
}

EvolutionResult evolve(const EvolutionConfig& config, const CVector& initial) {
    config.validate();
    if (initial.size() != config.path->dim()) throw DimensionMismatch("evolve: initial state dimension");
    if (std::abs(initial.norm() - 1.0) > 1e-12) throw DomainError("evolve: initial state is not normalized");

    const double period = config.period();
    const auto steps = static_cast<std::size_t>(std::ceil(period / config.dt - 1e-9));
    const double h = period / static_cast<double>(steps);

    EvolutionResult r;
    r.steps = steps;
    if (config.gauge_component) {
        r.gauge_component = *config.gauge_component;
    } else {
        initial.cwiseAbs().maxCoeff(&r.gauge_component);
    }
    const Eigen::Index j = r.gauge_component;
    if (std::abs(initial(j)) < kGaugeFloor) throw IntegratorFailure("evolve: gauge component vanishes initially");

    CVector psi = initial;
    cplx prev = psi(j);
    double energy_sum = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double t_mid = (static_cast<double>(k) + 0.5) * h;
        energy_sum += config.path->step(psi, t_mid, h);
        const double drift = std::abs(psi.norm() - 1.0);
        r.norm_drift = std::max(r.norm_drift, drift);
        if (!(drift <= kNormDriftLimit)) {
            throw IntegratorFailure("evolve: norm drift " + std::to_string(drift) + " after step " + std::to_string(k));
        }
        const cplx cur = psi(j);
        if (std::abs(cur) < kGaugeFloor) throw IntegratorFailure("evolve: gauge component vanished during the run");
        r.tracked_phase += std::arg(cur * std::conj(prev));
        prev = cur;
    }
    r.dynamical_phase = energy_sum * h;
    r.final_overlap = initial.dot(psi);
    r.final_state = std::move(psi);
    return r;
}

BerryPhaseResult berry_phase_numeric(const EvolutionConfig& config, const CVector& initial) {
    const auto ev = evolve(config, initial);
    BerryPhaseResult r;
    r.final_overlap = std::abs(ev.final_overlap);
    if (r.final_overlap < config.overlap_threshold) {
        throw AdiabaticityBroken("berry_phase_numeric: |<psi(0)|psi(T)>| = " + std::to_string(r.final_overlap) +
                                 " below " + std::to_string(config.overlap_threshold));
    }
    r.total_phase = std::arg(ev.final_overlap);
    r.dynamical_phase = ev.dynamical_phase;
    r.geometric_phase = ev.tracked_phase + ev.dynamical_phase;
    r.norm_drift = ev.norm_drift;
    r.adiabaticity = config.adiabaticity;
    r.steps = ev.steps;
    return r;
}

double wrap_phase(double phi) {
    double w = std::remainder(phi, kTwoPi);
    if (w <= -kPi) w += kTwoPi;
    return w;
}

std::string to_json(const EvolutionConfig& config, const BerryPhaseResult& result) {
    nlohmann::ordered_json j;
    j["config"] = {{"omega", config.omega},
                   {"n_turns", config.n_turns},
                   {"dt", config.dt},
                   {"steps", result.steps},
                   {"adiabaticity", config.adiabaticity},
                   {"overlap_threshold", config.overlap_threshold}};
    j["total_phase"] = result.total_phase;
    j["dynamical_phase"] = result.dynamical_phase;
    j["geometric_phase"] = result.geometric_phase;
    j["final_overlap"] = result.final_overlap;
    j["norm_drift"] = result.norm_drift;
    return j.dump(2);
}

}  // namespace geophase

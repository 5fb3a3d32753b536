#include "geophase/quantum_phase.hpp"

#include "geophase/errors.hpp"

#include <cmath>
#include <string>
#include <vector>

namespace geophase {

namespace {

constexpr double kDegenerateEigenvalue = 1e-9;
constexpr double kDegenerateSchmidt = 1e-12;
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

double classical_phase(double theta0) { return -kPi * (1.0 - std::cos(theta0)); }

}  // namespace

CompositeState::CompositeState(CVector amplitudes) : amp_(std::move(amplitudes)) {
    if (amp_.size() == 0 || amp_.size() % 2 != 0) {
        throw DimensionMismatch("CompositeState: size must be 2 * d_particle, got " + std::to_string(amp_.size()));
    }
    if (!amp_.allFinite()) throw DomainError("CompositeState: non-finite amplitudes");
    if (std::abs(amp_.norm() - 1.0) > kNormTolerance) {
        throw DomainError("CompositeState: state is not normalized");
    }
}

CompositeState CompositeState::product(const CVector& particle, const CVector& spin) {
    if (spin.size() != 2) throw DimensionMismatch("CompositeState::product: spin vector must have size 2");
    return CompositeState(tensor(particle, spin));
}

CMatrix CompositeState::coefficients() const {
    const Eigen::Index d = particle_dim();
    CMatrix c(d, 2);
    for (Eigen::Index i = 0; i < d; ++i) {
        c(i, 0) = amp_(2 * i);
        c(i, 1) = amp_(2 * i + 1);
    }
    return c;
}

CVector spin_up(const Direction& n) {
    CVector v(2);
    v << std::cos(0.5 * n.theta), std::polar(std::sin(0.5 * n.theta), n.phi);
    return v;
}

CVector spin_down(const Direction& n) {
    CVector v(2);
    v << -std::polar(std::sin(0.5 * n.theta), -n.phi), std::cos(0.5 * n.theta);
    return v;
}

Operator build_hamiltonian(const Operator& h_a, const OperatorTriple& a, double lambda) {
    const auto s = pauli();
    Operator h = tensor(h_a, Operator::identity(2));
    for (int i = 0; i < 3; ++i) {
        if (a[i].dim() != h_a.dim()) throw DimensionMismatch("build_hamiltonian: A and H_A dimensions differ");
        h = h + (0.5 * lambda) * tensor(a[i], s[i]);
    }
    return h;
}

Operator build_hamiltonian(const VectorOperatorSystem& sys, double lambda) {
    return build_hamiltonian(sys.h_a(), sys.a(), lambda);
}

CompositeState reference_state(const VectorOperatorSystem& sys) {
    return CompositeState::product(sys.reference(), spin_up(sys.n_hat()));
}

TrackedEigenstate tracked_eigenstate(const Operator& h, const CompositeState& reference) {
    if (h.dim() != reference.amplitudes().size()) {
        throw DimensionMismatch("tracked_eigenstate: hamiltonian and state dimensions differ");
    }
    if (hermiticity_defect(h.matrix()) > kHermitianTolerance * std::max(1.0, h.matrix().norm())) {
        throw DomainError("tracked_eigenstate: hamiltonian is not hermitian");
    }
    Eigen::SelfAdjointEigenSolver<CMatrix> es(h.matrix());
    const auto& ev = es.eigenvalues();
    const CMatrix& vecs = es.eigenvectors();
    const Eigen::Index n = ev.size();
    const double tol = kDegenerateEigenvalue * std::max(1.0, ev.cwiseAbs().maxCoeff());

    // clusters of (numerically) equal eigenvalues; eigenvalues come sorted
    std::vector<std::pair<Eigen::Index, Eigen::Index>> clusters;
    for (Eigen::Index k = 0; k < n;) {
        Eigen::Index e = k + 1;
        while (e < n && ev(e) - ev(e - 1) <= tol) ++e;
        clusters.emplace_back(k, e);
        k = e;
    }

    const CVector& ref = reference.amplitudes();
    double best = -1.0;
    std::size_t best_c = 0;
    CVector best_proj;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        const auto [b, e] = clusters[c];
        const auto block = vecs.middleCols(b, e - b);
        CVector proj = block * (block.adjoint() * ref);
        const double w = proj.norm();
        if (w > best) {
            best = w;
            best_c = c;
            best_proj = std::move(proj);
        }
    }
    if (best < kInvSqrt2) {
        throw TrackingAmbiguity("tracked_eigenstate: largest overlap with the reference is " + std::to_string(best) +
                                " < 1/sqrt(2)");
    }

    TrackedEigenstate out;
    const auto [b, e] = clusters[best_c];
    // the normalized projection already has <ref|state> = |P ref| > 0
    out.state = CompositeState(best_proj / best);
    out.overlap = best;
    out.multiplicity = e - b;
    out.energy = ev.segment(b, e - b).mean();
    out.gap = std::numeric_limits<double>::infinity();
    if (b > 0) out.gap = std::min(out.gap, ev(b) - ev(b - 1));
    if (e < n) out.gap = std::min(out.gap, ev(e) - ev(e - 1));
    return out;
}

CompositeState SchmidtResult::reconstruct() const {
    CVector v = std::sqrt(p_plus) * tensor(e_plus, spin_plus);
    if (p_minus > 0.0) v += std::sqrt(p_minus) * tensor(e_minus, spin_minus);
    return CompositeState(v);
}

SchmidtResult schmidt(const CompositeState& state, const Direction& n_hat) {
    const CMatrix c = state.coefficients();
    const Eigen::Index d = c.rows();
    Eigen::JacobiSVD<CMatrix> svd(c, Eigen::ComputeThinU | Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const CVector up = spin_up(n_hat);

    SchmidtResult r;
    const double p0 = sv(0) * sv(0);
    const double p1 = sv.size() > 1 ? sv(1) * sv(1) : 0.0;
    if (std::abs(p0 - p1) < kDegenerateSchmidt) {
        r.degenerate = true;
        r.spin_plus = up;
        r.spin_minus = spin_down(n_hat);
        r.p_plus = r.p_minus = 0.5 * (p0 + p1);
        r.e_plus = c * r.spin_plus.conjugate() / std::sqrt(r.p_plus);
        r.e_minus = c * r.spin_minus.conjugate() / std::sqrt(r.p_minus);
        return r;
    }

    CVector e0 = svd.matrixU().col(0);
    CVector e1 = sv.size() > 1 ? CVector(svd.matrixU().col(1)) : CVector(CVector::Zero(d));
    CVector s0 = svd.matrixV().col(0).conjugate();
    CVector s1 = svd.matrixV().col(1).conjugate();
    double q0 = p0;
    double q1 = p1;
    if (std::abs(up.dot(s1)) > std::abs(up.dot(s0))) {
        std::swap(e0, e1);
        std::swap(s0, s1);
        std::swap(q0, q1);
    }
    r.p_plus = q0;
    r.p_minus = q1;
    r.e_plus = std::move(e0);
    r.e_minus = std::move(e1);
    r.spin_plus = std::move(s0);
    r.spin_minus = std::move(s1);
    return r;
}

PhaseReport spin_phase_from_schmidt(double p_minus, double theta0) {
    if (!(p_minus >= 0.0 && p_minus <= 1.0)) {
        throw DomainError("spin_phase_from_schmidt: p_minus must lie in [0, 1]");
    }
    PhaseReport r;
    r.method = PhaseMethod::exact;
    r.p_minus = p_minus;
    r.phi_classical = classical_phase(theta0);
    r.phi_correction = -kTwoPi * std::cos(theta0) * p_minus;
    r.phi_total = r.phi_classical + r.phi_correction;
    r.phi_commutator_free = r.phi_total;
    return r;
}

PerturbativeSpinFlip p_minus_perturbative(const VectorOperatorSystem& sys, std::optional<double> r0) {
    const double rho = sys.rho();
    if (!(rho > VectorOperatorSystem::kTolerance)) {
        throw DegenerateDrivingField("p_minus_perturbative: <A> vanishes in the reference state");
    }
    const auto basis = transverse_basis(sys.n_hat().cartesian());
    const Operator a1 = dot(basis.e1, sys.a());
    const Operator a2 = dot(basis.e2, sys.a());
    const CVector& ref = sys.reference();
    const double fluct = (expectation(a1 * a1, ref) + expectation(a2 * a2, ref)).real();
    const double comm = (kI * expectation(commutator(a1, a2), ref)).real();

    PerturbativeSpinFlip out;
    out.p_minus = (fluct + comm) / (4.0 * rho * rho);
    out.regime_valid = out.p_minus < 1.0 - kRegimeSlack;
    const double scale = r0 ? *r0 : std::sqrt(std::max(fluct, 0.0) / 2.0);
    if (r0 && !(*r0 > 0.0)) throw DomainError("p_minus_perturbative: r0 must be > 0");
    out.breakdown.r0 = scale;
    out.breakdown.epsilon = scale / rho;
    if (scale > 0.0) {
        out.breakdown.fluctuation = fluct / (scale * scale);
        out.breakdown.commutator = comm / (scale * scale);
    }
    return out;
}

PhaseReport spin_phase_perturbative(const VectorOperatorSystem& sys, std::optional<double> r0) {
    const auto flip = p_minus_perturbative(sys, r0);
    const double theta0 = sys.n_hat().theta;
    PhaseReport r;
    r.method = PhaseMethod::perturbative;
    r.p_minus = flip.p_minus;
    r.breakdown = flip.breakdown;
    r.regime_valid = flip.regime_valid;
    r.phi_classical = classical_phase(theta0);
    r.phi_correction = -kTwoPi * std::cos(theta0) * flip.p_minus;
    r.phi_total = r.phi_classical + r.phi_correction;
    const double eps = flip.breakdown.epsilon;
    r.phi_commutator_free =
        r.phi_classical - 0.5 * eps * eps * kPi * std::cos(theta0) * flip.breakdown.fluctuation;
    return r;
}

double effective_polar_angle(double phi_total) {
    const double c = 1.0 + phi_total / kPi;
    if (!(c >= -1.0 && c <= 1.0)) throw DomainError("effective_polar_angle: phase outside [-2 pi, 0]");
    return std::acos(c);
}

LmResult exact_lm_scenario(const LmScenario& s) {
    angular_momentum(s.l);  // validates l
    angular_momentum_state(s.l, s.m);
    LmResult r;
    const double l = s.l;
    const double m = s.m;
    const double lam = s.lambda;
    if (std::abs(l - m) < 1e-12) {
        r.p_minus_exact = 0.0;
        r.energy = s.e_m + 0.5 * lam * m;
    } else {
        const double c = std::sqrt(l * (l + 1.0) - m * (m + 1.0));
        Eigen::Matrix2d h;
        h << s.e_m + 0.5 * lam * m, 0.5 * lam * c, 0.5 * lam * c, s.e_m1 - 0.5 * lam * (m + 1.0);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(h);
        const auto& v = es.eigenvectors();
        const int k = std::abs(v(0, 0)) >= std::abs(v(0, 1)) ? 0 : 1;
        if (std::abs(v(0, k)) < kInvSqrt2 - 1e-12) {
            throw TrackingAmbiguity("exact_lm_scenario: no eigenvector dominated by |l, m, +>");
        }
        r.p_minus_exact = v(1, k) * v(1, k);
        r.energy = es.eigenvalues()(k);
    }
    const double cos0 = std::cos(s.theta0);
    r.phi_exact = classical_phase(s.theta0) - kTwoPi * cos0 * r.p_minus_exact;
    if (m == 0.0) {
        r.p_minus_pert = std::numeric_limits<double>::quiet_NaN();
        r.phi_pert = std::numeric_limits<double>::quiet_NaN();
        r.regime_valid = false;
    } else {
        r.p_minus_pert = (l * (l + 1.0) - m * (m + 1.0)) / (4.0 * m * m);
        r.phi_pert = classical_phase(s.theta0) - kTwoPi * cos0 * r.p_minus_pert;
        r.regime_valid = r.p_minus_pert < 1.0 - kRegimeSlack;
    }
    return r;
}

double total_system_phase(double mu, double theta0) { return -(2.0 * mu + 1.0) * kPi * (1.0 - std::cos(theta0)); }

VectorOperatorSystem two_spin_system(const Direction& n_hat, double field) {
    const auto s = pauli();
    const OperatorTriple half{0.5 * s[0], 0.5 * s[1], 0.5 * s[2]};
    return VectorOperatorSystem(field * dot(n_hat.cartesian(), half), half, half, spin_up(n_hat), n_hat);
}

VectorOperatorSystem angular_momentum_system(double l, double m, const Direction& n_hat, double field) {
    const auto lop = angular_momentum(l);
    const CVector ref = rotation_to(lop, n_hat).matrix() * angular_momentum_state(l, m);
    return VectorOperatorSystem(field * dot(n_hat.cartesian(), lop), lop, lop, ref, n_hat);
}

VectorOperatorSystem sho_system(int n_max, double epsilon, const Direction& n_hat, double rho, double omega_a) {
    const auto modes = sho_quadratures(n_max);
    const Vec3 n = n_hat.cartesian();
    const Operator id = Operator::identity(modes.number.dim());
    OperatorTriple a;
    for (int i = 0; i < 3; ++i) a[i] = (rho * n(i)) * id + epsilon * modes.b[i];
    return VectorOperatorSystem(omega_a * modes.number, modes.l, a, modes.ground, n_hat);
}

}  // namespace geophase

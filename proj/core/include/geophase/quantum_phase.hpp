// quantum_phase.hpp: spin-1/2 coupled to a quantum vector operator.
//
// H = H_A (x) 1 + (lambda / 2) sum_i A_i (x) sigma_i. The spin's geometric
// phase over one turn of n_hat is the Schmidt-weighted average
//   phi_spin = -pi (1 - cos theta0) - 2 pi cos(theta0) p_minus.

#pragma once

#include "geophase/classical_phase.hpp"
#include "geophase/operator_algebra.hpp"

#include <limits>
#include <optional>

namespace geophase {

// Amplitudes on H_particle (x) C^2, index i * 2 + s.
class CompositeState {
public:
    static constexpr double kNormTolerance = 1e-12;

    CompositeState() = default;
    // Throws DimensionMismatch for odd sizes and DomainError if not normalized.
    explicit CompositeState(CVector amplitudes);
    static CompositeState product(const CVector& particle, const CVector& spin);

    const CVector& amplitudes() const noexcept { return amp_; }
    Eigen::Index particle_dim() const noexcept { return amp_.size() / 2; }
    // d x 2 coefficient matrix C with psi = sum C(i, s) |i>|s>.
    CMatrix coefficients() const;

private:
    CVector amp_;
};

// |n+> and |n-> along n; |n+> = (cos(theta/2), e^{i phi} sin(theta/2)).
CVector spin_up(const Direction& n);
CVector spin_down(const Direction& n);

Operator build_hamiltonian(const Operator& h_a, const OperatorTriple& a, double lambda);
Operator build_hamiltonian(const VectorOperatorSystem& sys, double lambda);

// Reference |n, m> (x) |n+> of a system.
CompositeState reference_state(const VectorOperatorSystem& sys);

struct TrackedEigenstate {
    CompositeState state;
    double energy{0.0};
    double overlap{0.0};        // |<reference|state>| before normalization
    Eigen::Index multiplicity{1};
    double gap{0.0};            // distance to the nearest other level
};

// Eigenvector of H continuously connected to the reference: the reference is
// projected onto every eigenspace (degenerate eigenvalues grouped) and the
// largest projection is kept, phased so that <reference|state> > 0.
// Throws TrackingAmbiguity when no projection exceeds 1/sqrt(2).
TrackedEigenstate tracked_eigenstate(const Operator& h, const CompositeState& reference);

struct SchmidtResult {
    double p_plus{1.0};
    double p_minus{0.0};
    CVector e_plus;
    CVector e_minus;
    CVector spin_plus;
    CVector spin_minus;
    bool degenerate{false};  // p_plus == p_minus; spin vectors fixed to |n+-> then

    CompositeState reconstruct() const;
};

// Ordering: spin_plus is the Schmidt spin vector with the larger overlap with |n+>.
SchmidtResult schmidt(const CompositeState& state, const Direction& n_hat);

struct PhaseBreakdown {
    // in units where A = rho n_hat + r0 b: <b1^2 + b2^2> and i<[b1, b2]>
    double fluctuation{0.0};
    double commutator{0.0};
    double r0{0.0};
    double epsilon{0.0};  // r0 / rho
};

struct PhaseReport {
    double phi_classical{0.0};
    double phi_correction{0.0};
    double phi_total{0.0};
    double p_minus{0.0};
    PhaseBreakdown breakdown;
    PhaseMethod method{PhaseMethod::exact};
    // phase with the commutator term dropped, as a classical noise ensemble
    // with the same second moments would give
    double phi_commutator_free{0.0};
    // false when p_minus >= 1 (perturbation theory out of its range)
    bool regime_valid{true};
};

PhaseReport spin_phase_from_schmidt(double p_minus, double theta0);

// p_minus within this of 1 counts as out of the perturbative range.
inline constexpr double kRegimeSlack = 1e-12;

struct PerturbativeSpinFlip {
    double p_minus{0.0};
    PhaseBreakdown breakdown;
    bool regime_valid{true};
};

// p_minus = <A_- A_+> / (4 rho^2) with A_+- = A_1 +- i A_2 transverse to n_hat.
// r0 only affects the reported breakdown; it defaults to sqrt(<A_1^2 + A_2^2> / 2).
// Throws DegenerateDrivingField when rho == 0.
PerturbativeSpinFlip p_minus_perturbative(const VectorOperatorSystem& sys, std::optional<double> r0 = std::nullopt);

PhaseReport spin_phase_perturbative(const VectorOperatorSystem& sys, std::optional<double> r0 = std::nullopt);

// Polar angle of a classical field giving the same phase over one turn.
double effective_polar_angle(double phi_total);

struct LmScenario {
    double l{0.0};
    double m{0.0};
    double lambda{1.0};
    double theta0{0.0};
    double e_m{0.0};   // E_{l,m}
    double e_m1{0.0};  // E_{l,m+1}
};

struct LmResult {
    double p_minus_exact{0.0};
    double p_minus_pert{0.0};  // NaN when m == 0
    double phi_exact{0.0};
    double phi_pert{0.0};      // NaN when m == 0
    double energy{0.0};
    bool regime_valid{true};
};

// Two-level block spanned by |l, m, +> and |l, m+1, ->.
LmResult exact_lm_scenario(const LmScenario& s);

// -(2 mu + 1) pi (1 - cos theta0), mu the particle projection (integer or half-integer).
double total_system_phase(double mu, double theta0);

// Catalogue systems.
//   two-spin: particle = spin-1/2 s1, A = L = s1, H_A = field n.s1, reference |n+>.
VectorOperatorSystem two_spin_system(const Direction& n_hat, double field = 0.0);
//   angular momentum: A = L, H_A = field n.L, reference R|l, m> with R from rotation_to.
VectorOperatorSystem angular_momentum_system(double l, double m, const Direction& n_hat, double field = 0.0);
//   oscillator: A = rho n_hat + epsilon b, H_A = omega_a N, reference |0>.
VectorOperatorSystem sho_system(int n_max, double epsilon, const Direction& n_hat, double rho = 1.0,
                                double omega_a = 1.0);

}  // namespace geophase

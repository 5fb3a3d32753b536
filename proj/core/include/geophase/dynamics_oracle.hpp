// dynamics_oracle.hpp: brute-force Schrodinger evolution for checking
// adiabatic phases without perturbation theory.
//
// Each step applies exp(-i H(t_mid) dt) exactly, so the propagator is unitary
// to rounding and <H(t_mid)> is conserved within a step; the dynamical phase
// is the sum of these step energies times dt.

#pragma once

#include "geophase/operator_algebra.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace geophase {

class HamiltonianPath {
public:
    virtual ~HamiltonianPath() = default;

    virtual Eigen::Index dim() const = 0;
    virtual CMatrix at(double t) const = 0;

    // psi <- exp(-i H(t_mid) dt) psi. Returns <psi|H(t_mid)|psi>, the same
    // before and after the step. The default diagonalizes at(t_mid).
    virtual double step(CVector& psi, double t_mid, double dt) const;
};

class FunctionPath final : public HamiltonianPath {
public:
    FunctionPath(Eigen::Index dim, std::function<CMatrix(double)> h);

    Eigen::Index dim() const override { return dim_; }
    CMatrix at(double t) const override { return h_(t); }

private:
    Eigen::Index dim_;
    std::function<CMatrix(double)> h_;
};

// H(t) = U(t) H0 U(t)^dagger with U(t) = exp(-i omega t J_z), J_z diagonal in
// the working basis. One diagonalization up front, O(d^2) per step.
class PrecessingPath final : public HamiltonianPath {
public:
    PrecessingPath(const CMatrix& h0, Eigen::VectorXd jz, double omega);

    Eigen::Index dim() const override { return jz_.size(); }
    CMatrix at(double t) const override;
    double step(CVector& psi, double t_mid, double dt) const override;

private:
    Eigen::VectorXd jz_;
    double omega_;
    Eigen::VectorXd energies_;
    CMatrix vectors_;
    CMatrix h0_;
};

// Spin-1/2 in a field: H(t) = (coupling / 2) B(t) . sigma, stepped in closed form.
class SpinHalfFieldPath final : public HamiltonianPath {
public:
    SpinHalfFieldPath(std::function<Vec3(double)> field, double coupling);

    Eigen::Index dim() const override { return 2; }
    CMatrix at(double t) const override;
    double step(CVector& psi, double t_mid, double dt) const override;

private:
    std::function<Vec3(double)> field_;
    double coupling_;
};

// Diagonal of L_z (x) 1 + 1 (x) sigma_z / 2 for a particle whose L_z is
// diagonal in its basis; throws DomainError otherwise.
Eigen::VectorXd composite_jz(const Operator& lz);

struct EvolutionConfig {
    std::shared_ptr<const HamiltonianPath> path;
    double omega{1.0};  // precession rate; T = 2 pi n_turns / omega
    int n_turns{1};
    double dt{1e-2};    // upper bound; the step is shrunk to divide T evenly
    double adiabaticity{0.0};  // omega / Omega, recorded for reports
    // Basis component whose phase is followed to unwrap the total phase.
    // Defaults to the largest component of the initial state.
    std::optional<Eigen::Index> gauge_component;
    double overlap_threshold{0.9};

    double period() const;
    void validate() const;  // throws DomainError
};

struct EvolutionResult {
    CVector final_state;
    double dynamical_phase{0.0};  // D = sum dt <H>
    double tracked_phase{0.0};    // unwrapped arg psi_j(T) - arg psi_j(0)
    cplx final_overlap{0.0};      // <psi(0)|psi(T)>
    double norm_drift{0.0};       // max | ||psi|| - 1 | along the run
    std::size_t steps{0};
    Eigen::Index gauge_component{0};
};

inline constexpr double kNormDriftLimit = 1e-8;

// Throws IntegratorFailure when the norm drifts past kNormDriftLimit or the
// gauge component vanishes.
EvolutionResult evolve(const EvolutionConfig& config, const CVector& initial);

struct BerryPhaseResult {
    double geometric_phase{0.0};  // tracked_phase + D, in the gauge of the tracked component
    double total_phase{0.0};      // arg <psi(0)|psi(T)>
    double dynamical_phase{0.0};
    double final_overlap{0.0};    // |<psi(0)|psi(T)>|
    double norm_drift{0.0};
    double adiabaticity{0.0};
    std::size_t steps{0};
};

// Throws AdiabaticityBroken when |<psi(0)|psi(T)>| < config.overlap_threshold.
BerryPhaseResult berry_phase_numeric(const EvolutionConfig& config, const CVector& initial);

// Wraps into (-pi, pi].
double wrap_phase(double phi);

// {config, total_phase, dynamical_phase, geometric_phase, final_overlap, norm_drift}
std::string to_json(const EvolutionConfig& config, const BerryPhaseResult& result);

}  // namespace geophase

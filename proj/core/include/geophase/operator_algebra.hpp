// operator_algebra.hpp: dense operators on small Hilbert spaces.
//
// Basis conventions: angular momentum states are ordered m = l, l-1, ..., -l;
// spin-1/2 as (up, down) along z; in a tensor product A (x) B the index is
// i_A * dim(B) + i_B.

#pragma once

#include "geophase/frames_and_curves.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <complex>
#include <optional>

namespace geophase {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr cplx kI{0.0, 1.0};
inline constexpr double kHermitianTolerance = 1e-12;

// Square, finite complex matrix with an optional verified hermitian flag.
class Operator {
public:
    Operator() = default;
    // Throws DomainError if m is not square or has non-finite entries, and
    // if hermitian is requested but ||m - m^dagger|| exceeds tolerance.
    explicit Operator(CMatrix m, bool hermitian = false);

    static Operator identity(Eigen::Index dim);
    static Operator zero(Eigen::Index dim);

    const CMatrix& matrix() const noexcept { return m_; }
    Eigen::Index dim() const noexcept { return m_.rows(); }
    bool hermitian() const noexcept { return hermitian_; }

    Operator adjoint() const;

    // Real-linear combinations keep the hermitian flag; products and complex
    // scaling drop it.
    friend Operator operator+(const Operator& a, const Operator& b);
    friend Operator operator-(const Operator& a, const Operator& b);
    friend Operator operator*(double s, const Operator& a);
    friend Operator operator*(cplx s, const Operator& a);
    friend Operator operator*(const Operator& a, const Operator& b);

private:
    CMatrix m_;
    bool hermitian_{false};
};

using OperatorTriple = std::array<Operator, 3>;

double hermiticity_defect(const CMatrix& m);

Operator tensor(const Operator& a, const Operator& b);
Operator commutator(const Operator& a, const Operator& b);
cplx expectation(const Operator& a, const CVector& state);
CVector tensor(const CVector& a, const CVector& b);

// v . T = v_x T_x + v_y T_y + v_z T_z
Operator dot(const Vec3& v, const OperatorTriple& t);
std::array<cplx, 3> expectation(const OperatorTriple& t, const CVector& state);

OperatorTriple pauli();

// L_x, L_y, L_z for spin l; 2l must be a non-negative integer.
OperatorTriple angular_momentum(double l);
Operator raising(const OperatorTriple& l);   // L_x + i L_y
Operator lowering(const OperatorTriple& l);  // L_x - i L_y

// Basis vector |l, m> in the m = l..-l ordering.
CVector angular_momentum_state(double l, double m);

// exp(-i angle axis.L) for a hermitian triple L and unit axis.
Operator rotation_operator(const OperatorTriple& l, const Vec3& axis, double angle);

// Rotation carrying z to n: angle theta about z x n. At the poles the axis
// defaults to the azimuthal direction (-sin phi, cos phi, 0).
Operator rotation_to(const OperatorTriple& l, const Direction& n);

// Worst violations of the vector-operator relations
//   [L_i, A_j] = i eps_ijk A_k   and   [L_z, A_+-] = +-A_+-.
// With a projector P the residuals are evaluated as P R P, which is how
// truncated Fock spaces are checked away from the cutoff.
struct VectorOperatorCheck {
    double commutator_violation{0.0};
    double ladder_violation{0.0};

    double max() const noexcept { return std::max(commutator_violation, ladder_violation); }
};

VectorOperatorCheck verify_vector_operator(const OperatorTriple& l, const OperatorTriple& a,
                                           const std::optional<CMatrix>& projector = std::nullopt);

// Three-dimensional oscillator truncated to n_max quanta per mode. b_i = a_i + a_i^dagger
// so that <0|b_i^2|0> = 1; orbital L_i = -i eps_ijk a_j^dagger a_k; N = total number.
struct ShoModes {
    int n_max{0};
    OperatorTriple b;
    OperatorTriple l;
    Operator number;
    CVector ground;

    // Projector onto states with at most `quanta` total excitations.
    CMatrix projector(int quanta) const;
};

ShoModes sho_quadratures(int n_max);

// A particle with hamiltonian H_A, angular momentum L and vector operator A,
// prepared in a reference state with <A> = rho n_hat.
class VectorOperatorSystem {
public:
    static constexpr double kTolerance = 1e-10;

    // Throws DimensionMismatch, DomainError when the reference is not
    // normalized, when <A> is not rho n_hat with rho >= 0, or when H_A does
    // not commute with n_hat.L.
    VectorOperatorSystem(Operator h_a, OperatorTriple l, OperatorTriple a, CVector reference, Direction n_hat);

    Eigen::Index dim() const noexcept { return h_a_.dim(); }
    const Operator& h_a() const noexcept { return h_a_; }
    const OperatorTriple& l() const noexcept { return l_; }
    const OperatorTriple& a() const noexcept { return a_; }
    const CVector& reference() const noexcept { return reference_; }
    const Direction& n_hat() const noexcept { return n_hat_; }
    double rho() const noexcept { return rho_; }

private:
    Operator h_a_;
    OperatorTriple l_;
    OperatorTriple a_;
    CVector reference_;
    Direction n_hat_;
    double rho_{0.0};
};

}  // namespace geophase

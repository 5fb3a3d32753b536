#include "geophase/operator_algebra.hpp"

#include "geophase/errors.hpp"

#include <cmath>
#include <string>

namespace geophase {

namespace {

double scaled_tolerance(double tol, double scale) { return tol * std::max(1.0, scale); }

int twice_spin(double l) {
    const double two_l = 2.0 * l;
    const long n = std::lround(two_l);
    if (!std::isfinite(l) || n < 0 || std::abs(two_l - static_cast<double>(n)) > 1e-12) {
        throw DomainError("angular momentum l must be a non-negative multiple of 1/2, got " + std::to_string(l));
    }
    return static_cast<int>(n);
}

CMatrix single_mode_annihilation(int n_max) {
    CMatrix a = CMatrix::Zero(n_max + 1, n_max + 1);
    for (int n = 1; n <= n_max; ++n) a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
    CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

void require_same_dim(const Operator& a, const Operator& b, const char* what) {
    if (a.dim() != b.dim()) {
        throw DimensionMismatch(std::string(what) + ": dimensions " + std::to_string(a.dim()) + " and " +
                                std::to_string(b.dim()));
    }
}

}  // namespace

double hermiticity_defect(const CMatrix& m) { return (m - m.adjoint()).norm(); }

Operator::Operator(CMatrix m, bool hermitian) : m_(std::move(m)), hermitian_(hermitian) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("Operator: matrix is not square");
    if (!m_.allFinite()) throw DomainError("Operator: non-finite entries");
    if (hermitian_ && hermiticity_defect(m_) > scaled_tolerance(kHermitianTolerance, m_.norm())) {
        throw DomainError("Operator: matrix flagged hermitian is not");
    }
}

Operator Operator::identity(Eigen::Index dim) { return Operator(CMatrix::Identity(dim, dim), true); }

Operator Operator::zero(Eigen::Index dim) { return Operator(CMatrix::Zero(dim, dim), true); }

Operator Operator::adjoint() const {
    Operator out;
    out.m_ = m_.adjoint();
    out.hermitian_ = hermitian_;
    return out;
}

Operator operator+(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator+");
    Operator out;
    out.m_ = a.m_ + b.m_;
    out.hermitian_ = a.hermitian_ && b.hermitian_;
    return out;
}

Operator operator-(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator-");
    Operator out;
    out.m_ = a.m_ - b.m_;
    out.hermitian_ = a.hermitian_ && b.hermitian_;
    return out;
}

Operator operator*(double s, const Operator& a) {
    Operator out;
    out.m_ = s * a.m_;
    out.hermitian_ = a.hermitian_;
    return out;
}

Operator operator*(cplx s, const Operator& a) {
    Operator out;
    out.m_ = s * a.m_;
    out.hermitian_ = a.hermitian_ && s.imag() == 0.0;
    return out;
}

Operator operator*(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "operator*");
    Operator out;
    out.m_ = a.m_ * b.m_;
    return out;
}

Operator tensor(const Operator& a, const Operator& b) {
    return Operator(kron(a.matrix(), b.matrix()), a.hermitian() && b.hermitian());
}

CVector tensor(const CVector& a, const CVector& b) {
    CVector out(a.size() * b.size());
    for (Eigen::Index i = 0; i < a.size(); ++i) out.segment(i * b.size(), b.size()) = a(i) * b;
    return out;
}

Operator commutator(const Operator& a, const Operator& b) {
    require_same_dim(a, b, "commutator");
    return Operator(a.matrix() * b.matrix() - b.matrix() * a.matrix());
}

cplx expectation(const Operator& a, const CVector& state) {
    if (state.size() != a.dim()) {
        throw DimensionMismatch("expectation: state size " + std::to_string(state.size()) + " vs operator " +
                                std::to_string(a.dim()));
    }
    const cplx v = state.dot(a.matrix() * state);
    if (a.hermitian()) return {v.real(), 0.0};
    return v;
}

Operator dot(const Vec3& v, const OperatorTriple& t) {
    return v.x() * t[0] + v.y() * t[1] + v.z() * t[2];
}

std::array<cplx, 3> expectation(const OperatorTriple& t, const CVector& state) {
    return {expectation(t[0], state), expectation(t[1], state), expectation(t[2], state)};
}

OperatorTriple pauli() {
    CMatrix x(2, 2), y(2, 2), z(2, 2);
    x << 0.0, 1.0, 1.0, 0.0;
    y << 0.0, -kI, kI, 0.0;
    z << 1.0, 0.0, 0.0, -1.0;
    return {Operator(x, true), Operator(y, true), Operator(z, true)};
}

OperatorTriple angular_momentum(double l) {
    const int n2 = twice_spin(l);
    const Eigen::Index d = n2 + 1;
    const double ll = 0.5 * n2;
    CMatrix lz = CMatrix::Zero(d, d);
    CMatrix lp = CMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        const double m = ll - static_cast<double>(k);
        lz(k, k) = m;
        if (k > 0) lp(k - 1, k) = std::sqrt(ll * (ll + 1.0) - m * (m + 1.0));
    }
    const CMatrix lm = lp.adjoint();
    return {Operator(0.5 * (lp + lm), true), Operator((lp - lm) / (2.0 * kI), true), Operator(lz, true)};
}

Operator raising(const OperatorTriple& l) { return Operator(l[0].matrix() + kI * l[1].matrix()); }

Operator lowering(const OperatorTriple& l) { return Operator(l[0].matrix() - kI * l[1].matrix()); }

CVector angular_momentum_state(double l, double m) {
    const int n2 = twice_spin(l);
    const double k = 0.5 * n2 - m;
    const long idx = std::lround(k);
    if (std::abs(k - static_cast<double>(idx)) > 1e-12 || idx < 0 || idx > n2) {
        throw DomainError("angular_momentum_state: m = " + std::to_string(m) + " not in -l..l");
    }
    CVector v = CVector::Zero(n2 + 1);
    v(idx) = 1.0;
    return v;
}

Operator rotation_operator(const OperatorTriple& l, const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw DomainError("rotation_operator: axis must be a non-zero vector");
    const Operator g = dot(axis / n, l);
    Eigen::SelfAdjointEigenSolver<CMatrix> es(g.matrix());
    const CVector phases = (es.eigenvalues().cast<cplx>() * (-kI * angle)).array().exp();
    return Operator(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

Operator rotation_to(const OperatorTriple& l, const Direction& n) {
    const Vec3 axis(-std::sin(n.phi), std::cos(n.phi), 0.0);
    return rotation_operator(l, axis, n.theta);
}

VectorOperatorCheck verify_vector_operator(const OperatorTriple& l, const OperatorTriple& a,
                                           const std::optional<CMatrix>& projector) {
    const Eigen::Index d = l[0].dim();
    for (int i = 0; i < 3; ++i) {
        if (l[i].dim() != d || a[i].dim() != d) throw DimensionMismatch("verify_vector_operator: dimensions differ");
    }
    if (projector && (projector->rows() != d || projector->cols() != d)) {
        throw DimensionMismatch("verify_vector_operator: projector dimension");
    }
    auto restrict = [&](const CMatrix& r) -> double {
        return projector ? ((*projector) * r * (*projector)).norm() : r.norm();
    };

    VectorOperatorCheck out;
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) {
            CMatrix r = commutator(l[i], a[j]).matrix();
            if (i != j) {
                const int k = 3 - i - j;
                // eps_ijk = +1 for cyclic (i, j, k)
                const double eps = ((j - i + 3) % 3 == 1) ? 1.0 : -1.0;
                r -= kI * eps * a[k].matrix();
            }
            out.commutator_violation = std::max(out.commutator_violation, restrict(r));
        }
    }
    const Operator ap(a[0].matrix() + kI * a[1].matrix());
    const Operator am(a[0].matrix() - kI * a[1].matrix());
    out.ladder_violation = std::max(restrict(commutator(l[2], ap).matrix() - ap.matrix()),
                                    restrict(commutator(l[2], am).matrix() + am.matrix()));
    return out;
}

ShoModes sho_quadratures(int n_max) {
    if (n_max < 1) throw DomainError("sho_quadratures: n_max must be >= 1");
    const Eigen::Index m = n_max + 1;
    const CMatrix a1 = single_mode_annihilation(n_max);
    const CMatrix id = CMatrix::Identity(m, m);
    const std::array<CMatrix, 3> a{kron(kron(a1, id), id), kron(kron(id, a1), id), kron(kron(id, id), a1)};

    ShoModes s;
    s.n_max = n_max;
    const Eigen::Index d = m * m * m;
    CMatrix number = CMatrix::Zero(d, d);
    for (int i = 0; i < 3; ++i) {
        s.b[i] = Operator(a[i] + a[i].adjoint(), true);
        number += a[i].adjoint() * a[i];
    }
    for (int i = 0; i < 3; ++i) {
        const int j = (i + 1) % 3;
        const int k = (i + 2) % 3;
        s.l[i] = Operator(-kI * (a[j].adjoint() * a[k] - a[k].adjoint() * a[j]), true);
    }
    s.number = Operator(number, true);
    s.ground = CVector::Zero(d);
    s.ground(0) = 1.0;
    return s;
}

CMatrix ShoModes::projector(int quanta) const {
    const Eigen::Index d = number.dim();
    CMatrix p = CMatrix::Zero(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        if (number.matrix()(i, i).real() <= quanta + 0.5) p(i, i) = 1.0;
    }
    return p;
}

VectorOperatorSystem::VectorOperatorSystem(Operator h_a, OperatorTriple l, OperatorTriple a, CVector reference,
                                           Direction n_hat)
    : h_a_(std::move(h_a)), l_(std::move(l)), a_(std::move(a)), reference_(std::move(reference)), n_hat_(n_hat) {
    const Eigen::Index d = h_a_.dim();
    if (d == 0) throw DimensionMismatch("VectorOperatorSystem: empty hamiltonian");
    for (int i = 0; i < 3; ++i) {
        if (l_[i].dim() != d || a_[i].dim() != d) throw DimensionMismatch("VectorOperatorSystem: operator dimensions");
    }
    if (reference_.size() != d) throw DimensionMismatch("VectorOperatorSystem: reference state dimension");
    if (std::abs(reference_.norm() - 1.0) > kTolerance) {
        throw DomainError("VectorOperatorSystem: reference state is not normalized");
    }

    const Vec3 n = n_hat_.cartesian();
    const auto ev = expectation(a_, reference_);
    const Vec3 mean(ev[0].real(), ev[1].real(), ev[2].real());
    const double along = mean.dot(n);
    if ((mean - along * n).norm() > scaled_tolerance(kTolerance, mean.norm())) {
        throw DomainError("VectorOperatorSystem: <A> is not parallel to n_hat");
    }
    if (along < -kTolerance) throw DomainError("VectorOperatorSystem: <A> points along -n_hat");
    rho_ = std::max(along, 0.0);

    const Operator nl = dot(n, l_);
    const double defect = commutator(h_a_, nl).matrix().norm();
    if (defect > scaled_tolerance(kTolerance, h_a_.matrix().norm() * nl.matrix().norm())) {
        throw DomainError("VectorOperatorSystem: H_A does not commute with n_hat.L");
    }
}

}  // namespace geophase

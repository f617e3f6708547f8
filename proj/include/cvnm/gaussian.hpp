#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

#include "errors.hpp"
#include "linalg.hpp"

// Two-mode Gaussian states with zero mean, quadrature ordering (X1,P1,X2,P2),
// vacuum normalization sigma_vac = (1/2) * identity.

namespace cvnm {

struct CovarianceMatrix {
    Mat4 m;

    double operator()(std::size_t i, std::size_t j) const { return m(i, j); }
    double& operator()(std::size_t i, std::size_t j) { return m(i, j); }

    Mat2 block_a() const { return m.block(0, 0); }   // first mode
    Mat2 block_b() const { return m.block(2, 2); }   // second mode
    Mat2 block_c() const { return m.block(0, 2); }   // cross block

    bool is_symmetric(double tol = 1e-12) const { return m.max_asymmetry() <= tol; }

    // symmetric block form: equal diagonal blocks and symmetric cross block
    bool is_symmetric_block_form(double tol = 1e-9) const {
        const Mat2 a = block_a(), b = block_b(), c = block_c();
        const double scale = std::max(1.0, m.max_abs());
        return (a - b).max_abs() <= tol * scale && std::fabs(c.a12 - c.a21) <= tol * scale &&
               is_symmetric(tol * scale);
    }
};

struct TwoModeBlocks {
    Mat2 A;  // first-mode block (symmetric case: both diagonal blocks equal)
    Mat2 C;  // cross block

    CovarianceMatrix assemble() const {
        return {Mat4::from_blocks(A, C, C.transpose(), A)};
    }
};

inline TwoModeBlocks split_blocks(const CovarianceMatrix& s) {
    return {s.block_a(), s.block_c()};
}

// two-mode squeezed thermal state: A = a*I, C = diag(c, -c) with
// a = (N + 1/2) cosh 2r, c = (N + 1/2) sinh 2r
inline CovarianceMatrix twb_state(double r, double N) {
    if (r < 0.0) throw DomainError("twb_state: squeezing r must be >= 0");
    if (N < 0.0) throw DomainError("twb_state: thermal photons N must be >= 0");
    const double a = (N + 0.5) * std::cosh(2.0 * r);
    const double c = (N + 0.5) * std::sinh(2.0 * r);
    TwoModeBlocks b{Mat2::diag(a, a), Mat2::diag(c, -c)};
    return b.assemble();
}

inline std::pair<double, double> twb_entries(double r, double N) {
    return {(N + 0.5) * std::cosh(2.0 * r), (N + 0.5) * std::sinh(2.0 * r)};
}

struct SymplecticSpectrum {
    double n_plus;   // larger symplectic eigenvalue
    double n_minus;  // smaller
};

// two-mode invariant route: Delta = det A + det B + 2 det C,
// n^2 = (Delta +- sqrt(Delta^2 - 4 det sigma)) / 2. Exact algebra, but the
// discriminant cancels catastrophically when n+ ~ n- (error ~ sqrt(eps)).
inline SymplecticSpectrum symplectic_eigenvalues_invariants(const CovarianceMatrix& s) {
    const Mat2 A = s.block_a(), B = s.block_b(), C = s.block_c();
    const double delta = A.det() + B.det() + 2.0 * C.det();
    const double d4 = s.m.det();
    double disc = delta * delta - 4.0 * d4;
    if (disc < 0.0) {
        if (disc < -1e-12)
            throw NumericalDegeneracyError("symplectic_eigenvalues: negative discriminant");
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    double np2 = 0.5 * (delta + root);
    double nm2 = 0.5 * (delta - root);
    if (np2 < 0.0) np2 = 0.0;
    if (nm2 < 0.0) nm2 = 0.0;
    return {std::sqrt(np2), std::sqrt(nm2)};
}

// Primary route, stable at degenerate pairs: with sigma = L L^T the spectrum of
// i Omega sigma equals that of the antisymmetric pencil W = L^T Omega L, whose
// singular values (the nu's, each twice) come out of a symmetric Jacobi solve
// on [[0, W], [W^T, 0]] with error linear in machine epsilon. Falls back to the
// invariant formula when sigma is not positive definite.
inline SymplecticSpectrum symplectic_eigenvalues(const CovarianceMatrix& s) {
    Mat4 L;
    if (!cholesky4(s.m, L)) return symplectic_eigenvalues_invariants(s);
    const Mat4 W = L.transpose() * symplectic_form_4() * L;
    std::array<double, 64> embed{};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) {
            embed[8 * i + (j + 4)] = W(i, j);
            embed[8 * (i + 4) + j] = W(j, i);
        }
    std::array<double, 8> eig = jacobi_eigenvalues<8>(embed);
    for (double& e : eig) e = std::fabs(e);
    std::sort(eig.begin(), eig.end());
    return {eig[7], eig[0]};
}

// independent route through the symplectic form: eigenvalues of (Omega sigma)^2
// come in pairs -nu^2, so nu+^2 + nu-^2 = -tr[(Omega sigma)^2] / 2
inline SymplecticSpectrum symplectic_eigenvalues_via_form(const CovarianceMatrix& s) {
    const Mat4 M = symplectic_form_4() * s.m;
    const Mat4 M2 = M * M;
    const double sum_sq = -0.5 * M2.trace();     // nu+^2 + nu-^2
    const double prod_sq = s.m.det();            // (nu+ nu-)^2
    double disc = sum_sq * sum_sq - 4.0 * prod_sq;
    if (disc < 0.0) {
        if (disc < -1e-12)
            throw NumericalDegeneracyError("symplectic_eigenvalues_via_form: negative discriminant");
        disc = 0.0;
    }
    const double root = std::sqrt(disc);
    double np2 = 0.5 * (sum_sq + root);
    double nm2 = 0.5 * (sum_sq - root);
    if (np2 < 0.0) np2 = 0.0;
    if (nm2 < 0.0) nm2 = 0.0;
    return {std::sqrt(np2), std::sqrt(nm2)};
}

// partial transpose of the second mode: flips that mode's momentum,
// sigma -> D sigma D with D = diag(1,1,1,-1) in (X1,P1,X2,P2) ordering
inline CovarianceMatrix partial_transpose(const CovarianceMatrix& s) {
    CovarianceMatrix out = s;
    static const double sign[4] = {1.0, 1.0, 1.0, -1.0};
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = 0; j < 4; ++j) out.m(i, j) = sign[i] * s.m(i, j) * sign[j];
    return out;
}

struct PhysicalityReport {
    bool ok = false;
    double nu_minus = 0.0;
    double violation = 0.0;  // max(0, 1/2 - nu_minus)
};

// uncertainty-principle guard: physical iff nu_minus >= 1/2 - tol
inline PhysicalityReport validate_physical(const CovarianceMatrix& s, double tol = 1e-9) {
    PhysicalityReport rep;
    const SymplecticSpectrum nu = symplectic_eigenvalues(s);
    rep.nu_minus = nu.n_minus;
    rep.violation = std::max(0.0, 0.5 - nu.n_minus);
    rep.ok = nu.n_minus >= 0.5 - tol;
    return rep;
}

// f(x) = (x + 1/2) ln(x + 1/2) - (x - 1/2) ln(x - 1/2), nats; f(1/2) = 0.
// Values within 1e-9 below 1/2 are clamped (quadrature noise); lower is an error.
inline double entropy_f(double x) {
    if (x < 0.5 - 1e-9) throw DomainError("entropy_f: argument below 1/2 beyond tolerance");
    if (x <= 0.5) return 0.0;
    const double p = x + 0.5;
    const double q = x - 0.5;
    const double ql = (q > 0.0) ? q * std::log(q) : 0.0;
    return p * std::log(p) - ql;
}

// S(sigma) = f(n+) + f(n-) for the two-mode state
inline double von_neumann_entropy(const CovarianceMatrix& s) {
    const SymplecticSpectrum nu = symplectic_eigenvalues(s);
    return entropy_f(nu.n_plus) + entropy_f(nu.n_minus);
}

// single-mode marginal entropy f(sqrt(det A))
inline double marginal_entropy(const Mat2& A) { return entropy_f(std::sqrt(A.det())); }

}  // namespace cvnm

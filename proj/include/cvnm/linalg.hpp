#pragma once

#include <array>
#include <cmath>
#include <cstddef>

// Small fixed-size real matrices. Everything here is a plain value type;
// 2x2 blocks and 4x4 two-mode matrices are all this library ever needs.

namespace cvnm {

struct Mat2 {
    // row-major entries
    double a11 = 0.0, a12 = 0.0, a21 = 0.0, a22 = 0.0;

    static Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
    static Mat2 diag(double d1, double d2) { return {d1, 0.0, 0.0, d2}; }

    double trace() const { return a11 + a22; }
    double det() const { return a11 * a22 - a12 * a21; }

    Mat2 transpose() const { return {a11, a21, a12, a22}; }

    Mat2 inverse() const {
        const double d = det();
        return {a22 / d, -a12 / d, -a21 / d, a11 / d};
    }

    Mat2 operator+(const Mat2& o) const { return {a11 + o.a11, a12 + o.a12, a21 + o.a21, a22 + o.a22}; }
    Mat2 operator-(const Mat2& o) const { return {a11 - o.a11, a12 - o.a12, a21 - o.a21, a22 - o.a22}; }
    Mat2 operator*(const Mat2& o) const {
        return {a11 * o.a11 + a12 * o.a21, a11 * o.a12 + a12 * o.a22,
                a21 * o.a11 + a22 * o.a21, a21 * o.a12 + a22 * o.a22};
    }
    Mat2 operator*(double s) const { return {a11 * s, a12 * s, a21 * s, a22 * s}; }

    double max_abs() const {
        return std::max(std::max(std::fabs(a11), std::fabs(a12)),
                        std::max(std::fabs(a21), std::fabs(a22)));
    }

    double max_abs_diff(const Mat2& o) const { return (*this - o).max_abs(); }
};

inline Mat2 operator*(double s, const Mat2& m) { return m * s; }

// congruence S M S^T
inline Mat2 congruence(const Mat2& s, const Mat2& m) { return s * m * s.transpose(); }

struct Mat4 {
    std::array<double, 16> v{};  // row-major

    double& operator()(std::size_t i, std::size_t j) { return v[4 * i + j]; }
    double operator()(std::size_t i, std::size_t j) const { return v[4 * i + j]; }

    static Mat4 identity() {
        Mat4 m;
        for (std::size_t i = 0; i < 4; ++i) m(i, i) = 1.0;
        return m;
    }

    static Mat4 scaled_identity(double s) {
        Mat4 m;
        for (std::size_t i = 0; i < 4; ++i) m(i, i) = s;
        return m;
    }

    // [[b00, b01],[b10, b11]] from 2x2 blocks
    static Mat4 from_blocks(const Mat2& b00, const Mat2& b01, const Mat2& b10, const Mat2& b11) {
        Mat4 m;
        auto put = [&m](std::size_t r, std::size_t c, const Mat2& b) {
            m(r, c) = b.a11;
            m(r, c + 1) = b.a12;
            m(r + 1, c) = b.a21;
            m(r + 1, c + 1) = b.a22;
        };
        put(0, 0, b00);
        put(0, 2, b01);
        put(2, 0, b10);
        put(2, 2, b11);
        return m;
    }

    static Mat4 direct_sum(const Mat2& top, const Mat2& bottom) {
        return from_blocks(top, Mat2{}, Mat2{}, bottom);
    }

    Mat2 block(std::size_t r, std::size_t c) const {
        return {(*this)(r, c), (*this)(r, c + 1), (*this)(r + 1, c), (*this)(r + 1, c + 1)};
    }

    Mat4 transpose() const {
        Mat4 m;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = (*this)(j, i);
        return m;
    }

    double trace() const { return v[0] + v[5] + v[10] + v[15]; }

    Mat4 operator+(const Mat4& o) const {
        Mat4 m;
        for (std::size_t i = 0; i < 16; ++i) m.v[i] = v[i] + o.v[i];
        return m;
    }
    Mat4 operator-(const Mat4& o) const {
        Mat4 m;
        for (std::size_t i = 0; i < 16; ++i) m.v[i] = v[i] - o.v[i];
        return m;
    }
    Mat4 operator*(double s) const {
        Mat4 m;
        for (std::size_t i = 0; i < 16; ++i) m.v[i] = v[i] * s;
        return m;
    }
    Mat4 operator*(const Mat4& o) const {
        Mat4 m;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < 4; ++k) s += (*this)(i, k) * o(k, j);
                m(i, j) = s;
            }
        return m;
    }

    // determinant by cofactor expansion on 2x2 minors
    double det() const {
        const auto& m = v;
        const double s0 = m[0] * m[5] - m[1] * m[4];
        const double s1 = m[0] * m[6] - m[2] * m[4];
        const double s2 = m[0] * m[7] - m[3] * m[4];
        const double s3 = m[1] * m[6] - m[2] * m[5];
        const double s4 = m[1] * m[7] - m[3] * m[5];
        const double s5 = m[2] * m[7] - m[3] * m[6];
        const double c5 = m[10] * m[15] - m[11] * m[14];
        const double c4 = m[9] * m[15] - m[11] * m[13];
        const double c3 = m[9] * m[14] - m[10] * m[13];
        const double c2 = m[8] * m[15] - m[11] * m[12];
        const double c1 = m[8] * m[14] - m[10] * m[12];
        const double c0 = m[8] * m[13] - m[9] * m[12];
        return s0 * c5 - s1 * c4 + s2 * c3 + s3 * c2 - s4 * c1 + s5 * c0;
    }

    double max_abs() const {
        double r = 0.0;
        for (double x : v) r = std::max(r, std::fabs(x));
        return r;
    }

    double max_abs_diff(const Mat4& o) const {
        double r = 0.0;
        for (std::size_t i = 0; i < 16; ++i) r = std::max(r, std::fabs(v[i] - o.v[i]));
        return r;
    }

    double max_asymmetry() const {
        double r = 0.0;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = i + 1; j < 4; ++j)
                r = std::max(r, std::fabs((*this)(i, j) - (*this)(j, i)));
        return r;
    }

    Mat4 symmetrized() const {
        Mat4 m;
        for (std::size_t i = 0; i < 4; ++i)
            for (std::size_t j = 0; j < 4; ++j) m(i, j) = 0.5 * ((*this)(i, j) + (*this)(j, i));
        return m;
    }
};

inline Mat4 operator*(double s, const Mat4& m) { return m * s; }

inline Mat4 congruence(const Mat4& s, const Mat4& m) { return s * m * s.transpose(); }

// Cholesky factor of a symmetric positive-definite 4x4; returns false when a
// pivot is not positive
inline bool cholesky4(const Mat4& a, Mat4& lower) {
    lower = Mat4{};
    for (std::size_t i = 0; i < 4; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= lower(i, k) * lower(j, k);
            if (i == j) {
                if (s <= 0.0) return false;
                lower(i, i) = std::sqrt(s);
            } else {
                lower(i, j) = s / lower(j, j);
            }
        }
    }
    return true;
}

// cyclic Jacobi eigenvalues of a symmetric N x N matrix (small N only)
template <std::size_t N>
inline std::array<double, N> jacobi_eigenvalues(std::array<double, N * N> a) {
    auto at = [&a](std::size_t i, std::size_t j) -> double& { return a[N * i + j]; };
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < N; ++i)
            for (std::size_t j = i + 1; j < N; ++j) off += at(i, j) * at(i, j);
        if (off < 1e-32) break;
        for (std::size_t p = 0; p < N; ++p) {
            for (std::size_t q = p + 1; q < N; ++q) {
                const double apq = at(p, q);
                if (std::fabs(apq) < 1e-300) continue;
                const double theta = 0.5 * (at(q, q) - at(p, p)) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < N; ++k) {
                    const double akp = at(k, p), akq = at(k, q);
                    at(k, p) = c * akp - s * akq;
                    at(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < N; ++k) {
                    const double apk = at(p, k), aqk = at(q, k);
                    at(p, k) = c * apk - s * aqk;
                    at(q, k) = s * apk + c * aqk;
                }
            }
        }
    }
    std::array<double, N> eig;
    for (std::size_t i = 0; i < N; ++i) eig[i] = at(i, i);
    return eig;
}

// single-mode symplectic form [[0,1],[-1,0]] in (X,P) ordering
inline Mat2 symplectic_form_2() { return {0.0, 1.0, -1.0, 0.0}; }

// two-mode symplectic form J ⊕ J in (X1,P1,X2,P2) ordering
inline Mat4 symplectic_form_4() {
    return Mat4::direct_sum(symplectic_form_2(), symplectic_form_2());
}

}  // namespace cvnm

#pragma once

// Reference computations for the tests. Everything here runs in long double
// on plain nested vectors and shares no code with the library under test.

#include <cmath>
#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tklab/linalg.hpp"

namespace oracle {

using real = long double;
using cplx = std::complex<real>;
using Matrix = std::vector<std::vector<cplx>>;

inline Matrix zeros(std::size_t n)
{
    return Matrix(n, std::vector<cplx>(n));
}

inline Matrix identity(std::size_t n)
{
    auto m = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        m[i][i] = 1;
    }
    return m;
}

inline Matrix from(const tklab::DenseOperator& a)
{
    auto m = zeros(a.dim());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        for (std::size_t j = 0; j < a.dim(); ++j) {
            m[i][j] = cplx(a(i, j).real(), a(i, j).imag());
        }
    }
    return m;
}

inline Matrix mul(const Matrix& a, const Matrix& b)
{
    const std::size_t n = a.size();
    auto c = zeros(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            cplx s = 0;
            for (std::size_t k = 0; k < n; ++k) {
                s += a[i][k] * b[k][j];
            }
            c[i][j] = s;
        }
    }
    return c;
}

inline Matrix add(const Matrix& a, const Matrix& b, cplx beta = 1)
{
    auto c = a;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            c[i][j] += beta * b[i][j];
        }
    }
    return c;
}

inline Matrix scale(const Matrix& a, cplx s)
{
    auto c = a;
    for (auto& row : c) {
        for (auto& v : row) {
            v *= s;
        }
    }
    return c;
}

/// e^{tA}: scale to norm <= 1/16, 30 Taylor terms in long double, square back.
inline Matrix expm(const Matrix& a, real t)
{
    const std::size_t n = a.size();
    real norm = 0;
    for (const auto& row : a) {
        real s = 0;
        for (const auto& v : row) {
            s += std::abs(v);
        }
        norm = std::max(norm, s);
    }
    norm *= std::abs(t);
    int squarings = 0;
    while (norm > 1.0L / 16) {
        norm /= 2;
        ++squarings;
    }
    const auto x = scale(a, t / std::pow(2.0L, squarings));
    auto sum = identity(n);
    auto term = identity(n);
    for (int k = 1; k <= 30; ++k) {
        term = scale(mul(term, x), 1.0L / k);
        sum = add(sum, term);
    }
    for (int s = 0; s < squarings; ++s) {
        sum = mul(sum, sum);
    }
    return sum;
}

/// Gauss-Jordan inverse with full pivoting.
inline Matrix inverse(Matrix a)
{
    const std::size_t n = a.size();
    auto inv = identity(n);
    std::vector<std::size_t> col_perm(n);
    for (std::size_t i = 0; i < n; ++i) {
        col_perm[i] = i;
    }
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t pr = k;
        real best = -1;
        for (std::size_t i = k; i < n; ++i) {
            if (std::abs(a[i][k]) > best) {
                best = std::abs(a[i][k]);
                pr = i;
            }
        }
        if (best == 0) {
            throw std::runtime_error("oracle inverse: singular");
        }
        std::swap(a[k], a[pr]);
        std::swap(inv[k], inv[pr]);
        const cplx piv = a[k][k];
        for (std::size_t j = 0; j < n; ++j) {
            a[k][j] /= piv;
            inv[k][j] /= piv;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == k || a[i][k] == cplx(0)) {
                continue;
            }
            const cplx f = a[i][k];
            for (std::size_t j = 0; j < n; ++j) {
                a[i][j] -= f * a[k][j];
                inv[i][j] -= f * inv[k][j];
            }
        }
    }
    return inv;
}

/// max_ij |a_ij - b_ij|.
inline double max_diff(const Matrix& a, const tklab::DenseOperator& b)
{
    real worst = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            const cplx bij(b(i, j).real(), b(i, j).imag());
            worst = std::max(worst, std::abs(a[i][j] - bij));
        }
    }
    return static_cast<double>(worst);
}

/// Index image of the block swap: i <-> i + n for i < n, identity beyond 2n.
inline std::size_t swap_index(std::size_t i, std::size_t n)
{
    if (i < n) {
        return i + n;
    }
    if (i < 2 * n) {
        return i - n;
    }
    return i;
}

/// (sum |x_i|^p)^{1/p} in long double, or max |x_i| for p = inf.
inline real lp(const std::vector<std::complex<double>>& x, double p)
{
    real s = 0;
    if (std::isinf(p)) {
        for (const auto& v : x) {
            s = std::max<real>(s, std::abs(std::complex<real>(v.real(), v.imag())));
        }
        return s;
    }
    for (const auto& v : x) {
        s += std::pow(std::abs(std::complex<real>(v.real(), v.imag())), static_cast<real>(p));
    }
    return std::pow(s, 1.0L / static_cast<real>(p));
}

/// Largest singular value of a real 2x2 matrix [[a, b], [c, d]].
inline double spectral_norm_2x2(double a, double b, double c, double d)
{
    const double s = a * a + b * b + c * c + d * d;
    const double det = a * d - b * c;
    return std::sqrt(0.5 * (s + std::sqrt(s * s - 4.0 * det * det)));
}

} // namespace oracle

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tklab {

using cplx = std::complex<double>;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Raised when a linear system is singular to the conditioning threshold.
class SingularOperatorError : public std::runtime_error
{
public:
    SingularOperatorError(const std::string& what, double rcond)
        : std::runtime_error(what + " (reciprocal condition estimate " + std::to_string(rcond) + ")")
        , rcond_(rcond)
    {
    }

    [[nodiscard]] double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

class DimensionMismatch : public std::invalid_argument
{
public:
    DimensionMismatch(std::size_t expected, std::size_t actual)
        : std::invalid_argument("dimension mismatch: expected " + std::to_string(expected) + ", got " +
                                std::to_string(actual))
    {
    }
};

inline void check_exponent(double p)
{
    if (!(p >= 1.0)) {
        throw std::invalid_argument("norm exponent p must lie in [1, inf), got " + std::to_string(p));
    }
}

/// Hoelder conjugate of p; p = 1 maps to infinity.
[[nodiscard]] inline double dual_exponent(double p)
{
    check_exponent(p);
    if (p == 1.0) {
        return kInfinity;
    }
    if (std::isinf(p)) {
        return 1.0;
    }
    return p / (p - 1.0);
}

/// l^p norm of a coordinate list, p in [1, inf].
///
/// Moduli are sorted before summation, so the result is invariant under any
/// permutation of the coordinates, bit for bit.
[[nodiscard]] inline double lp_norm(std::span<const cplx> x, double p)
{
    check_exponent(p);
    std::vector<double> mod(x.size());
    std::transform(x.begin(), x.end(), mod.begin(), [](cplx v) { return std::abs(v); });
    std::sort(mod.begin(), mod.end());
    if (mod.empty() || mod.back() == 0.0) {
        return 0.0;
    }
    const double scale = mod.back();
    if (std::isinf(p)) {
        return scale;
    }
    double sum = 0.0;
    for (double m : mod) {
        sum += std::pow(m / scale, p);
    }
    return scale * std::pow(sum, 1.0 / p);
}

/// A vector in a D-dimensional truncation of l^p.
class SequenceVector
{
public:
    SequenceVector(std::vector<cplx> entries, double p = 2.0)
        : entries_(std::move(entries))
        , p_(p)
    {
        if (entries_.empty()) {
            throw std::invalid_argument("SequenceVector needs length D >= 1");
        }
        check_exponent(p_);
    }

    static SequenceVector zeros(std::size_t dim, double p = 2.0)
    {
        return SequenceVector(std::vector<cplx>(dim, cplx{}), p);
    }

    /// Canonical basis vector e_{index+1} (index is zero based).
    static SequenceVector basis(std::size_t dim, std::size_t index, double p = 2.0)
    {
        if (index >= dim) {
            throw std::out_of_range("basis index outside the truncation");
        }
        auto v = zeros(dim, p);
        v.entries_[index] = 1.0;
        return v;
    }

    static SequenceVector from_real(const std::vector<double>& values, double p = 2.0)
    {
        return SequenceVector(std::vector<cplx>(values.begin(), values.end()), p);
    }

    [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
    [[nodiscard]] double p() const noexcept { return p_; }
    [[nodiscard]] std::span<const cplx> entries() const noexcept { return entries_; }
    [[nodiscard]] std::span<cplx> entries() noexcept { return entries_; }

    cplx& operator[](std::size_t i) { return entries_[i]; }
    const cplx& operator[](std::size_t i) const { return entries_[i]; }

    /// Zero-based indices of exactly nonzero entries.
    [[nodiscard]] std::vector<std::size_t> support() const
    {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < entries_.size(); ++i) {
            if (entries_[i] != cplx{}) {
                s.push_back(i);
            }
        }
        return s;
    }

    /// One past the largest nonzero index (0 for the zero vector).
    [[nodiscard]] std::size_t support_bound() const
    {
        for (std::size_t i = entries_.size(); i > 0; --i) {
            if (entries_[i - 1] != cplx{}) {
                return i;
            }
        }
        return 0;
    }

    friend SequenceVector operator+(const SequenceVector& a, const SequenceVector& b)
    {
        if (a.size() != b.size()) {
            throw DimensionMismatch(a.size(), b.size());
        }
        auto r = a;
        for (std::size_t i = 0; i < r.size(); ++i) {
            r.entries_[i] += b.entries_[i];
        }
        return r;
    }

    friend SequenceVector operator-(const SequenceVector& a, const SequenceVector& b)
    {
        if (a.size() != b.size()) {
            throw DimensionMismatch(a.size(), b.size());
        }
        auto r = a;
        for (std::size_t i = 0; i < r.size(); ++i) {
            r.entries_[i] -= b.entries_[i];
        }
        return r;
    }

    friend SequenceVector operator*(cplx s, const SequenceVector& a)
    {
        auto r = a;
        for (auto& v : r.entries_) {
            v *= s;
        }
        return r;
    }

    friend bool operator==(const SequenceVector&, const SequenceVector&) = default;

private:
    std::vector<cplx> entries_;
    double p_;
};

[[nodiscard]] inline double p_norm(const SequenceVector& x)
{
    return lp_norm(x.entries(), x.p());
}

/// Dense D x D complex matrix, row major.
class DenseOperator
{
public:
    explicit DenseOperator(std::size_t dim)
        : dim_(dim)
        , data_(dim * dim)
    {
        if (dim == 0) {
            throw std::invalid_argument("DenseOperator needs dimension >= 1");
        }
    }

    static DenseOperator zero(std::size_t dim) { return DenseOperator(dim); }

    static DenseOperator identity(std::size_t dim) { return scalar(dim, 1.0); }

    static DenseOperator scalar(std::size_t dim, cplx c)
    {
        DenseOperator a(dim);
        for (std::size_t i = 0; i < dim; ++i) {
            a(i, i) = c;
        }
        return a;
    }

    static DenseOperator from_rows(const std::vector<std::vector<cplx>>& rows)
    {
        DenseOperator a(rows.size());
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != rows.size()) {
                throw std::invalid_argument("operator rows must form a square matrix");
            }
            for (std::size_t j = 0; j < rows.size(); ++j) {
                a(i, j) = rows[i][j];
            }
        }
        return a;
    }

    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }

    cplx& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }
    const cplx& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }

    [[nodiscard]] std::span<const cplx> data() const noexcept { return data_; }

    [[nodiscard]] DenseOperator adjoint() const
    {
        DenseOperator r(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                r(j, i) = std::conj((*this)(i, j));
            }
        }
        return r;
    }

    [[nodiscard]] DenseOperator transpose() const
    {
        DenseOperator r(dim_);
        for (std::size_t i = 0; i < dim_; ++i) {
            for (std::size_t j = 0; j < dim_; ++j) {
                r(j, i) = (*this)(i, j);
            }
        }
        return r;
    }

    DenseOperator& operator+=(const DenseOperator& b)
    {
        require_same(b);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] += b.data_[k];
        }
        return *this;
    }

    DenseOperator& operator-=(const DenseOperator& b)
    {
        require_same(b);
        for (std::size_t k = 0; k < data_.size(); ++k) {
            data_[k] -= b.data_[k];
        }
        return *this;
    }

    DenseOperator& operator*=(cplx s)
    {
        for (auto& v : data_) {
            v *= s;
        }
        return *this;
    }

    friend DenseOperator operator+(DenseOperator a, const DenseOperator& b) { return a += b; }
    friend DenseOperator operator-(DenseOperator a, const DenseOperator& b) { return a -= b; }
    friend DenseOperator operator*(cplx s, DenseOperator a) { return a *= s; }
    friend DenseOperator operator*(DenseOperator a, cplx s) { return a *= s; }
    friend DenseOperator operator-(DenseOperator a) { return a *= -1.0; }

    friend DenseOperator operator*(const DenseOperator& a, const DenseOperator& b)
    {
        a.require_same(b);
        const std::size_t n = a.dim_;
        DenseOperator r(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t k = 0; k < n; ++k) {
                const cplx aik = a(i, k);
                if (aik == cplx{}) {
                    continue;
                }
                for (std::size_t j = 0; j < n; ++j) {
                    r(i, j) += aik * b(k, j);
                }
            }
        }
        return r;
    }

    friend bool operator==(const DenseOperator&, const DenseOperator&) = default;

private:
    void require_same(const DenseOperator& b) const
    {
        if (b.dim_ != dim_) {
            throw DimensionMismatch(dim_, b.dim_);
        }
    }

    std::size_t dim_;
    std::vector<cplx> data_;
};

[[nodiscard]] inline SequenceVector apply(const DenseOperator& a, const SequenceVector& x)
{
    if (a.dim() != x.size()) {
        throw DimensionMismatch(a.dim(), x.size());
    }
    std::vector<cplx> y(x.size());
    for (std::size_t i = 0; i < a.dim(); ++i) {
        cplx acc{};
        for (std::size_t j = 0; j < a.dim(); ++j) {
            acc += a(i, j) * x[j];
        }
        y[i] = acc;
    }
    return SequenceVector(std::move(y), x.p());
}

[[nodiscard]] inline double max_abs_entry(const DenseOperator& a)
{
    double m = 0.0;
    for (cplx v : a.data()) {
        m = std::max(m, std::abs(v));
    }
    return m;
}

[[nodiscard]] inline double frobenius_norm(const DenseOperator& a)
{
    return lp_norm(a.data(), 2.0);
}

/// Maximum absolute column sum: the exact l^1 operator norm.
[[nodiscard]] inline double norm_1(const DenseOperator& a)
{
    double best = 0.0;
    for (std::size_t j = 0; j < a.dim(); ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < a.dim(); ++i) {
            s += std::abs(a(i, j));
        }
        best = std::max(best, s);
    }
    return best;
}

/// Maximum absolute row sum: the exact l^inf operator norm.
[[nodiscard]] inline double norm_inf(const DenseOperator& a)
{
    double best = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.dim(); ++j) {
            s += std::abs(a(i, j));
        }
        best = std::max(best, s);
    }
    return best;
}

/// Largest singular value by power iteration on A*A.
///
/// Iterates until the Rayleigh quotient changes by less than rel_tol
/// (relative). The start vector is fixed, so results are deterministic.
[[nodiscard]] inline double norm_2(const DenseOperator& a, double rel_tol = 1e-8, int max_iter = 5000)
{
    const std::size_t n = a.dim();
    if (max_abs_entry(a) == 0.0) {
        return 0.0;
    }
    const DenseOperator gram = a.adjoint() * a;
    std::vector<cplx> v(n);
    for (std::size_t i = 0; i < n; ++i) {
        v[i] = cplx(1.0 + 0.37 * std::sin(1.3 * static_cast<double>(i) + 0.2),
                    0.11 * std::cos(0.7 * static_cast<double>(i)));
    }
    double prev = 0.0;
    double estimate = 0.0;
    std::vector<cplx> w(n);
    for (int it = 0; it < max_iter; ++it) {
        const double vn = lp_norm(v, 2.0);
        for (auto& c : v) {
            c /= vn;
        }
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc{};
            for (std::size_t j = 0; j < n; ++j) {
                acc += gram(i, j) * v[j];
            }
            w[i] = acc;
        }
        cplx rq{};
        for (std::size_t i = 0; i < n; ++i) {
            rq += std::conj(v[i]) * w[i];
        }
        estimate = std::max(rq.real(), 0.0);
        const double wn = lp_norm(w, 2.0);
        if (wn == 0.0) {
            break;
        }
        v = w;
        if (it > 0 && std::abs(estimate - prev) <= rel_tol * estimate * 1e-2) {
            break;
        }
        prev = estimate;
    }
    return std::sqrt(estimate);
}

/// Operator norm value tagged with whether it is exact or a sampled lower bound.
struct NormEstimate
{
    double value = 0.0;
    bool lower_bound = false;
};

/// l^p operator norm: exact for p in {1, inf}, power iteration for p = 2,
/// otherwise the maximum over seeded random unit vectors (a lower bound).
[[nodiscard]] inline NormEstimate operator_norm(const DenseOperator& a, double p, std::uint64_t seed = 0,
                                                int samples = 2000)
{
    check_exponent(p);
    if (p == 1.0) {
        return {norm_1(a), false};
    }
    if (std::isinf(p)) {
        return {norm_inf(a), false};
    }
    if (p == 2.0) {
        return {norm_2(a), false};
    }
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    double best = 0.0;
    const std::size_t n = a.dim();
    auto ratio = [&](const SequenceVector& x) {
        const double nx = p_norm(x);
        return nx == 0.0 ? 0.0 : p_norm(apply(a, x)) / nx;
    };
    for (std::size_t j = 0; j < n; ++j) {
        best = std::max(best, ratio(SequenceVector::basis(n, j, p)));
    }
    for (int s = 0; s < samples; ++s) {
        std::vector<cplx> e(n);
        for (auto& c : e) {
            c = cplx(gauss(rng), gauss(rng));
        }
        best = std::max(best, ratio(SequenceVector(std::move(e), p)));
    }
    return {best, true};
}

/// LU factorization with partial pivoting and an exact 1-norm condition estimate.
class LuFactorization
{
public:
    explicit LuFactorization(const DenseOperator& a)
        : lu_(a)
        , perm_(a.dim())
        , norm1_(norm_1(a))
    {
        const std::size_t n = a.dim();
        for (std::size_t i = 0; i < n; ++i) {
            perm_[i] = i;
        }
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t piv = k;
            double best = std::abs(lu_(k, k));
            for (std::size_t i = k + 1; i < n; ++i) {
                const double v = std::abs(lu_(i, k));
                if (v > best) {
                    best = v;
                    piv = i;
                }
            }
            if (best == 0.0) {
                singular_ = true;
                continue;
            }
            if (piv != k) {
                for (std::size_t j = 0; j < n; ++j) {
                    std::swap(lu_(k, j), lu_(piv, j));
                }
                std::swap(perm_[k], perm_[piv]);
            }
            const cplx pivot = lu_(k, k);
            for (std::size_t i = k + 1; i < n; ++i) {
                if (lu_(i, k) == cplx{}) {
                    continue;
                }
                const cplx l = lu_(i, k) / pivot;
                lu_(i, k) = l;
                for (std::size_t j = k + 1; j < n; ++j) {
                    lu_(i, j) -= l * lu_(k, j);
                }
            }
        }
        if (singular_ || norm1_ == 0.0) {
            rcond_ = 0.0;
            return;
        }
        inverse_ = DenseOperator(n);
        for (std::size_t j = 0; j < n; ++j) {
            std::vector<cplx> e(n);
            e[j] = 1.0;
            const auto col = substitute(e);
            for (std::size_t i = 0; i < n; ++i) {
                inverse_(i, j) = col[i];
            }
        }
        rcond_ = 1.0 / (norm1_ * norm_1(inverse_));
    }

    [[nodiscard]] double rcond() const noexcept { return rcond_; }

    [[nodiscard]] bool singular(double threshold) const noexcept { return singular_ || !(rcond_ >= threshold); }

    [[nodiscard]] std::vector<cplx> solve(std::span<const cplx> b) const
    {
        if (b.size() != lu_.dim()) {
            throw DimensionMismatch(lu_.dim(), b.size());
        }
        return substitute(b);
    }

    [[nodiscard]] const DenseOperator& inverse() const { return inverse_; }

private:
    [[nodiscard]] std::vector<cplx> substitute(std::span<const cplx> b) const
    {
        const std::size_t n = lu_.dim();
        std::vector<cplx> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            cplx acc = b[perm_[i]];
            for (std::size_t j = 0; j < i; ++j) {
                if (lu_(i, j) != cplx{}) {
                    acc -= lu_(i, j) * y[j];
                }
            }
            y[i] = acc;
        }
        for (std::size_t i = n; i-- > 0;) {
            cplx acc = y[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                if (lu_(i, j) != cplx{}) {
                    acc -= lu_(i, j) * y[j];
                }
            }
            y[i] = acc / lu_(i, i);
        }
        return y;
    }

    DenseOperator lu_;
    std::vector<std::size_t> perm_;
    double norm1_;
    DenseOperator inverse_{1};
    double rcond_ = 0.0;
    bool singular_ = false;
};

inline constexpr double kSingularityThreshold = 1e-12;
inline constexpr double kSolveTolerance = 1e-10;

/// Solves A x = b; throws SingularOperatorError below the conditioning threshold.
[[nodiscard]] inline SequenceVector solve(const DenseOperator& a, const SequenceVector& b,
                                          double tol_solve = kSolveTolerance)
{
    if (a.dim() != b.size()) {
        throw DimensionMismatch(a.dim(), b.size());
    }
    const LuFactorization lu(a);
    if (lu.singular(kSingularityThreshold)) {
        throw SingularOperatorError("solve: matrix is singular to tolerance", lu.rcond());
    }
    SequenceVector x(lu.solve(b.entries()), b.p());
    const double bn = lp_norm(b.entries(), 2.0);
    auto residual = apply(a, x) - b;
    if (lp_norm(residual.entries(), 2.0) > tol_solve * bn) {
        // one step of iterative refinement
        const auto corr = lu.solve(residual.entries());
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] -= corr[i];
        }
        residual = apply(a, x) - b;
        if (lp_norm(residual.entries(), 2.0) > tol_solve * bn) {
            throw SingularOperatorError("solve: residual above tolerance", lu.rcond());
        }
    }
    return x;
}

/// A^{-1}; throws SingularOperatorError below the conditioning threshold.
[[nodiscard]] inline DenseOperator inverse(const DenseOperator& a)
{
    const LuFactorization lu(a);
    if (lu.singular(kSingularityThreshold)) {
        throw SingularOperatorError("inverse: matrix is singular to tolerance", lu.rcond());
    }
    return lu.inverse();
}

/// e^{tA} by scaling and squaring over a truncated Taylor series.
///
/// The argument tA is scaled by 2^-s so that its 1-norm is at most 1/2; the
/// series is cut once the tail bound drops below tol * 2^-s / 64, then the
/// result is squared s times. The error is relative to ||e^{tA}||.
[[nodiscard]] inline DenseOperator matrix_exp(const DenseOperator& a, double t, double tol = 1e-12)
{
    if (!(t >= 0.0)) {
        throw std::invalid_argument("matrix_exp: t must be >= 0");
    }
    tol = std::max(tol, std::numeric_limits<double>::epsilon());
    const std::size_t n = a.dim();
    DenseOperator x = t * a;
    const double nrm = norm_1(x);
    if (nrm == 0.0) {
        return DenseOperator::identity(n);
    }
    int squarings = 0;
    if (nrm > 0.5) {
        squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
    }
    x *= std::ldexp(1.0, -squarings);
    const double xn = norm_1(x);
    const double target = std::ldexp(tol, -squarings - 6);

    DenseOperator sum = DenseOperator::identity(n);
    DenseOperator term = DenseOperator::identity(n);
    double term_bound = 1.0;
    for (int k = 1; k <= 64; ++k) {
        term = term * x;
        term *= 1.0 / static_cast<double>(k);
        sum += term;
        term_bound *= xn / static_cast<double>(k);
        const double next = term_bound * xn / static_cast<double>(k + 1);
        const double tail = next / (1.0 - xn / static_cast<double>(k + 2));
        if (tail <= target) {
            break;
        }
    }
    for (int s = 0; s < squarings; ++s) {
        sum = sum * sum;
    }
    return sum;
}

} // namespace tklab

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

#include "linalg.hpp"

namespace tklab {

/// Parameters of a block swap exchanging coordinates [0, n) with [n, 2n).
struct BlockSwapSpec
{
    std::size_t n = 1;
    std::size_t dim = 2;

    void validate() const
    {
        if (n == 0) {
            throw std::invalid_argument("block swap needs block length n >= 1");
        }
        if (dim < 2 * n) {
            throw std::invalid_argument("block swap needs D >= 2n, got n = " + std::to_string(n) +
                                        ", D = " + std::to_string(dim));
        }
    }
};

/// Contraction V together with its analytically known norm.
struct CogeneratorSpec
{
    DenseOperator v;
    double norm_bound = 1.0;
};

/// Permutation matrix swapping the first n coordinates with the next n and
/// fixing the rest. Symmetric, involutive, and an isometry of every l^p.
///
/// With D >= 2n the truncated matrix is exactly the restriction of the
/// infinite-dimensional swap, so no truncation error enters.
[[nodiscard]] inline DenseOperator block_swap(std::size_t n, std::size_t dim)
{
    BlockSwapSpec{n, dim}.validate();
    DenseOperator a(dim);
    for (std::size_t i = 0; i < n; ++i) {
        a(i, i + n) = 1.0;
        a(i + n, i) = 1.0;
    }
    for (std::size_t i = 2 * n; i < dim; ++i) {
        a(i, i) = 1.0;
    }
    return a;
}

/// Swap minus identity; generates a contraction semigroup.
[[nodiscard]] inline DenseOperator rescaled_generator(std::size_t n, std::size_t dim)
{
    return block_swap(n, dim) - DenseOperator::identity(dim);
}

/// V = (1 - 1/n) * swap, with norm exactly 1 - 1/n.
[[nodiscard]] inline CogeneratorSpec contraction_v(std::size_t n, std::size_t dim)
{
    const double c = 1.0 - 1.0 / static_cast<double>(n);
    return {c * block_swap(n, dim), c};
}

/// Generator cogenerated by V: B = -(I + V)(I - V)^{-1}.
///
/// The sign makes R(1, B) = (I - V)/2 and keeps e^{tB} contractive when V is a
/// Hilbert-space contraction. The two factors commute, so B also equals
/// -(I - V)^{-1}(I + V).
[[nodiscard]] inline DenseOperator cayley_generator(const CogeneratorSpec& spec)
{
    const std::size_t dim = spec.v.dim();
    const auto id = DenseOperator::identity(dim);
    const LuFactorization lu(id - spec.v);
    if (lu.singular(kSingularityThreshold)) {
        throw SingularOperatorError("cayley_generator: precondition 1 not in sigma(V_n) violated", lu.rcond());
    }
    return -((id + spec.v) * lu.inverse());
}

} // namespace tklab

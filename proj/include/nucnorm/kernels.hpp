#ifndef NUCNORM_KERNELS_HPP
#define NUCNORM_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"
#include "nucnorm/rng.hpp"

namespace nucnorm
{

enum class Op
{
    none,
    trans
};

//
// Number of threads the level-3 kernels may use. NUCNORM_THREADS caps it;
// otherwise the hardware concurrency is used. Results never depend on this
// value: work is split by output column and each column is produced by one
// thread with a fixed summation order.
//
inline unsigned kernel_threads()
{
    static const unsigned count = [] {
        unsigned hw = std::max(1u, std::thread::hardware_concurrency());
        if (const char* env = std::getenv("NUCNORM_THREADS"))
        {
            char* end   = nullptr;
            long parsed = std::strtol(env, &end, 10);
            if (end != env && parsed >= 1)
            {
                return std::min(hw, static_cast<unsigned>(parsed));
            }
        }
        return hw;
    }();
    return count;
}

namespace detail
{

inline double dot(const double* x, const double* y, std::size_t n) noexcept
{
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4)
    {
        s0 += x[i] * y[i];
        s1 += x[i + 1] * y[i + 1];
        s2 += x[i + 2] * y[i + 2];
        s3 += x[i + 3] * y[i + 3];
    }
    for (; i < n; ++i)
    {
        s0 += x[i] * y[i];
    }
    return (s0 + s1) + (s2 + s3);
}

inline void axpy(double a, const double* x, double* y, std::size_t n) noexcept
{
    for (std::size_t i = 0; i < n; ++i)
    {
        y[i] += a * x[i];
    }
}

// Run fn(j0, j1) over [0, ncols) split into contiguous column ranges.
template <typename Fn>
void for_column_ranges(std::size_t ncols, double flops, Fn&& fn)
{
    const unsigned nt = kernel_threads();
    if (nt <= 1 || ncols < 2 || flops < 4.0e6)
    {
        fn(std::size_t{0}, ncols);
        return;
    }
    const std::size_t parts = std::min<std::size_t>(nt, ncols);
    const std::size_t chunk = (ncols + parts - 1) / parts;
    std::vector<std::jthread> workers;
    workers.reserve(parts - 1);
    for (std::size_t p = 1; p < parts; ++p)
    {
        const std::size_t j0 = p * chunk;
        const std::size_t j1 = std::min(ncols, j0 + chunk);
        if (j0 < j1)
        {
            workers.emplace_back([&fn, j0, j1] { fn(j0, j1); });
        }
    }
    fn(std::size_t{0}, std::min(ncols, chunk));
}

inline constexpr std::size_t kRowTile   = 256;
inline constexpr std::size_t kInnerTile = 128;
inline constexpr std::size_t kDotTile   = 512;
inline constexpr std::size_t kDotCols   = 64;

} // namespace detail

//
// C <- alpha * op(A) * op(B) + beta * C
//
inline void gemm(Op op_a, Op op_b, double alpha, ConstMatrixView a,
                 ConstMatrixView b, double beta, MatrixView c)
{
    const std::size_t m  = op_a == Op::none ? a.rows() : a.cols();
    const std::size_t k  = op_a == Op::none ? a.cols() : a.rows();
    const std::size_t kb = op_b == Op::none ? b.rows() : b.cols();
    const std::size_t n  = op_b == Op::none ? b.cols() : b.rows();
    if (k != kb || c.rows() != m || c.cols() != n)
    {
        throw contract_error(
            "gemm: shape mismatch, op(A) is " + shape_str(m, k) +
            ", op(B) is " + shape_str(kb, n) + ", C is " +
            shape_str(c.rows(), c.cols()));
    }

    for (std::size_t j = 0; j < n; ++j)
    {
        double* cj = c.col_ptr(j);
        if (beta == 0.0)
        {
            std::fill_n(cj, m, 0.0);
        }
        else if (beta != 1.0)
        {
            for (std::size_t i = 0; i < m; ++i)
            {
                cj[i] *= beta;
            }
        }
    }
    if (m == 0 || n == 0 || k == 0 || alpha == 0.0)
    {
        return;
    }

    if (op_a == Op::trans && op_b == Op::trans)
    {
        DenseMatrix bt(b.cols(), b.rows());
        for (std::size_t j = 0; j < b.cols(); ++j)
        {
            for (std::size_t i = 0; i < b.rows(); ++i)
            {
                bt(j, i) = b(i, j);
            }
        }
        gemm(Op::trans, Op::none, alpha, a, bt.view(), 1.0, c);
        return;
    }

    const double flops = 2.0 * double(m) * double(n) * double(k);

    if (op_a == Op::none)
    {
        // axpy form: C(:, j) += op(B)(p, j) * A(:, p), tiled for cache reuse
        const bool tb = op_b == Op::trans;
        detail::for_column_ranges(n, flops, [&](std::size_t j0, std::size_t j1) {
            for (std::size_t i0 = 0; i0 < m; i0 += detail::kRowTile)
            {
                const std::size_t mi = std::min(detail::kRowTile, m - i0);
                for (std::size_t p0 = 0; p0 < k; p0 += detail::kInnerTile)
                {
                    const std::size_t p1 = std::min(k, p0 + detail::kInnerTile);
                    for (std::size_t j = j0; j < j1; ++j)
                    {
                        double* cj = c.col_ptr(j) + i0;
                        for (std::size_t p = p0; p < p1; ++p)
                        {
                            const double bpj = tb ? b(j, p) : b(p, j);
                            if (bpj != 0.0)
                            {
                                detail::axpy(alpha * bpj, a.col_ptr(p) + i0, cj,
                                             mi);
                            }
                        }
                    }
                }
            }
        });
        return;
    }

    // dot form: C(i, j) += A(:, i) . B(:, j)
    detail::for_column_ranges(n, flops, [&](std::size_t j0, std::size_t j1) {
        for (std::size_t p0 = 0; p0 < k; p0 += detail::kDotTile)
        {
            const std::size_t kp = std::min(detail::kDotTile, k - p0);
            for (std::size_t i0 = 0; i0 < m; i0 += detail::kDotCols)
            {
                const std::size_t i1 = std::min(m, i0 + detail::kDotCols);
                for (std::size_t j = j0; j < j1; ++j)
                {
                    const double* bj = b.col_ptr(j) + p0;
                    double* cj       = c.col_ptr(j);
                    for (std::size_t i = i0; i < i1; ++i)
                    {
                        cj[i] += alpha * detail::dot(a.col_ptr(i) + p0, bj, kp);
                    }
                }
            }
        }
    });
}

/// Returns op(A) * op(B) as a new matrix.
inline DenseMatrix matmul(ConstMatrixView a, ConstMatrixView b,
                          bool transpose_a = false, bool transpose_b = false)
{
    const Op op_a        = transpose_a ? Op::trans : Op::none;
    const Op op_b        = transpose_b ? Op::trans : Op::none;
    const std::size_t m  = transpose_a ? a.cols() : a.rows();
    const std::size_t ka = transpose_a ? a.rows() : a.cols();
    const std::size_t kb = transpose_b ? b.cols() : b.rows();
    const std::size_t n  = transpose_b ? b.rows() : b.cols();
    if (ka != kb)
    {
        throw contract_error("matmul: inner dimensions differ, A is " +
                             shape_str(a.rows(), a.cols()) +
                             (transpose_a ? " (transposed)" : "") + ", B is " +
                             shape_str(b.rows(), b.cols()) +
                             (transpose_b ? " (transposed)" : ""));
    }
    DenseMatrix c(m, n);
    gemm(op_a, op_b, 1.0, a, b, 0.0, c.view());
    return c;
}

inline double frobenius_norm(ConstMatrixView a) noexcept
{
    double s = 0.0;
    for (std::size_t j = 0; j < a.cols(); ++j)
    {
        const double* aj = a.col_ptr(j);
        for (std::size_t i = 0; i < a.rows(); ++i)
        {
            s += aj[i] * aj[i];
        }
    }
    return std::sqrt(s);
}

inline DenseMatrix gaussian_matrix(std::size_t rows, std::size_t cols,
                                   SeededRng& rng)
{
    if (rows == 0 || cols == 0)
    {
        throw contract_error("gaussian_matrix: empty shape " +
                             shape_str(rows, cols));
    }
    DenseMatrix g(rows, cols);
    for (double& x : g.values())
    {
        x = rng.normal();
    }
    return g;
}

} // namespace nucnorm

#endif // NUCNORM_KERNELS_HPP

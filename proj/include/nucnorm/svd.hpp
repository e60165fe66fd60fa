#ifndef NUCNORM_SVD_HPP
#define NUCNORM_SVD_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"
#include "nucnorm/householder.hpp"

namespace nucnorm
{

struct JacobiOptions
{
    // pair (p, q) is orthogonal once |a_p . a_q| <= tol * |a_p| |a_q|
    double tolerance = 1e-14;
    int max_sweeps   = 60;
};

namespace detail
{

struct ColumnGram
{
    double pp, qq, pq;
};

inline ColumnGram column_gram(const double* x, const double* y,
                              std::size_t n) noexcept
{
    double xx0 = 0.0, xx1 = 0.0, yy0 = 0.0, yy1 = 0.0, xy0 = 0.0, xy1 = 0.0;
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
    {
        xx0 += x[i] * x[i];
        yy0 += y[i] * y[i];
        xy0 += x[i] * y[i];
        xx1 += x[i + 1] * x[i + 1];
        yy1 += y[i + 1] * y[i + 1];
        xy1 += x[i + 1] * y[i + 1];
    }
    for (; i < n; ++i)
    {
        xx0 += x[i] * x[i];
        yy0 += y[i] * y[i];
        xy0 += x[i] * y[i];
    }
    return {xx0 + xx1, yy0 + yy1, xy0 + xy1};
}

//
// Cyclic one-sided Jacobi: rotates column pairs of `a` until all columns are
// mutually orthogonal; the column norms are then the singular values. Gram
// entries are recomputed for every pair so small singular values keep their
// relative accuracy.
//
inline std::vector<double> one_sided_jacobi(MatrixView a, const JacobiOptions& opt)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    constexpr double tiny = std::numeric_limits<double>::min();

    bool converged = n < 2;
    for (int sweep = 0; sweep < opt.max_sweeps && !converged; ++sweep)
    {
        bool rotated = false;
        for (std::size_t p = 0; p + 1 < n; ++p)
        {
            double* ap = a.col_ptr(p);
            for (std::size_t q = p + 1; q < n; ++q)
            {
                double* aq  = a.col_ptr(q);
                const auto g = column_gram(ap, aq, m);
                const double bound = opt.tolerance * std::sqrt(g.pp) * std::sqrt(g.qq);
                if (std::abs(g.pq) <= bound || std::abs(g.pq) <= tiny)
                {
                    continue;
                }
                rotated = true;
                const double zeta = (g.qq - g.pp) / (2.0 * g.pq);
                const double t = std::copysign(1.0, zeta) /
                                 (std::abs(zeta) + std::hypot(1.0, zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t i = 0; i < m; ++i)
                {
                    const double x = ap[i];
                    const double y = aq[i];
                    ap[i]          = c * x - s * y;
                    aq[i]          = s * x + c * y;
                }
            }
        }
        converged = !rotated;
    }
    if (!converged)
    {
        throw convergence_error("svd_values: one-sided Jacobi did not converge in " +
                                std::to_string(opt.max_sweeps) + " sweeps (" +
                                shape_str(m, n) + ")");
    }

    std::vector<double> sv(n);
    for (std::size_t j = 0; j < n; ++j)
    {
        sv[j] = frobenius_norm(a.block(0, j, m, 1));
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

} // namespace detail

//
// Singular values of `a` in non-increasing order, length min(rows, cols).
// Wide inputs are transposed and tall inputs are first reduced to their
// square triangular QR factor.
//
inline std::vector<double> svd_values(ConstMatrixView a, const JacobiOptions& opt = {})
{
    if (a.empty())
    {
        throw contract_error("svd_values: empty matrix " +
                             shape_str(a.rows(), a.cols()));
    }
    DenseMatrix work(a);
    if (!work.all_finite())
    {
        throw contract_error("svd_values: non-finite entries");
    }
    if (work.rows() < work.cols())
    {
        work = work.transpose();
    }
    if (work.rows() > work.cols())
    {
        work = householder_qr(work.view()).r;
    }
    return detail::one_sided_jacobi(work.view(), opt);
}

} // namespace nucnorm

#endif // NUCNORM_SVD_HPP

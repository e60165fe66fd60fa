#ifndef NUCNORM_HOUSEHOLDER_HPP
#define NUCNORM_HOUSEHOLDER_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"
#include "nucnorm/kernels.hpp"

namespace nucnorm
{

enum class Side
{
    left,
    right
};

//
// A single reflector H = I - tau * v * v^T acting on coordinates
// [offset, offset + v.size()) of the base space. v[0] == 1.
//
struct Reflector
{
    std::span<const double> v;
    double tau;
    std::size_t offset;
};

//
// Orthogonal factor Q = H_0 H_1 ... H_{k-1} of dimension base_dim x base_dim,
// kept as Householder vectors. Reflector i is stored in column i of a
// base_dim x k unit lower trapezoidal matrix. Q itself is never formed; it is
// applied in blocks through the compact WY representation
// Q_blk = I - V T V^T.
//
class ReflectorSet
{
public:
    static constexpr std::size_t block_size = 64;

    ReflectorSet() = default;
    ReflectorSet(DenseMatrix vectors, std::vector<double> taus)
        : vectors_(std::move(vectors)), taus_(std::move(taus))
    {
        if (taus_.size() != vectors_.cols() || taus_.size() > vectors_.rows())
        {
            throw contract_error("ReflectorSet: " +
                                 std::to_string(taus_.size()) +
                                 " scalars for vectors of shape " +
                                 shape_str(vectors_.rows(), vectors_.cols()));
        }
    }

    std::size_t base_dim() const noexcept { return vectors_.rows(); }
    std::size_t size() const noexcept { return taus_.size(); }
    const DenseMatrix& vectors() const noexcept { return vectors_; }
    std::span<const double> taus() const noexcept { return taus_; }

    Reflector reflector(std::size_t i) const
    {
        return {{vectors_.col_ptr(i) + i, base_dim() - i}, taus_.at(i), i};
    }

    // B <- op(Q) B   (rows of B index the base space)
    void apply_left(Op op, MatrixView b) const
    {
        if (b.rows() != base_dim())
        {
            throw contract_error("ReflectorSet::apply_left: Q is " +
                                 shape_str(base_dim(), base_dim()) +
                                 ", B is " + shape_str(b.rows(), b.cols()));
        }
        for_each_block(op == Op::trans, [&](std::size_t k0, std::size_t kb) {
            apply_block(Side::left, op, k0, kb, b);
        });
    }

    // B <- B op(Q)   (columns of B index the base space)
    void apply_right(Op op, MatrixView b) const
    {
        if (b.cols() != base_dim())
        {
            throw contract_error("ReflectorSet::apply_right: Q is " +
                                 shape_str(base_dim(), base_dim()) +
                                 ", B is " + shape_str(b.rows(), b.cols()));
        }
        for_each_block(op == Op::none, [&](std::size_t k0, std::size_t kb) {
            apply_block(Side::right, op, k0, kb, b);
        });
    }

    //
    // Upper triangular T of the compact WY form for reflectors
    // [k0, k0 + kb), i.e. H_k0 ... H_{k0+kb-1} = I - V T V^T.
    //
    static DenseMatrix block_factor(ConstMatrixView v, std::span<const double> tau)
    {
        const std::size_t kb = v.cols();
        DenseMatrix t(kb, kb);
        std::vector<double> w(kb);
        for (std::size_t i = 0; i < kb; ++i)
        {
            t(i, i) = tau[i];
            if (i == 0 || tau[i] == 0.0)
            {
                continue;
            }
            for (std::size_t l = 0; l < i; ++l)
            {
                w[l] = -tau[i] * detail::dot(v.col_ptr(l), v.col_ptr(i), v.rows());
            }
            for (std::size_t r = 0; r < i; ++r)
            {
                double s = 0.0;
                for (std::size_t l = r; l < i; ++l)
                {
                    s += t(r, l) * w[l];
                }
                t(r, i) = s;
            }
        }
        return t;
    }

private:
    template <typename Fn>
    void for_each_block(bool forward, Fn&& fn) const
    {
        const std::size_t k = size();
        const std::size_t nblocks = (k + block_size - 1) / block_size;
        for (std::size_t s = 0; s < nblocks; ++s)
        {
            const std::size_t blk = forward ? s : nblocks - 1 - s;
            const std::size_t k0  = blk * block_size;
            fn(k0, std::min(block_size, k - k0));
        }
    }

    void apply_block(Side side, Op op, std::size_t k0, std::size_t kb,
                     MatrixView b) const
    {
        // rows above k0 of these reflectors are zero
        const std::size_t len = base_dim() - k0;
        const ConstMatrixView v = vectors_.block(k0, k0, len, kb);
        const DenseMatrix t = block_factor(v, std::span(taus_).subspan(k0, kb));
        const bool tt = op == Op::trans;

        if (side == Side::left)
        {
            // op(Q_blk) B = B - V op(T) (V^T B)
            MatrixView bs = b.block(k0, 0, len, b.cols());
            DenseMatrix w(kb, bs.cols());
            gemm(Op::trans, Op::none, 1.0, v, bs, 0.0, w.view());
            DenseMatrix w2(kb, bs.cols());
            gemm(tt ? Op::trans : Op::none, Op::none, 1.0, t.view(), w.view(),
                 0.0, w2.view());
            gemm(Op::none, Op::none, -1.0, v, w2.view(), 1.0, bs);
        }
        else
        {
            // B op(Q_blk) = B - (B V) op(T) V^T
            MatrixView bs = b.block(0, k0, b.rows(), len);
            DenseMatrix w(bs.rows(), kb);
            gemm(Op::none, Op::none, 1.0, bs, v, 0.0, w.view());
            DenseMatrix w2(bs.rows(), kb);
            gemm(Op::none, tt ? Op::trans : Op::none, 1.0, w.view(), t.view(),
                 0.0, w2.view());
            gemm(Op::none, Op::trans, -1.0, w2.view(), v, 1.0, bs);
        }
    }

    DenseMatrix vectors_;
    std::vector<double> taus_;
};

namespace detail
{

//
// Overwrites x with the Householder vector (x[0] = 1) that maps the input to
// beta * e_1 with beta >= 0, and returns {tau, beta}.
//
inline std::pair<double, double> make_reflector(std::span<double> x) noexcept
{
    const double alpha = x[0];
    double scale       = 0.0;
    for (double xi : x)
    {
        scale = std::max(scale, std::abs(xi));
    }
    double sigma = 0.0;
    if (scale > 0.0)
    {
        for (std::size_t i = 1; i < x.size(); ++i)
        {
            const double s = x[i] / scale;
            sigma += s * s;
        }
    }
    x[0] = 1.0;
    if (sigma == 0.0)
    {
        // tail is zero (or negligible); flip the sign of a negative pivot
        std::fill(x.begin() + 1, x.end(), 0.0);
        return alpha >= 0.0 ? std::pair{0.0, alpha} : std::pair{2.0, -alpha};
    }
    const double a  = alpha / scale;
    const double mu = std::sqrt(a * a + sigma);
    const double v0 = a <= 0.0 ? a - mu : -sigma / (a + mu);
    const double tau = 2.0 * v0 * v0 / (sigma + v0 * v0);
    const double inv = 1.0 / (v0 * scale);
    for (std::size_t i = 1; i < x.size(); ++i)
    {
        x[i] *= inv;
    }
    return {tau, mu * scale};
}

// B <- (I - tau v v^T) B, with v.size() == B.rows()
inline void apply_reflector_left(std::span<const double> v, double tau,
                                 MatrixView b) noexcept
{
    if (tau == 0.0)
    {
        return;
    }
    for (std::size_t j = 0; j < b.cols(); ++j)
    {
        double* bj     = b.col_ptr(j);
        const double w = tau * dot(v.data(), bj, v.size());
        for (std::size_t i = 0; i < v.size(); ++i)
        {
            bj[i] -= w * v[i];
        }
    }
}

} // namespace detail

struct QrFactors
{
    ReflectorSet q;  // rows x rows
    DenseMatrix r;   // min(rows, cols) x cols, upper trapezoidal, diag >= 0
};

//
// Blocked Householder QR. Panels of ReflectorSet::block_size columns are
// factored with rank-1 updates, the trailing matrix is then updated with the
// panel's compact WY form.
//
inline QrFactors householder_qr(ConstMatrixView a)
{
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m == 0 || n == 0)
    {
        throw contract_error("householder_qr: empty matrix " + shape_str(m, n));
    }
    const std::size_t k = std::min(m, n);
    DenseMatrix w(a);
    DenseMatrix vecs(m, k);
    std::vector<double> taus(k);
    std::vector<double> diag(k);

    constexpr std::size_t nb = ReflectorSet::block_size;
    for (std::size_t j0 = 0; j0 < k; j0 += nb)
    {
        const std::size_t jb = std::min(nb, k - j0);
        for (std::size_t j = j0; j < j0 + jb; ++j)
        {
            std::span<double> x(w.col_ptr(j) + j, m - j);
            auto [tau, beta] = detail::make_reflector(x);
            taus[j]          = tau;
            diag[j]          = beta;
            std::copy(x.begin(), x.end(), vecs.col_ptr(j) + j);
            detail::apply_reflector_left(
                x, tau, w.block(j, j + 1, m - j, j0 + jb - (j + 1)));
        }
        if (j0 + jb < n)
        {
            const ConstMatrixView v = vecs.block(j0, j0, m - j0, jb);
            const DenseMatrix t =
                ReflectorSet::block_factor(v, std::span(taus).subspan(j0, jb));
            MatrixView trail = w.block(j0, j0 + jb, m - j0, n - j0 - jb);
            DenseMatrix tmp(jb, trail.cols());
            gemm(Op::trans, Op::none, 1.0, v, trail, 0.0, tmp.view());
            DenseMatrix tmp2(jb, trail.cols());
            gemm(Op::trans, Op::none, 1.0, t.view(), tmp.view(), 0.0,
                 tmp2.view());
            gemm(Op::none, Op::none, -1.0, v, tmp2.view(), 1.0, trail);
        }
    }

    DenseMatrix r(k, n);
    for (std::size_t j = 0; j < n; ++j)
    {
        for (std::size_t i = 0; i < std::min(j, k); ++i)
        {
            r(i, j) = w(i, j);
        }
        if (j < k)
        {
            r(j, j) = diag[j];
        }
    }
    return {ReflectorSet(std::move(vecs), std::move(taus)), std::move(r)};
}

/// Q^T B when from_left, otherwise B Q. Q is never materialized.
inline DenseMatrix apply_q_transpose(const ReflectorSet& q, ConstMatrixView b,
                                     bool from_left = true)
{
    DenseMatrix out(b);
    if (from_left)
    {
        q.apply_left(Op::trans, out.view());
    }
    else
    {
        q.apply_right(Op::none, out.view());
    }
    return out;
}

/// Q B.
inline DenseMatrix apply_q(const ReflectorSet& q, ConstMatrixView b)
{
    DenseMatrix out(b);
    q.apply_left(Op::none, out.view());
    return out;
}

} // namespace nucnorm

#endif // NUCNORM_HOUSEHOLDER_HPP

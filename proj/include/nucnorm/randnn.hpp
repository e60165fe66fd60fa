#ifndef NUCNORM_RANDNN_HPP
#define NUCNORM_RANDNN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"
#include "nucnorm/householder.hpp"
#include "nucnorm/kernels.hpp"
#include "nucnorm/rng.hpp"
#include "nucnorm/svd.hpp"

namespace nucnorm
{

struct RandNNConfig
{
    std::size_t block_size      = 64;
    std::size_t power_iters     = 2;
    double early_stop_threshold = 0.0; // 0 disables early termination
    std::uint64_t seed          = 0;
    bool compute_bound          = true;

    void validate() const
    {
        if (block_size < 1)
        {
            throw contract_error("RandNNConfig: block size must be >= 1");
        }
        if (!(early_stop_threshold >= 0.0) || !std::isfinite(early_stop_threshold))
        {
            throw contract_error("RandNNConfig: early-stop threshold must be a "
                                 "finite non-negative number");
        }
    }
};

struct SpectrumEstimate
{
    // Estimated singular values in block order. Each block of block_size
    // entries is sorted non-increasing; the whole vector need not be.
    std::vector<double> values;
    // Frobenius norm of the off-block-diagonal part of the reduced matrix.
    std::optional<double> bound_fro;
    std::size_t blocks_processed = 0;
    // Set when the early-stop threshold ended the reduction; trailing values
    // are then zero and bound_fro only covers the processed panels.
    bool terminated_early = false;

    bool bound_comparable() const noexcept
    {
        return bound_fro.has_value() && !terminated_early;
    }
};

//
// Y = (A^T A)^q A^T G with G a rows(A) x b Gaussian draw. The power rounds are
// not re-orthonormalized.
//
inline DenseMatrix power_sample(ConstMatrixView a, std::size_t b, std::size_t q,
                                SeededRng& rng)
{
    if (a.cols() < 1 || a.rows() < 1 || b < 1)
    {
        throw contract_error("power_sample: need a non-empty matrix and b >= 1, got " +
                             shape_str(a.rows(), a.cols()) + ", b=" +
                             std::to_string(b));
    }
    const DenseMatrix g = gaussian_matrix(a.rows(), b, rng);
    DenseMatrix y       = matmul(a, g.view(), true, false);
    DenseMatrix ay(a.rows(), b);
    for (std::size_t round = 0; round < q; ++round)
    {
        gemm(Op::none, Op::none, 1.0, a, y.view(), 0.0, ay.view());
        gemm(Op::trans, Op::none, 1.0, a, ay.view(), 0.0, y.view());
    }
    return y;
}

namespace detail
{

inline void check_step_shape(std::size_t m, std::size_t n, std::size_t b)
{
    if (b < 1 || n < b + 1 || m < b)
    {
        throw contract_error("step_nn: working block " + shape_str(m, n) +
                             " needs more than b=" + std::to_string(b) +
                             " columns and at least b rows");
    }
}

//
// One reduction step on the working block, in place. On return the leading
// b columns hold [R; 0] and the trailing columns hold U^T (A V)(:, b:end).
//
inline std::vector<double> step_in_place(MatrixView t, std::size_t b,
                                         std::size_t q, SeededRng& rng)
{
    const std::size_t m = t.rows();
    const std::size_t n = t.cols();
    check_step_shape(m, n, b);

    const DenseMatrix y = power_sample(t, b, q, rng);
    const ReflectorSet v = householder_qr(y.view()).q;
    v.apply_right(Op::none, t);

    MatrixView panel = t.block(0, 0, m, b);
    QrFactors ur     = householder_qr(panel);
    for (std::size_t j = 0; j < b; ++j)
    {
        std::copy_n(ur.r.col_ptr(j), b, panel.col_ptr(j));
        std::fill_n(panel.col_ptr(j) + b, m - b, 0.0);
    }
    ur.q.apply_left(Op::trans, t.block(0, b, m, n - b));
    return svd_values(ur.r.view());
}

} // namespace detail

struct StepResult
{
    DenseMatrix t;
    std::vector<double> ss_part;
};

inline StepResult step_nn(ConstMatrixView awork, std::size_t b, std::size_t q,
                          SeededRng& rng)
{
    detail::check_step_shape(awork.rows(), awork.cols(), b);
    StepResult out{DenseMatrix(awork), {}};
    out.ss_part = detail::step_in_place(out.t.view(), b, q, rng);
    return out;
}

// Called after each step with the working block before and after the step.
using StepObserver =
    std::function<void(std::size_t panel, ConstMatrixView before, ConstMatrixView after)>;

//
// Estimates all singular values of `a` by the blocked randomized two-sided
// reduction. Panel i reduces the trailing block starting at (i*b, i*b); the
// last panel, which has no trailing columns, is handled by an exact small SVD
// of the whole remaining block. Wide inputs are processed as their transpose.
//
inline SpectrumEstimate rand_nn(ConstMatrixView a, const RandNNConfig& cfg,
                                const StepObserver& observer = {})
{
    if (a.empty())
    {
        throw contract_error("rand_nn: empty matrix " +
                             shape_str(a.rows(), a.cols()));
    }
    cfg.validate();

    DenseMatrix t = a.rows() >= a.cols() ? DenseMatrix(a) : DenseMatrix(a).transpose();
    const std::size_t m = t.rows();
    const std::size_t n = t.cols();
    const std::size_t b = cfg.block_size;

    SpectrumEstimate est;
    est.values.assign(n, 0.0);
    SeededRng rng(cfg.seed);
    double off_block_sq = 0.0;

    for (std::size_t c0 = 0; c0 < n; c0 += b)
    {
        const std::size_t c1 = std::min(c0 + b, n);
        MatrixView work      = t.block(c0, c0, m - c0, n - c0);
        if (c1 == n)
        {
            const auto ss = svd_values(work);
            std::copy(ss.begin(), ss.end(), est.values.begin() + c0);
            ++est.blocks_processed;
            break;
        }

        std::optional<DenseMatrix> before;
        if (observer)
        {
            before.emplace(work);
        }
        const auto ss = detail::step_in_place(work, b, cfg.power_iters, rng);
        std::copy(ss.begin(), ss.end(), est.values.begin() + c0);
        ++est.blocks_processed;

        if (cfg.compute_bound)
        {
            // rows c0:c1 right of the diagonal block are final after this step
            const double f = frobenius_norm(t.block(c0, c1, c1 - c0, n - c1));
            off_block_sq += f * f;
        }
        if (observer)
        {
            observer(c0 / b, before->view(), work);
        }
        if (cfg.early_stop_threshold > 0.0 &&
            *std::max_element(ss.begin(), ss.end()) < cfg.early_stop_threshold)
        {
            est.terminated_early = true;
            break;
        }
    }
    if (cfg.compute_bound)
    {
        est.bound_fro = std::sqrt(off_block_sq);
    }
    return est;
}

inline double nuclear_norm(const SpectrumEstimate& est) noexcept
{
    return std::accumulate(est.values.begin(), est.values.end(), 0.0);
}

/// (sum sigma^p)^(1/p) for p >= 1; p = infinity gives the largest value.
inline double schatten_p(const SpectrumEstimate& est, double p)
{
    if (std::isnan(p) || p < 1.0)
    {
        throw contract_error("schatten_p: p must be >= 1, got " + std::to_string(p));
    }
    if (p == 1.0)
    {
        return nuclear_norm(est);
    }
    if (est.values.empty())
    {
        return 0.0;
    }
    const double top = *std::max_element(est.values.begin(), est.values.end());
    if (top == 0.0 || std::isinf(p))
    {
        return top;
    }
    double s = 0.0;
    for (double v : est.values)
    {
        s += std::pow(v / top, p);
    }
    return top * std::pow(s, 1.0 / p);
}

struct BoundCheck
{
    double lhs; // l2 distance between true and (sorted) estimated spectra
    bool holds;
};

//
// Checks sqrt(sum (sigma_i - sigma_hat_i)^2) <= bound_fro, pairing both
// spectra in non-increasing order.
//
inline BoundCheck error_bound_check(std::span<const double> true_values,
                                    const SpectrumEstimate& est)
{
    if (true_values.size() != est.values.size())
    {
        throw contract_error("error_bound_check: " + std::to_string(true_values.size()) +
                             " true values vs " + std::to_string(est.values.size()) +
                             " estimates");
    }
    if (!std::is_sorted(true_values.begin(), true_values.end(), std::greater<>()))
    {
        throw contract_error("error_bound_check: true values must be non-increasing");
    }
    if (!est.bound_comparable())
    {
        throw contract_error("error_bound_check: estimate carries no comparable bound");
    }
    std::vector<double> sorted = est.values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double s = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i)
    {
        const double d = true_values[i] - sorted[i];
        s += d * d;
    }
    const double lhs   = std::sqrt(s);
    const double bound = *est.bound_fro;
    return {lhs, lhs <= bound + 1e-10 * (1.0 + bound)};
}

} // namespace nucnorm

#endif // NUCNORM_RANDNN_HPP

#ifndef NUCNORM_TESTMAT_HPP
#define NUCNORM_TESTMAT_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"
#include "nucnorm/householder.hpp"
#include "nucnorm/kernels.hpp"
#include "nucnorm/rng.hpp"

namespace nucnorm
{

// Target singular values, non-increasing and non-negative.
struct SpectrumSpec
{
    std::vector<double> values;

    void validate() const
    {
        for (double v : values)
        {
            if (!std::isfinite(v) || v < 0.0)
            {
                throw contract_error("SpectrumSpec: values must be finite and >= 0");
            }
        }
        if (!std::is_sorted(values.begin(), values.end(), std::greater<>()))
        {
            throw contract_error("SpectrumSpec: values must be non-increasing");
        }
    }
};

//
// A = U diag(spec) V^T, with U (m x n) and V (n x n) the orthogonal QR factors
// of Gaussian matrices drawn from SeededRng(seed), U first.
//
inline DenseMatrix prescribed_spectrum_matrix(const SpectrumSpec& spec,
                                              std::size_t m, std::uint64_t seed)
{
    spec.validate();
    const std::size_t n = spec.values.size();
    if (n == 0 || m < n)
    {
        throw contract_error("prescribed_spectrum_matrix: need 1 <= len(spec) <= m, got "
                             "len " + std::to_string(n) + ", m " + std::to_string(m));
    }
    SeededRng rng(seed);
    const DenseMatrix gu = gaussian_matrix(m, n, rng);
    const DenseMatrix gv = gaussian_matrix(n, n, rng);

    DenseMatrix u = apply_q(householder_qr(gu.view()).q,
                            DenseMatrix::diagonal(spec.values, m, n).view());
    const DenseMatrix v = apply_q(householder_qr(gv.view()).q,
                                  DenseMatrix::identity(n).view());
    return matmul(u.view(), v.view(), false, true);
}

//
// Logistic S-curve: hovers near 1, decays through 0.5 at i = n/2 and levels
// out at 1e-6. sigma_i = floor + (1 - floor) / (1 + exp(alpha (i - n/2))),
// i = 1..n, alpha = 60 / n.
//
inline SpectrumSpec s_shaped_spectrum(std::size_t n)
{
    if (n < 3)
    {
        throw contract_error("s_shaped_spectrum: n must be >= 3");
    }
    constexpr double floor_value = 1e-6;
    const double alpha           = 60.0 / double(n);
    const double mid             = double(n) / 2.0;
    SpectrumSpec s;
    s.values.resize(n);
    for (std::size_t i = 1; i <= n; ++i)
    {
        s.values[i - 1] = floor_value + (1.0 - floor_value) /
                                            (1.0 + std::exp(alpha * (double(i) - mid)));
    }
    return s;
}

//
// Nystrom discretization of the Laplace single-layer operator
//   (S phi)(s) = -1/(2 pi) \int log|x(s) - x(t)| phi(t) dt
// on the unit circle with n equispaced trapezoidal nodes. Off-diagonal
// entries are -(1/n) log(2 |sin(pi (i - j) / n)|). The diagonal weight comes
// from singularity subtraction: it is chosen so that each row integrates a
// constant density exactly, and the exact integral of the log kernel over
// the unit circle is zero. The matrix is symmetric circulant.
//
inline DenseMatrix bie_single_layer_matrix(std::size_t n)
{
    if (n < 16 || n % 2 != 0)
    {
        throw contract_error("bie_single_layer_matrix: n must be even and >= 16, got " +
                             std::to_string(n));
    }
    const double inv_n = 1.0 / double(n);
    std::vector<double> kernel(n);
    double row_sum = 0.0;
    for (std::size_t k = 1; k < n; ++k)
    {
        const std::size_t kk = std::min(k, n - k);
        kernel[k] = -inv_n * std::log(2.0 * std::sin(std::numbers::pi * double(kk) * inv_n));
        row_sum += kernel[k];
    }
    kernel[0] = -row_sum;

    DenseMatrix a(n, n);
    for (std::size_t j = 0; j < n; ++j)
    {
        for (std::size_t i = 0; i < n; ++i)
        {
            a(i, j) = kernel[(j + n - i) % n];
        }
    }
    return a;
}

} // namespace nucnorm

#endif // NUCNORM_TESTMAT_HPP

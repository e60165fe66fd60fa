#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nucnorm/svd.hpp"
#include "nucnorm/testmat.hpp"
#include "test_support.hpp"

using namespace nucnorm;
using namespace nucnorm::testing;

TEST(SvdValues, Diagonal)
{
    const auto a = DenseMatrix::diagonal(std::vector<double>{1, 3, 2}, 3, 3);
    EXPECT_EQ(svd_values(a.view()), (std::vector<double>{3, 2, 1}));
}

TEST(SvdValues, OrthogonalMatrixHasUnitValues)
{
    const auto q  = explicit_q(householder_qr(random_matrix(5, 5, 4).view()).q);
    const auto sv = svd_values(q.view());
    ASSERT_EQ(sv.size(), 5u);
    for (double s : sv)
    {
        EXPECT_NEAR(s, 1.0, 1e-13);
    }
}

TEST(SvdValues, RandomSixBySixAgainstFrobeniusAndPowerMethod)
{
    const auto a  = random_matrix(6, 6, 31);
    const auto sv = svd_values(a.view());
    double ss = 0.0;
    for (double s : sv)
    {
        ss += s * s;
    }
    const double fro = frobenius_norm(a.view());
    EXPECT_NEAR(ss / (fro * fro), 1.0, 1e-12);
    EXPECT_NEAR(sv[0], power_method_norm(a), 1e-8);
}

TEST(SvdValues, FrobeniusIdentityProperty)
{
    SeededRng shapes(5);
    for (int trial = 0; trial < 30; ++trial)
    {
        const std::size_t m = 1 + shapes.next_u64() % 40;
        const std::size_t n = 1 + shapes.next_u64() % 40;
        const auto a        = random_matrix(m, n, 400 + trial);
        const auto sv       = svd_values(a.view());
        ASSERT_EQ(sv.size(), std::min(m, n));
        ASSERT_TRUE(std::is_sorted(sv.begin(), sv.end(), std::greater<>()));
        double ss = 0.0;
        for (double s : sv)
        {
            ASSERT_GE(s, 0.0);
            ss += s * s;
        }
        const double fro = frobenius_norm(a.view());
        EXPECT_NEAR(ss / (fro * fro), 1.0, 1e-12) << m << "x" << n;
    }
}

TEST(SvdValues, RecoversPrescribedSpectra)
{
    // log-uniform spectra in [1e-3, 1], square and tall
    SeededRng gen(8);
    for (int trial = 0; trial < 12; ++trial)
    {
        const std::size_t n = 2 + gen.next_u64() % 40;
        const std::size_t m = n + (trial % 2 ? gen.next_u64() % 20 : 0);
        SpectrumSpec spec;
        for (std::size_t i = 0; i < n; ++i)
        {
            spec.values.push_back(std::pow(10.0, -3.0 * gen.uniform()));
        }
        std::sort(spec.values.begin(), spec.values.end(), std::greater<>());
        const auto a  = prescribed_spectrum_matrix(spec, m, 900 + trial);
        const auto sv = svd_values(a.view());
        EXPECT_LT(max_rel_diff(sv, spec.values), 1e-10) << m << "x" << n;
    }
}

TEST(SvdValues, WideEqualsTransposed)
{
    const auto a = random_matrix(5, 13, 2);
    EXPECT_EQ(svd_values(a.view()), svd_values(a.transpose().view()));
}

TEST(SvdValues, RankDeficient)
{
    const auto a  = prescribed_spectrum_matrix({{2, 1, 0}}, 4, 3);
    const auto sv = svd_values(a.view());
    EXPECT_NEAR(sv[0], 2.0, 1e-14);
    EXPECT_NEAR(sv[1], 1.0, 1e-14);
    EXPECT_LT(sv[2], 1e-15);
}

TEST(SvdValues, SingleEntry)
{
    const auto a = DenseMatrix::from_rows({{-4}});
    EXPECT_EQ(svd_values(a.view()), std::vector<double>{4});
}

TEST(SvdValues, NonConvergenceIsReported)
{
    const auto a = random_matrix(12, 12, 1);
    JacobiOptions opt;
    opt.max_sweeps = 1;
    EXPECT_THROW(svd_values(a.view(), opt), convergence_error);
}

TEST(SvdValues, RejectsEmptyAndNonFinite)
{
    EXPECT_THROW(svd_values(DenseMatrix(0, 0).view()), contract_error);
    auto a  = DenseMatrix::identity(2);
    a(0, 1) = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW(svd_values(a.view()), contract_error);
}

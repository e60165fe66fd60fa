#ifndef NUCNORM_DENSE_MATRIX_HPP
#define NUCNORM_DENSE_MATRIX_HPP

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <utility>
#include <vector>

#include "nucnorm/errors.hpp"

namespace nucnorm
{

//
// Non-owning column-major view with leading dimension `ld`. Views are how the
// kernels address trailing blocks of the working matrix without copying.
//
template <typename Scalar>
class basic_matrix_view
{
public:
    using value_type = std::remove_const_t<Scalar>;

    basic_matrix_view() = default;
    basic_matrix_view(Scalar* data, std::size_t rows, std::size_t cols,
                      std::size_t ld)
        : data_(data), rows_(rows), cols_(cols), ld_(ld)
    {
        assert(ld_ >= rows_ || cols_ == 0);
    }

    // non-const view converts to const view
    template <typename Other>
        requires std::is_same_v<Scalar, const Other>
    basic_matrix_view(const basic_matrix_view<Other>& other)
        : data_(other.data()), rows_(other.rows()), cols_(other.cols()),
          ld_(other.ld())
    {
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t ld() const noexcept { return ld_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }
    Scalar* data() const noexcept { return data_; }

    Scalar& operator()(std::size_t i, std::size_t j) const noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[i + j * ld_];
    }

    Scalar* col_ptr(std::size_t j) const noexcept { return data_ + j * ld_; }
    std::span<Scalar> col(std::size_t j) const noexcept
    {
        return {col_ptr(j), rows_};
    }

    basic_matrix_view block(std::size_t row0, std::size_t col0,
                            std::size_t nrows, std::size_t ncols) const
    {
        assert(row0 + nrows <= rows_ && col0 + ncols <= cols_);
        return {data_ + row0 + col0 * ld_, nrows, ncols, ld_};
    }

private:
    Scalar* data_       = nullptr;
    std::size_t rows_   = 0;
    std::size_t cols_   = 0;
    std::size_t ld_     = 0;
};

using MatrixView      = basic_matrix_view<double>;
using ConstMatrixView = basic_matrix_view<const double>;

//
// Owning column-major real matrix. The only array type of the library.
//
class DenseMatrix
{
public:
    DenseMatrix() = default;
    DenseMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), cols_(cols), data_(rows * cols, 0.0)
    {
    }
    DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data))
    {
        if (data_.size() != rows_ * cols_)
        {
            throw contract_error("DenseMatrix: data length " +
                                 std::to_string(data_.size()) +
                                 " does not match shape " +
                                 shape_str(rows_, cols_));
        }
    }
    explicit DenseMatrix(ConstMatrixView v) : DenseMatrix(v.rows(), v.cols())
    {
        for (std::size_t j = 0; j < cols_; ++j)
        {
            std::copy_n(v.col_ptr(j), rows_, col_ptr(j));
        }
    }

    // Row-wise literal, convenient for tests: {{1, 2}, {3, 4}}.
    static DenseMatrix
    from_rows(std::initializer_list<std::initializer_list<double>> rows)
    {
        const std::size_t m = rows.size();
        const std::size_t n = m ? rows.begin()->size() : 0;
        DenseMatrix a(m, n);
        std::size_t i = 0;
        for (const auto& r : rows)
        {
            if (r.size() != n)
            {
                throw contract_error("DenseMatrix::from_rows: ragged rows");
            }
            std::size_t j = 0;
            for (double x : r)
            {
                a(i, j++) = x;
            }
            ++i;
        }
        return a;
    }

    static DenseMatrix identity(std::size_t n)
    {
        DenseMatrix a(n, n);
        for (std::size_t i = 0; i < n; ++i)
        {
            a(i, i) = 1.0;
        }
        return a;
    }

    static DenseMatrix diagonal(std::span<const double> d, std::size_t rows,
                                std::size_t cols)
    {
        DenseMatrix a(rows, cols);
        for (std::size_t i = 0; i < std::min({rows, cols, d.size()}); ++i)
        {
            a(i, i) = d[i];
        }
        return a;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t i, std::size_t j) noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[i + j * rows_];
    }
    double operator()(std::size_t i, std::size_t j) const noexcept
    {
        assert(i < rows_ && j < cols_);
        return data_[i + j * rows_];
    }

    double* col_ptr(std::size_t j) noexcept { return data_.data() + j * rows_; }
    const double* col_ptr(std::size_t j) const noexcept
    {
        return data_.data() + j * rows_;
    }

    std::span<double> values() noexcept { return data_; }
    std::span<const double> values() const noexcept { return data_; }

    MatrixView view() noexcept { return {data_.data(), rows_, cols_, rows_}; }
    ConstMatrixView view() const noexcept
    {
        return {data_.data(), rows_, cols_, rows_};
    }
    operator MatrixView() noexcept { return view(); }
    operator ConstMatrixView() const noexcept { return view(); }

    MatrixView block(std::size_t r0, std::size_t c0, std::size_t nr,
                     std::size_t nc)
    {
        return view().block(r0, c0, nr, nc);
    }
    ConstMatrixView block(std::size_t r0, std::size_t c0, std::size_t nr,
                          std::size_t nc) const
    {
        return view().block(r0, c0, nr, nc);
    }

    DenseMatrix transpose() const
    {
        DenseMatrix t(cols_, rows_);
        for (std::size_t j = 0; j < cols_; ++j)
        {
            for (std::size_t i = 0; i < rows_; ++i)
            {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    bool all_finite() const noexcept
    {
        return std::all_of(data_.begin(), data_.end(),
                           [](double x) { return std::isfinite(x); });
    }

    friend bool operator==(const DenseMatrix&, const DenseMatrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

} // namespace nucnorm

#endif // NUCNORM_DENSE_MATRIX_HPP

#ifndef NUCNORM_MATRIX_IO_HPP
#define NUCNORM_MATRIX_IO_HPP

#include <array>
#include <bit>
#include <cerrno>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "nucnorm/dense_matrix.hpp"
#include "nucnorm/errors.hpp"

namespace nucnorm
{

//
// Binary matrix file, all fields little-endian:
//   "RNNM" | version u32 | rows u64 | cols u64 | rows*cols f64, column-major
//
inline constexpr std::array<char, 4> matrix_file_magic = {'R', 'N', 'N', 'M'};
inline constexpr std::uint32_t matrix_file_version     = 1;
inline constexpr std::size_t matrix_file_header_size   = 4 + 4 + 8 + 8;

namespace detail
{

template <typename U>
void put_le(std::string& out, U value)
{
    for (std::size_t i = 0; i < sizeof(U); ++i)
    {
        out.push_back(static_cast<char>((value >> (8 * i)) & 0xffu));
    }
}

template <typename U>
U get_le(const char* p)
{
    U value = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i)
    {
        value |= static_cast<U>(static_cast<unsigned char>(p[i])) << (8 * i);
    }
    return value;
}

} // namespace detail

inline std::string encode_matrix(const DenseMatrix& a)
{
    std::string out;
    out.reserve(matrix_file_header_size + 8 * a.size());
    out.append(matrix_file_magic.data(), matrix_file_magic.size());
    detail::put_le<std::uint32_t>(out, matrix_file_version);
    detail::put_le<std::uint64_t>(out, a.rows());
    detail::put_le<std::uint64_t>(out, a.cols());
    for (double x : a.values())
    {
        detail::put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(x));
    }
    return out;
}

inline DenseMatrix decode_matrix(std::string_view bytes)
{
    if (bytes.size() < matrix_file_header_size)
    {
        throw io_error("matrix file: truncated header");
    }
    if (std::memcmp(bytes.data(), matrix_file_magic.data(), 4) != 0)
    {
        throw io_error("matrix file: bad magic (expected RNNM)");
    }
    const auto version = detail::get_le<std::uint32_t>(bytes.data() + 4);
    if (version != matrix_file_version)
    {
        throw io_error("matrix file: unsupported version " + std::to_string(version));
    }
    const auto rows = detail::get_le<std::uint64_t>(bytes.data() + 8);
    const auto cols = detail::get_le<std::uint64_t>(bytes.data() + 16);
    if (rows == 0 || cols == 0)
    {
        throw io_error("matrix file: empty matrix " + shape_str(rows, cols));
    }
    const std::uint64_t payload = bytes.size() - matrix_file_header_size;
    if (rows > payload / 8 / cols)
    {
        throw io_error("matrix file: payload too short for " + shape_str(rows, cols));
    }
    if (rows * cols * 8 != payload)
    {
        throw io_error("matrix file: payload is " + std::to_string(payload) +
                       " bytes, expected " + std::to_string(rows * cols * 8));
    }
    std::vector<double> data(rows * cols);
    const char* p = bytes.data() + matrix_file_header_size;
    for (std::size_t i = 0; i < data.size(); ++i, p += 8)
    {
        data[i] = std::bit_cast<double>(detail::get_le<std::uint64_t>(p));
        if (!std::isfinite(data[i]))
        {
            throw io_error("matrix file: non-finite entry at index " + std::to_string(i));
        }
    }
    return DenseMatrix(rows, cols, std::move(data));
}

inline void write_matrix_file(const std::filesystem::path& path, const DenseMatrix& a)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    const std::string bytes = encode_matrix(a);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
    {
        throw io_error("cannot write " + path.string());
    }
}

inline DenseMatrix read_matrix_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        throw io_error("cannot open " + path.string());
    }
    const std::string bytes{std::istreambuf_iterator<char>(in), {}};
    return decode_matrix(bytes);
}

// %.17g round-trips every finite double exactly.
inline std::string format_real(double x)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

inline void write_values_csv(std::ostream& out, std::span<const double> values)
{
    for (double v : values)
    {
        out << format_real(v) << '\n';
    }
}

inline void write_values_csv(const std::filesystem::path& path,
                             std::span<const double> values)
{
    std::ofstream out(path, std::ios::trunc);
    write_values_csv(out, values);
    if (!out)
    {
        throw io_error("cannot write " + path.string());
    }
}

// One value per line; blank lines are skipped.
inline std::vector<double> read_values_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
    {
        throw io_error("cannot open " + path.string());
    }
    std::vector<double> values;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line))
    {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos)
        {
            continue;
        }
        const char* begin = line.c_str();
        char* end         = nullptr;
        errno             = 0;
        const double v    = std::strtod(begin, &end);
        while (*end == ' ' || *end == '\t' || *end == '\r' || *end == ',')
        {
            ++end;
        }
        if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(v))
        {
            throw io_error(path.string() + ":" + std::to_string(lineno) +
                           ": not a real number: '" + line + "'");
        }
        values.push_back(v);
    }
    return values;
}

} // namespace nucnorm

#endif // NUCNORM_MATRIX_IO_HPP

#ifndef NUCNORM_ERRORS_HPP
#define NUCNORM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nucnorm
{

// Caller broke a documented precondition (shapes, ranges, ordering).
class contract_error : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

// An iterative kernel hit its iteration cap without converging.
class convergence_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

// Malformed or unreadable matrix / CSV file.
class io_error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

inline std::string shape_str(std::size_t rows, std::size_t cols)
{
    return std::to_string(rows) + "x" + std::to_string(cols);
}

} // namespace nucnorm

#endif // NUCNORM_ERRORS_HPP

#include "polyret/error.hpp"

#include <utility>

namespace polyret {

namespace {

std::string located(std::string const &source, std::size_t line, std::string const &message)
{
    if (line == 0) {
        return source + ": " + message;
    }
    return source + ":" + std::to_string(line) + ": " + message;
}

} // namespace

DataError::DataError(std::string source, std::size_t line, std::string const &message)
    : Error(located(source, line, message)), source_(std::move(source)), line_(line)
{
}

DataError::DataError(std::string const &message) : Error(message) {}

DependencyError::DependencyError(std::string stage, std::string const &message)
    : DataError(message), stage_(std::move(stage))
{
}

} // namespace polyret

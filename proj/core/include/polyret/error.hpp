#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace polyret {

/// Base class for every error the library throws on purpose.
class Error : public std::runtime_error {
   public:
    using std::runtime_error::runtime_error;
};

/// Caller passed an argument outside an operation's domain (bad weights,
/// negative sample counts, unknown enum spellings).
class InvalidArgument : public Error {
   public:
    using Error::Error;
};

/// Input data violates its format or an invariant. Carries the source
/// name and 1-based line number when one applies (0 otherwise).
class DataError : public Error {
   public:
    DataError(std::string source, std::size_t line, std::string const &message);
    explicit DataError(std::string const &message);

    [[nodiscard]] std::string const &source() const noexcept { return source_; }
    [[nodiscard]] std::size_t line() const noexcept { return line_; }

   private:
    std::string source_;
    std::size_t line_ = 0;
};

/// A pipeline stage ran before the artifact it depends on exists.
class DependencyError : public DataError {
   public:
    DependencyError(std::string stage, std::string const &message);

    [[nodiscard]] std::string const &required_stage() const noexcept { return stage_; }

   private:
    std::string stage_;
};

/// External scorer violated the wire protocol or could not be reached.
class ProtocolError : public Error {
   public:
    using Error::Error;
};

} // namespace polyret

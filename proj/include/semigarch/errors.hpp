#ifndef SEMIGARCH_ERRORS_HPP
#define SEMIGARCH_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace semigarch {

/// Invalid run configuration; the CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
  public:
    explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested drift construction has no feasible constants.
class InfeasibleDriftError : public std::invalid_argument {
  public:
    explicit InfeasibleDriftError(const std::string& what) : std::invalid_argument(what) {}
};

/// A declared contract was violated by a user-supplied callable.
class ContractViolation : public std::runtime_error {
  public:
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

/// Not enough data points to fit the requested model.
class InsufficientDataError : public std::runtime_error {
  public:
    explicit InsufficientDataError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace semigarch

#endif

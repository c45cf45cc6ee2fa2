#ifndef GRAPHROB_COMMON_HPP
#define GRAPHROB_COMMON_HPP

#include <cstdint>
#include <stdexcept>
#include <string>

namespace graphrob {

using NodeId = std::uint32_t;

// Exit-code categories used by the CLI: usage 1, data 2, runtime 3.
enum class ErrorKind { Usage = 1, Data = 2, Runtime = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& msg)
        : std::runtime_error(msg), kind_(kind) {}

    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(ErrorKind::Usage, msg) {}
};

class DataError : public Error {
public:
    explicit DataError(const std::string& msg) : Error(ErrorKind::Data, msg) {}
};

// Iterative solver failed to reach tolerance; carries the last residual.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(ErrorKind::Runtime, msg), residual_(residual) {}

    double residual() const { return residual_; }

private:
    double residual_;
};

// Homophily tuning ran out of eligible swaps; carries the best gap reached.
class StallError : public Error {
public:
    StallError(const std::string& msg, long long best_delta)
        : Error(ErrorKind::Runtime, msg), best_delta_(best_delta) {}

    long long best_delta() const { return best_delta_; }

private:
    long long best_delta_;
};

}  // namespace graphrob

#endif

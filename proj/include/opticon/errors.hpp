#pragma once

#include <stdexcept>
#include <string>

namespace opticon {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Initial state lies outside the feasible zone B.
class InfeasibleStart : public std::runtime_error {
public:
    InfeasibleStart() : std::runtime_error("infeasible initial state") {}
    explicit InfeasibleStart(const std::string& what) : std::runtime_error(what) {}
};

/// Horizon t_f does not exceed the reaching time of the optimal control.
class HorizonError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Adaptive step size collapsed below the representable minimum.
class IntegrationFailure : public std::runtime_error {
public:
    IntegrationFailure(const std::string& what, double last_time)
        : std::runtime_error(what), last_time_(last_time) {}
    double last_time() const noexcept { return last_time_; }

private:
    double last_time_;
};

/// A brute-force oracle did not converge within its iteration budget.
class OracleFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed scenario configuration or artifact file.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A pipeline stage needs the output of an earlier stage that is not there.
class MissingArtifact : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace opticon

#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace heightgrowth {

/// Input outside the mathematical domain of an operation (non-prime p,
/// Re(s) left of a pole, singular matrix, ...). The CLI maps it to exit 1.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class SingularMatrixError : public DomainError {
public:
    SingularMatrixError() : DomainError("matrix is singular") {}
};

/// A configurable work or memory budget would be exceeded. Carries the
/// estimate that tripped the guard. The CLI maps it to exit 2.
class BudgetError : public std::runtime_error {
public:
    BudgetError(const std::string& what, double estimate, double limit)
        : std::runtime_error(what + " (estimated " + fmt_num(estimate) + ", limit " +
                             fmt_num(limit) + ")"),
          estimate_(estimate),
          limit_(limit) {}

    double estimate() const noexcept { return estimate_; }
    double limit() const noexcept { return limit_; }

private:
    static std::string fmt_num(double v) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6g", v);
        return buf;
    }

    double estimate_;
    double limit_;
};

/// Adaptive quadrature could not reach its tolerance within the cell budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace heightgrowth

#pragma once

#include <stdexcept>
#include <string>

namespace bergman {

// A requested approximation regime does not cover the given (k, t).
struct RegimeOutOfRange : std::domain_error {
  explicit RegimeOutOfRange(const std::string& what) : std::domain_error(what) {}
};

// A certified series could not reach the requested tolerance within budget.
struct TermBudgetExceeded : std::runtime_error {
  explicit TermBudgetExceeded(const std::string& what) : std::runtime_error(what) {}
};

// A signed sum lost too many digits to cancellation to certify anything.
struct CancellationLoss : std::runtime_error {
  explicit CancellationLoss(const std::string& what) : std::runtime_error(what) {}
};

// The Poisson-side series is useless in the requested range.
struct SlowConvergence : std::runtime_error {
  explicit SlowConvergence(const std::string& what) : std::runtime_error(what) {}
};

// A model that is provably convex/unimodal failed a sanity scan.
struct ConvexityViolation : std::logic_error {
  explicit ConvexityViolation(const std::string& what) : std::logic_error(what) {}
};

// Surface-bound formulas invoked outside their assumption set.
struct InapplicableAssumptions : std::domain_error {
  explicit InapplicableAssumptions(const std::string& what) : std::domain_error(what) {}
};

}  // namespace bergman

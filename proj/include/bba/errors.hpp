#pragma once

#include <stdexcept>
#include <string>

namespace bba {

/// A query would push the ledger past its budget cap. Caught at the attack
/// loop boundary and converted into a failure outcome.
class BudgetExceededError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Covariance factorization failed even after the maximum jitter level.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Remote victim returned a malformed or failed response. Never turned into
/// a fabricated logit; the attack on the current instance aborts.
class ProtocolError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No position admits a substitution (all candidate sets are singletons).
class NothingToAttackError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bba

#include "ctximl/cost.h"

#include "ctximl/errors.h"

namespace ctximl {

std::uint64_t TokenCost(std::uint64_t n_train, std::uint64_t n_inf) {
  if (n_train == 0) throw ContractError("token_cost: n_train must be at least 1");
  return n_train * (n_train - 1) / 2 + n_train * n_inf;
}

void CostLedger::Record(std::uint64_t n_train, std::uint64_t n_inf) {
  token_connections_.fetch_add(TokenCost(n_train, n_inf), std::memory_order_relaxed);
  evaluation_calls_.fetch_add(1, std::memory_order_relaxed);
}

LedgerSnapshot CostLedger::Snapshot() const {
  return {token_connections_.load(std::memory_order_relaxed),
          evaluation_calls_.load(std::memory_order_relaxed)};
}

void CostLedger::Reset() {
  token_connections_.store(0, std::memory_order_relaxed);
  evaluation_calls_.store(0, std::memory_order_relaxed);
}

}  // namespace ctximl

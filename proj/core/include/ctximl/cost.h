#ifndef CTXIML_COST_H_
#define CTXIML_COST_H_

#include <atomic>
#include <cstdint>

namespace ctximl {

// Number of pairwise attention interactions of one in-context forward pass:
// training tokens attend to each other, inference tokens attend to training
// tokens only. C(n_train, 2) + n_train * n_inf. Requires n_train >= 1.
std::uint64_t TokenCost(std::uint64_t n_train, std::uint64_t n_inf);

struct LedgerSnapshot {
  std::uint64_t token_connections = 0;
  std::uint64_t evaluation_calls = 0;

  LedgerSnapshot operator-(const LedgerSnapshot& other) const {
    return {token_connections - other.token_connections,
            evaluation_calls - other.evaluation_calls};
  }
  LedgerSnapshot operator+(const LedgerSnapshot& other) const {
    return {token_connections + other.token_connections,
            evaluation_calls + other.evaluation_calls};
  }
  bool operator==(const LedgerSnapshot&) const = default;
};

// Running total of forward-pass cost. Thread-safe; never decreases except
// through Reset().
class CostLedger {
 public:
  CostLedger() = default;
  CostLedger(const CostLedger&) = delete;
  CostLedger& operator=(const CostLedger&) = delete;

  void Record(std::uint64_t n_train, std::uint64_t n_inf);
  LedgerSnapshot Snapshot() const;
  void Reset();

 private:
  std::atomic<std::uint64_t> token_connections_{0};
  std::atomic<std::uint64_t> evaluation_calls_{0};
};

}  // namespace ctximl

#endif  // CTXIML_COST_H_

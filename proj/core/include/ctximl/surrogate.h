#ifndef CTXIML_SURROGATE_H_
#define CTXIML_SURROGATE_H_

#include <string>
#include <vector>

#include "ctximl/dataset.h"
#include "ctximl/errors.h"

namespace ctximl {

// Rank-deficient design; `columns` lists the design columns that take part
// in the null space.
class RankDeficiencyError : public SolverError {
 public:
  RankDeficiencyError(const std::string& what, std::vector<Eigen::Index> columns)
      : SolverError(what), columns_(std::move(columns)) {}
  const std::vector<Eigen::Index>& columns() const { return columns_; }

 private:
  std::vector<Eigen::Index> columns_;
};

struct WlsOptions {
  // Solve (A^T W A + ridge I) x = A^T W b instead of failing when the design
  // is rank deficient.
  bool allow_ridge_fallback = false;
  double ridge = 1e-10;
  // Singular values below rank_tolerance * sigma_max count as zero.
  double rank_tolerance = 1e-10;
};

struct WlsFit {
  Matrix coefficients;  // k x n_targets
  // Condition number of the normal matrix A^T W A.
  double condition_number = 1.0;
  Eigen::Index rank = 0;
  bool ridge_fallback = false;
};

// argmin_x sum_m w_m ||a_m x - b_m||^2 for every target column, solved via a
// singular value decomposition of sqrt(W) A.
WlsFit WeightedLeastSquares(const Matrix& design, const Vector& weights, const Matrix& targets,
                            const WlsOptions& options = {});

struct SurrogateFit {
  Vector base_value;  // phi_0 per target column
  Matrix phi;         // p x n_targets
  double condition_number = 1.0;
  bool ridge_fallback = false;
};

// Kernel SHAP surrogate: regresses coalition values on the binary coalition
// design under the equality constraints phi_0 = v_empty and
// sum_j phi_j = v_full - v_empty (the last coefficient is eliminated by
// substitution). Boundary coalitions never enter the design.
//
// design: M x p in {0,1}; weights: M positive; values: M x n_targets.
// Throws RankDeficiencyError("insufficient coalition diversity ...") naming
// the unidentifiable features unless ridge fallback is enabled.
SurrogateFit SolveWeightedSurrogate(const Matrix& design, const Vector& weights,
                                    const Matrix& values, const Vector& v_empty,
                                    const Vector& v_full, const WlsOptions& options = {});

}  // namespace ctximl

#endif  // CTXIML_SURROGATE_H_

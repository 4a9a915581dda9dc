#pragma once

#include <vector>

#include "imbal/dataset.hpp"

namespace imbal {

// Uniform prediction surface shared by every learner and ensemble so the
// post-processing stages and the benchmark can stay model-agnostic.
class Model {
 public:
  virtual ~Model() = default;

  // Rows sum to 1 within 1e-6. Deterministic.
  virtual Matrix predict_proba(const Matrix& features) const = 0;
  virtual int n_classes() const = 0;

  // Argmax of predict_proba; ties resolved toward the lower class id.
  // Ensembles override this with their vote rule.
  virtual std::vector<int> predict(const Matrix& features) const;
};

// Shared argmax with lower-id tie-break, also used on raw probability rows.
int argmax_class(const Eigen::Ref<const Eigen::RowVectorXd>& row);

}  // namespace imbal

#pragma once

#include <string>
#include <vector>

#include "bscope/mma/model.h"

namespace bscope::mma {

struct GradcheckEntry {
  std::string parameter;
  // max_i |a_i - n_i| / max(max_i |a_i|, max_i |n_i|, floor)
  double max_relative_error = 0.0;
  // max_i |a_i - n_i| / max(|a_i|, |n_i|, floor); dominated by round-off on
  // entries whose gradient is near zero.
  double max_entry_relative_error = 0.0;
  double max_abs_error = 0.0;
  double max_abs_gradient = 0.0;
};

struct GradcheckResult {
  std::vector<GradcheckEntry> entries;  // one per parameter tensor
  double max_relative_error() const;
};

// Compares the analytic gradient a with the central difference n of the
// evaluation-mode loss weight * CE(logits, target), tensor by tensor.
// Parameter values are restored afterwards.
GradcheckResult gradcheck(MmaModel& model, const EncodedInput& input, Label target,
                          double weight = 1.0, double step = 1e-5, double floor = 1e-8);

}  // namespace bscope::mma

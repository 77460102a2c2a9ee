#include "bscope/mma/gradcheck.h"

#include <algorithm>
#include <cmath>

namespace bscope::mma {
namespace {

double eval_loss(const MmaModel& model, const EncodedInput& input, int target, double weight) {
  nn::Tape t(false);
  auto f = model.forward(t, input, Mode::kEval, nullptr);
  return nn::cross_entropy(f.logits, target, weight).value()(0, 0);
}

}  // namespace

double GradcheckResult::max_relative_error() const {
  double m = 0.0;
  for (const auto& e : entries) m = std::max(m, e.max_relative_error);
  return m;
}

GradcheckResult gradcheck(MmaModel& model, const EncodedInput& input, Label target, double weight,
                          double step, double floor) {
  const int y = target == Label::kBaseline ? 0 : 1;
  model.parameters().zero_grad();
  {
    nn::Tape t;
    auto f = model.forward(t, input, Mode::kEval, nullptr);
    t.backward(nn::cross_entropy(f.logits, y, weight));
  }
  GradcheckResult result;
  for (auto& p : model.parameters()) {
    GradcheckEntry e;
    e.parameter = p.name;
    double max_numeric = 0.0;
    for (Eigen::Index i = 0; i < p.value.size(); ++i) {
      double& x = p.value.data()[i];
      const double saved = x;
      x = saved + step;
      const double up = eval_loss(model, input, y, weight);
      x = saved - step;
      const double down = eval_loss(model, input, y, weight);
      x = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double analytic = p.grad.data()[i];
      const double diff = std::abs(analytic - numeric);
      const double denom = std::max({std::abs(analytic), std::abs(numeric), floor});
      e.max_entry_relative_error = std::max(e.max_entry_relative_error, diff / denom);
      e.max_abs_error = std::max(e.max_abs_error, diff);
      e.max_abs_gradient = std::max(e.max_abs_gradient, std::abs(analytic));
      max_numeric = std::max(max_numeric, std::abs(numeric));
    }
    e.max_relative_error = e.max_abs_error / std::max({e.max_abs_gradient, max_numeric, floor});
    result.entries.push_back(std::move(e));
  }
  model.parameters().zero_grad();
  return result;
}

}  // namespace bscope::mma

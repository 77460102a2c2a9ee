#include "bscope/nn/tape.h"

#include <utility>

#include "bscope/error.h"

namespace bscope::nn {

Parameter& ParameterStore::add(std::string name, Eigen::Index rows,
                               Eigen::Index cols) {
  Parameter& p = params_.emplace_back();
  p.name = std::move(name);
  p.value = Matrix::Zero(rows, cols);
  p.grad = Matrix::Zero(rows, cols);
  return p;
}

Parameter* ParameterStore::find(std::string_view name) {
  for (auto& p : params_) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.zero_grad();
}

std::vector<Matrix> ParameterStore::snapshot() const {
  std::vector<Matrix> out;
  out.reserve(params_.size());
  for (const auto& p : params_) out.push_back(p.value);
  return out;
}

void ParameterStore::restore(const std::vector<Matrix>& values) {
  if (values.size() != params_.size()) {
    throw InvalidArgument("parameter snapshot has wrong tensor count");
  }
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i].rows() != params_[i].value.rows() ||
        values[i].cols() != params_[i].value.cols()) {
      throw InvalidArgument("parameter snapshot shape mismatch for " +
                            params_[i].name);
    }
    params_[i].value = values[i];
  }
}

Var Tape::constant(Matrix value) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  return {this, nodes_.size() - 1};
}

Var Tape::param(Parameter& p) {
  Node& n = nodes_.emplace_back();
  n.value = p.value;
  n.param = recording_ ? &p : nullptr;
  n.needs_grad = recording_;
  return {this, nodes_.size() - 1};
}

Var Tape::push(Matrix value, bool needs_grad, Backward backward) {
  Node& n = nodes_.emplace_back();
  n.value = std::move(value);
  n.needs_grad = recording_ && needs_grad;
  if (n.needs_grad) n.backward = std::move(backward);
  return {this, nodes_.size() - 1};
}

void Tape::backward(const Var& loss) {
  if (!recording_) throw InvalidArgument("backward on a non-recording tape");
  if (loss.tape != this) throw InvalidArgument("loss belongs to another tape");
  Node& root = nodes_[loss.id];
  if (root.value.size() != 1) {
    throw InvalidArgument("backward expects a scalar loss");
  }
  if (!root.needs_grad) return;
  root.grad = Matrix::Ones(1, 1);
  root.has_grad = true;
  for (std::size_t i = loss.id + 1; i-- > 0;) {
    Node& n = nodes_[i];
    if (!n.has_grad) continue;
    if (n.backward) n.backward(*this, i);
    if (n.param != nullptr) n.param->grad += n.grad;
  }
}

}  // namespace bscope::nn

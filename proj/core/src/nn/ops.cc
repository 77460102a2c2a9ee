#include "bscope/nn/ops.h"

#include <cmath>
#include <numbers>
#include <string>

#include "bscope/error.h"

namespace bscope::nn {
namespace {

void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(std::string("shape mismatch in ") + what);
}

}  // namespace

Var matmul(Var a, Var b) {
  require(a.cols() == b.rows(), "matmul");
  Tape& t = *a.tape;
  Matrix out = a.value() * b.value();
  return t.push(std::move(out), t.needs_grad(a) || t.needs_grad(b),
                [a, b](Tape& t, std::size_t self) {
                  const Matrix& g = t.grad(self);
                  if (t.needs_grad(a)) t.accumulate(a, g * b.value().transpose());
                  if (t.needs_grad(b)) t.accumulate(b, a.value().transpose() * g);
                });
}

Var add(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "add");
  Tape& t = *a.tape;
  return t.push(a.value() + b.value(), t.needs_grad(a) || t.needs_grad(b),
                [a, b](Tape& t, std::size_t self) {
                  t.accumulate(a, t.grad(self));
                  t.accumulate(b, t.grad(self));
                });
}

Var sub(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "sub");
  Tape& t = *a.tape;
  return t.push(a.value() - b.value(), t.needs_grad(a) || t.needs_grad(b),
                [a, b](Tape& t, std::size_t self) {
                  t.accumulate(a, t.grad(self));
                  t.accumulate(b, -t.grad(self));
                });
}

Var add_row(Var a, Var row) {
  require(row.rows() == 1 && row.cols() == a.cols(), "add_row");
  Tape& t = *a.tape;
  Matrix out = a.value().rowwise() + row.value().row(0);
  return t.push(std::move(out), t.needs_grad(a) || t.needs_grad(row),
                [a, row](Tape& t, std::size_t self) {
                  const Matrix& g = t.grad(self);
                  t.accumulate(a, g);
                  t.accumulate(row, g.colwise().sum());
                });
}

Var mul(Var a, Var b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "mul");
  Tape& t = *a.tape;
  Matrix out = a.value().cwiseProduct(b.value());
  return t.push(std::move(out), t.needs_grad(a) || t.needs_grad(b),
                [a, b](Tape& t, std::size_t self) {
                  const Matrix& g = t.grad(self);
                  if (t.needs_grad(a)) t.accumulate(a, g.cwiseProduct(b.value()));
                  if (t.needs_grad(b)) t.accumulate(b, g.cwiseProduct(a.value()));
                });
}

Var scale_rows(Var a, Var w) {
  require(w.cols() == 1 && w.rows() == a.rows(), "scale_rows");
  Tape& t = *a.tape;
  Matrix out = w.value().col(0).asDiagonal() * a.value();
  return t.push(std::move(out), t.needs_grad(a) || t.needs_grad(w),
                [a, w](Tape& t, std::size_t self) {
                  const Matrix& g = t.grad(self);
                  if (t.needs_grad(a)) {
                    t.accumulate(a, w.value().col(0).asDiagonal() * g);
                  }
                  if (t.needs_grad(w)) {
                    t.accumulate(w, g.cwiseProduct(a.value()).rowwise().sum());
                  }
                });
}

Var scale(Var a, double s) {
  Tape& t = *a.tape;
  return t.push(a.value() * s, t.needs_grad(a),
                [a, s](Tape& t, std::size_t self) {
                  t.accumulate(a, t.grad(self) * s);
                });
}

Var transpose(Var a) {
  Tape& t = *a.tape;
  return t.push(a.value().transpose(), t.needs_grad(a),
                [a](Tape& t, std::size_t self) {
                  t.accumulate(a, t.grad(self).transpose());
                });
}

Var tanh(Var a) {
  Tape& t = *a.tape;
  Matrix out = a.value().array().tanh().matrix();
  return t.push(out, t.needs_grad(a), [a](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    t.accumulate(a, t.grad(self).cwiseProduct(
                        (1.0 - y.array().square()).matrix()));
  });
}

Var sigmoid(Var a) {
  Tape& t = *a.tape;
  Matrix out = (1.0 / (1.0 + (-a.value().array()).exp())).matrix();
  return t.push(out, t.needs_grad(a), [a](Tape& t, std::size_t self) {
    const Matrix& y = t.value(self);
    t.accumulate(a, t.grad(self).cwiseProduct(
                        (y.array() * (1.0 - y.array())).matrix()));
  });
}

Var gelu(Var a) {
  Tape& t = *a.tape;
  const double inv_sqrt2 = 1.0 / std::numbers::sqrt2;
  Matrix out = a.value().unaryExpr([inv_sqrt2](double x) {
    return 0.5 * x * (1.0 + std::erf(x * inv_sqrt2));
  });
  return t.push(std::move(out), t.needs_grad(a),
                [a, inv_sqrt2](Tape& t, std::size_t self) {
                  const double inv_sqrt_2pi =
                      1.0 / std::sqrt(2.0 * std::numbers::pi);
                  Matrix d = a.value().unaryExpr([&](double x) {
                    return 0.5 * (1.0 + std::erf(x * inv_sqrt2)) +
                           x * inv_sqrt_2pi * std::exp(-0.5 * x * x);
                  });
                  t.accumulate(a, t.grad(self).cwiseProduct(d));
                });
}

Var slice_rows(Var a, Eigen::Index begin, Eigen::Index count) {
  require(begin >= 0 && count >= 0 && begin + count <= a.rows(), "slice_rows");
  Tape& t = *a.tape;
  Matrix out = a.value().middleRows(begin, count);
  return t.push(std::move(out), t.needs_grad(a),
                [a, begin, count](Tape& t, std::size_t self) {
                  Matrix g = Matrix::Zero(a.rows(), a.cols());
                  g.middleRows(begin, count) = t.grad(self);
                  t.accumulate(a, g);
                });
}

Var slice_cols(Var a, Eigen::Index begin, Eigen::Index count) {
  require(begin >= 0 && count >= 0 && begin + count <= a.cols(), "slice_cols");
  Tape& t = *a.tape;
  Matrix out = a.value().middleCols(begin, count);
  return t.push(std::move(out), t.needs_grad(a),
                [a, begin, count](Tape& t, std::size_t self) {
                  Matrix g = Matrix::Zero(a.rows(), a.cols());
                  g.middleCols(begin, count) = t.grad(self);
                  t.accumulate(a, g);
                });
}

Var concat_rows(std::span<const Var> parts) {
  require(!parts.empty(), "concat_rows");
  Tape& t = *parts[0].tape;
  const Eigen::Index cols = parts[0].cols();
  Eigen::Index rows = 0;
  bool needs = false;
  for (const Var& p : parts) {
    require(p.cols() == cols, "concat_rows");
    rows += p.rows();
    needs = needs || t.needs_grad(p);
  }
  Matrix out(rows, cols);
  Eigen::Index r = 0;
  for (const Var& p : parts) {
    out.middleRows(r, p.rows()) = p.value();
    r += p.rows();
  }
  std::vector<Var> saved(parts.begin(), parts.end());
  return t.push(std::move(out), needs,
                [saved = std::move(saved)](Tape& t, std::size_t self) {
                  const Matrix& g = t.grad(self);
                  Eigen::Index r = 0;
                  for (const Var& p : saved) {
                    t.accumulate(p, g.middleRows(r, p.rows()));
                    r += p.rows();
                  }
                });
}

Var concat_cols(std::span<const Var> parts) {
  require(!parts.empty(), "concat_cols");
  Tape& t = *parts[0].tape;
  const Eigen::Index rows = parts[0].rows();
  Eigen::Index cols = 0;
  bool needs = false;
  for (const Var& p : parts) {
    require(p.rows() == rows, "concat_cols");
    cols += p.cols();
    needs = needs || t.needs_grad(p);
  }
  Matrix out(rows, cols);
  Eigen::Index c = 0;
  for (const Var& p : parts) {
    out.middleCols(c, p.cols()) = p.value();
    c += p.cols();
  }
  std::vector<Var> saved(parts.begin(), parts.end());
  return t.push(std::move(out), needs,
                [saved = std::move(saved)](Tape& t, std::size_t self) {
                  const Matrix& g = t.grad(self);
                  Eigen::Index c = 0;
                  for (const Var& p : saved) {
                    t.accumulate(p, g.middleCols(c, p.cols()));
                    c += p.cols();
                  }
                });
}

Var masked_softmax(Var scores, std::span<const bool> mask) {
  require(scores.cols() == 1, "masked_softmax");
  const Eigen::Index n = scores.rows();
  require(mask.empty() || static_cast<Eigen::Index>(mask.size()) == n,
          "masked_softmax");
  auto live = [&](Eigen::Index i) {
    return mask.empty() || mask[static_cast<std::size_t>(i)];
  };
  const Matrix& s = scores.value();
  double peak = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    if (live(i)) peak = std::max(peak, s(i, 0));
  }
  if (!std::isfinite(peak)) {
    throw InvalidArgument("softmax over a fully masked axis");
  }
  Matrix out = Matrix::Zero(n, 1);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (live(i)) {
      out(i, 0) = std::exp(s(i, 0) - peak);
      total += out(i, 0);
    }
  }
  out /= total;
  Tape& t = *scores.tape;
  // Masked entries have y = 0, so the Jacobian rows/columns vanish there.
  return t.push(std::move(out), t.needs_grad(scores),
                [scores](Tape& t, std::size_t self) {
                  const Matrix& y = t.value(self);
                  const Matrix& g = t.grad(self);
                  const double dot = y.col(0).dot(g.col(0));
                  t.accumulate(scores,
                               y.cwiseProduct((g.array() - dot).matrix()));
                });
}

Var softmax_rows(Var a) {
  Matrix out = a.value();
  for (Eigen::Index r = 0; r < out.rows(); ++r) {
    const double peak = out.row(r).maxCoeff();
    out.row(r) = (out.row(r).array() - peak).exp().matrix();
    out.row(r) /= out.row(r).sum();
  }
  Tape& t = *a.tape;
  return t.push(std::move(out), t.needs_grad(a),
                [a](Tape& t, std::size_t self) {
                  const Matrix& y = t.value(self);
                  const Matrix& g = t.grad(self);
                  Eigen::VectorXd dots = y.cwiseProduct(g).rowwise().sum();
                  Matrix d = y.cwiseProduct(
                      (g.colwise() - dots).matrix());
                  t.accumulate(a, d);
                });
}

Var layer_norm(Var a, Var gain, Var bias, double eps) {
  require(gain.rows() == 1 && gain.cols() == a.cols() && bias.rows() == 1 &&
              bias.cols() == a.cols(),
          "layer_norm");
  const Matrix& x = a.value();
  const Eigen::Index n = x.rows();
  const double d = static_cast<double>(x.cols());
  Matrix xhat(x.rows(), x.cols());
  Eigen::VectorXd inv_std(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double mean = x.row(r).mean();
    auto centered = x.row(r).array() - mean;
    const double var = centered.square().sum() / d;
    inv_std(r) = 1.0 / std::sqrt(var + eps);
    xhat.row(r) = (centered * inv_std(r)).matrix();
  }
  Matrix out = (xhat.array().rowwise() * gain.value().row(0).array())
                   .rowwise() +
               bias.value().row(0).array();
  Tape& t = *a.tape;
  const bool needs =
      t.needs_grad(a) || t.needs_grad(gain) || t.needs_grad(bias);
  return t.push(
      std::move(out), needs,
      [a, gain, bias, xhat = std::move(xhat), inv_std = std::move(inv_std),
       d](Tape& t, std::size_t self) {
        const Matrix& g = t.grad(self);
        if (t.needs_grad(gain)) {
          t.accumulate(gain, g.cwiseProduct(xhat).colwise().sum());
        }
        if (t.needs_grad(bias)) t.accumulate(bias, g.colwise().sum());
        if (t.needs_grad(a)) {
          Matrix gx = g.array().rowwise() * gain.value().row(0).array();
          Matrix dx(gx.rows(), gx.cols());
          for (Eigen::Index r = 0; r < gx.rows(); ++r) {
            const double mean_g = gx.row(r).mean();
            const double mean_gx = gx.row(r).dot(xhat.row(r)) / d;
            dx.row(r) = inv_std(r) * (gx.row(r).array() - mean_g -
                                      xhat.row(r).array() * mean_gx)
                                         .matrix();
          }
          t.accumulate(a, dx);
        }
      });
}

Var dropout(Var a, double rate, Rng* rng) {
  if (rate <= 0.0 || rng == nullptr) return a;
  const double keep = 1.0 - rate;
  Matrix m(a.rows(), a.cols());
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      m(i, j) = rng->uniform() < keep ? 1.0 / keep : 0.0;
    }
  }
  Tape& t = *a.tape;
  Matrix out = a.value().cwiseProduct(m);
  return t.push(std::move(out), t.needs_grad(a),
                [a, m = std::move(m)](Tape& t, std::size_t self) {
                  t.accumulate(a, t.grad(self).cwiseProduct(m));
                });
}

Var cross_entropy(Var logits, int target, double weight) {
  require(logits.rows() == 1 && target >= 0 && target < logits.cols(),
          "cross_entropy");
  Eigen::RowVectorXd p = softmax(logits.value().row(0));
  Matrix out(1, 1);
  out(0, 0) = -weight * std::log(p(target));
  Tape& t = *logits.tape;
  return t.push(std::move(out), t.needs_grad(logits),
                [logits, target, weight, p](Tape& t, std::size_t self) {
                  Matrix g = p;
                  g(0, target) -= 1.0;
                  t.accumulate(logits, g * (weight * t.grad(self)(0, 0)));
                });
}

Var mix(Var weights, std::span<const Var> mats) {
  require(!mats.empty() && weights.cols() == 1 &&
              weights.rows() == static_cast<Eigen::Index>(mats.size()),
          "mix");
  Tape& t = *weights.tape;
  Matrix out = Matrix::Zero(mats[0].rows(), mats[0].cols());
  bool grad = t.needs_grad(weights);
  for (std::size_t k = 0; k < mats.size(); ++k) {
    require(mats[k].rows() == out.rows() && mats[k].cols() == out.cols(), "mix");
    out += weights.value()(static_cast<Eigen::Index>(k), 0) * mats[k].value();
    grad = grad || t.needs_grad(mats[k]);
  }
  std::vector<Var> parts(mats.begin(), mats.end());
  return t.push(std::move(out), grad,
                [weights, parts](Tape& t, std::size_t self) {
                  const Matrix& g = t.grad(self);
                  if (t.needs_grad(weights)) {
                    Matrix gw(weights.rows(), 1);
                    for (std::size_t k = 0; k < parts.size(); ++k) {
                      gw(static_cast<Eigen::Index>(k), 0) =
                          g.cwiseProduct(parts[k].value()).sum();
                    }
                    t.accumulate(weights, gw);
                  }
                  for (std::size_t k = 0; k < parts.size(); ++k) {
                    t.accumulate(parts[k],
                                 g * weights.value()(static_cast<Eigen::Index>(k), 0));
                  }
                });
}

Var sum(Var a) {
  Matrix out(1, 1);
  out(0, 0) = a.value().sum();
  Tape& t = *a.tape;
  return t.push(std::move(out), t.needs_grad(a),
                [a](Tape& t, std::size_t self) {
                  t.accumulate(a, Matrix::Constant(a.rows(), a.cols(),
                                                   t.grad(self)(0, 0)));
                });
}

Eigen::RowVectorXd softmax(const Eigen::RowVectorXd& x) {
  const double peak = x.maxCoeff();
  Eigen::RowVectorXd e = (x.array() - peak).exp().matrix();
  return e / e.sum();
}

}  // namespace bscope::nn

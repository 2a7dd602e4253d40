//
// retrograph - Copyright 2026 The retrograph Authors.
// SPDX-License-Identifier: Apache-2.0
//

#include "retrograph/numcore/tape.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "retrograph/numcore/functions.hpp"
#include "retrograph/numcore/kernels.hpp"

namespace retrograph::numcore {
namespace {

constexpr double kBceClamp = 1e-12;

void require_same_shape(const Tensor2& a, const Tensor2& b, const char* op) {
  if (!a.same_shape(b)) {
    throw ShapeError(std::string(op) + ": shape mismatch " + a.shape_string() + " vs " +
                     b.shape_string());
  }
}

void axpy(Tensor2& dst, const Tensor2& src, double factor = 1.0) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * s[i];
}

}  // namespace

Var Tape::push(Node node) {
  if (!node.value.all_finite()) {
    throw std::domain_error("non-finite value produced on tape (node " +
                            std::to_string(nodes_.size()) + ")");
  }
  nodes_.push_back(std::move(node));
  return Var{nodes_.size() - 1};
}

const Tape::Node& Tape::node(Var v) const {
  if (v.id >= nodes_.size()) throw TapeError("variable does not belong to this tape");
  return nodes_[v.id];
}

double Tape::scalar(Var v) const {
  const auto& t = node(v).value;
  if (t.rows() != 1 || t.cols() != 1) throw ShapeError("scalar() on " + t.shape_string());
  return t(0, 0);
}

Var Tape::constant(Tensor2 value) {
  Node n;
  n.op = Op::kConstant;
  n.value = std::move(value);
  return push(std::move(n));
}

Var Tape::param(ParamId id) {
  Node n;
  n.op = Op::kParam;
  n.param = id;
  n.needs_grad = true;
  n.value = (*params_)[id].value;
  return push(std::move(n));
}

Var Tape::matmul(Var a, Var b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  Node n;
  n.op = Op::kMatmul;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.value = Tensor2(na.value.rows(), nb.value.cols());
  kernels::matmul(na.value, nb.value, n.value);
  return push(std::move(n));
}

Var Tape::add(Var a, Var b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  require_same_shape(na.value, nb.value, "add");
  Node n;
  n.op = Op::kAdd;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.value = na.value;
  axpy(n.value, nb.value);
  return push(std::move(n));
}

Var Tape::add_row(Var a, Var row) {
  const auto& na = node(a);
  const auto& nr = node(row);
  if (nr.value.rows() != 1 || nr.value.cols() != na.value.cols()) {
    throw ShapeError("add_row: " + nr.value.shape_string() + " onto " + na.value.shape_string());
  }
  Node n;
  n.op = Op::kAddRow;
  n.a = a.id;
  n.b = row.id;
  n.needs_grad = na.needs_grad || nr.needs_grad;
  n.value = na.value;
  for (std::size_t r = 0; r < n.value.rows(); ++r) {
    auto dst = n.value.row(r);
    auto src = nr.value.row(0);
    for (std::size_t c = 0; c < dst.size(); ++c) dst[c] += src[c];
  }
  return push(std::move(n));
}

Var Tape::scale(Var a, double factor) {
  const auto& na = node(a);
  Node n;
  n.op = Op::kScale;
  n.a = a.id;
  n.s0 = factor;
  n.needs_grad = na.needs_grad;
  n.value = na.value;
  for (double& v : n.value.data()) v *= factor;
  return push(std::move(n));
}

Var Tape::mul(Var a, Var b) {
  const auto& na = node(a);
  const auto& nb = node(b);
  require_same_shape(na.value, nb.value, "mul");
  Node n;
  n.op = Op::kMul;
  n.a = a.id;
  n.b = b.id;
  n.needs_grad = na.needs_grad || nb.needs_grad;
  n.value = na.value;
  auto d = n.value.data();
  auto s = nb.value.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] *= s[i];
  return push(std::move(n));
}

Var Tape::concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ShapeError("concat_cols of nothing");
  const std::size_t rows = node(parts[0]).value.rows();
  std::size_t cols = 0;
  bool needs = false;
  std::vector<std::size_t> ids;
  for (Var p : parts) {
    const auto& np = node(p);
    if (np.value.rows() != rows) throw ShapeError("concat_cols: row count mismatch");
    cols += np.value.cols();
    needs = needs || np.needs_grad;
    ids.push_back(p.id);
  }
  Node n;
  n.op = Op::kConcat;
  n.needs_grad = needs;
  n.value = Tensor2(rows, cols);
  std::size_t offset = 0;
  for (Var p : parts) {
    const auto& v = node(p).value;
    for (std::size_t r = 0; r < rows; ++r) {
      std::copy(v.row(r).begin(), v.row(r).end(), n.value.row(r).begin() + offset);
    }
    offset += v.cols();
  }
  n.aux = concat_inputs_.size();
  concat_inputs_.push_back(std::move(ids));
  return push(std::move(n));
}

Var Tape::relu(Var a) {
  const auto& na = node(a);
  Node n;
  n.op = Op::kRelu;
  n.a = a.id;
  n.needs_grad = na.needs_grad;
  n.value = na.value;
  for (double& v : n.value.data()) v = v > 0.0 ? v : 0.0;
  return push(std::move(n));
}

Var Tape::sigmoid(Var a) {
  const auto& na = node(a);
  Node n;
  n.op = Op::kSigmoid;
  n.a = a.id;
  n.needs_grad = na.needs_grad;
  n.value = na.value;
  for (double& v : n.value.data()) v = numcore::sigmoid(v);
  return push(std::move(n));
}

Var Tape::clamp(Var a, double lo, double hi) {
  const auto& na = node(a);
  Node n;
  n.op = Op::kClamp;
  n.a = a.id;
  n.s0 = lo;
  n.s1 = hi;
  n.needs_grad = na.needs_grad;
  n.value = na.value;
  for (double& v : n.value.data()) v = std::clamp(v, lo, hi);
  return push(std::move(n));
}

Var Tape::gather_rows(Var a, std::vector<std::uint32_t> rows) {
  const auto& na = node(a);
  Node n;
  n.op = Op::kGather;
  n.a = a.id;
  n.needs_grad = na.needs_grad;
  n.value = Tensor2(rows.size(), na.value.cols());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r] >= na.value.rows()) throw ShapeError("gather_rows: index out of range");
    auto src = na.value.row(rows[r]);
    std::copy(src.begin(), src.end(), n.value.row(r).begin());
  }
  n.aux = index_.size();
  index_.push_back(std::move(rows));
  return push(std::move(n));
}

Var Tape::propagate(Var h, const Adjacency& adj) {
  const auto& nh = node(h);
  if (adj.nodes() != nh.value.rows()) {
    throw ShapeError("propagate: adjacency over " + std::to_string(adj.nodes()) +
                     " nodes applied to " + nh.value.shape_string());
  }
  Node n;
  n.op = Op::kPropagate;
  n.a = h.id;
  n.needs_grad = nh.needs_grad;
  n.value = nh.value;
  const std::size_t cols = nh.value.cols();
  for (std::size_t v = 0; v < adj.nodes(); ++v) {
    double* dst = n.value.row(v).data();
    for (std::uint32_t e = adj.offsets[v]; e < adj.offsets[v + 1]; ++e) {
      const double* src = nh.value.row(adj.targets[e]).data();
      for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
    }
  }
  n.aux = index_.size();
  index_.push_back(adj.offsets);
  index_.push_back(adj.targets);
  return push(std::move(n));
}

Var Tape::sum_rows(Var a) {
  const auto& na = node(a);
  Node n;
  n.op = Op::kSumRows;
  n.a = a.id;
  n.needs_grad = na.needs_grad;
  n.value = Tensor2(1, na.value.cols());
  for (std::size_t r = 0; r < na.value.rows(); ++r) {
    auto src = na.value.row(r);
    for (std::size_t c = 0; c < src.size(); ++c) n.value(0, c) += src[c];
  }
  return push(std::move(n));
}

Var Tape::sum_all(Var a) {
  const auto& na = node(a);
  Node n;
  n.op = Op::kSumAll;
  n.a = a.id;
  n.needs_grad = na.needs_grad;
  double s = 0.0;
  for (double v : na.value.data()) s += v;
  n.value = Tensor2::scalar(s);
  return push(std::move(n));
}

Var Tape::log_softmax_at(Var logits, std::span<const char> mask, std::size_t index) {
  const auto& nl = node(logits);
  const auto flat = nl.value.data();
  if (index >= flat.size()) throw ShapeError("log_softmax_at: index out of range");
  if (!mask.empty() && mask[index] == 0) {
    throw std::domain_error("log_softmax_at: target index is masked out");
  }
  const auto logp = log_softmax(flat, mask);
  Node n;
  n.op = Op::kLogSoftmaxAt;
  n.a = logits.id;
  n.needs_grad = nl.needs_grad;
  n.value = Tensor2::scalar(logp[index]);
  n.param = index;
  n.aux = real_.size();
  real_.emplace_back(mask.begin(), mask.end());
  return push(std::move(n));
}

Var Tape::weighted_bce(Var logits, std::span<const double> targets, double positive_weight) {
  const auto& nl = node(logits);
  const auto x = nl.value.data();
  if (targets.size() != x.size()) throw ShapeError("weighted_bce: target length mismatch");
  double loss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = std::clamp(numcore::sigmoid(x[i]), kBceClamp, 1.0 - kBceClamp);
    loss -= positive_weight * targets[i] * std::log(s) + (1.0 - targets[i]) * std::log(1.0 - s);
  }
  Node n;
  n.op = Op::kWeightedBce;
  n.a = logits.id;
  n.s0 = positive_weight;
  n.needs_grad = nl.needs_grad;
  n.value = Tensor2::scalar(loss);
  n.aux = real_.size();
  real_.emplace_back(targets.begin(), targets.end());
  return push(std::move(n));
}

Var Tape::gaussian_sample(Var mu, Var logvar, std::span<const double> eps) {
  const auto& nm = node(mu);
  const auto& nv = node(logvar);
  require_same_shape(nm.value, nv.value, "gaussian_sample");
  if (eps.size() != nm.value.size()) throw ShapeError("gaussian_sample: noise length mismatch");
  Node n;
  n.op = Op::kGaussianSample;
  n.a = mu.id;
  n.b = logvar.id;
  n.needs_grad = nm.needs_grad || nv.needs_grad;
  n.value = nm.value;
  auto z = n.value.data();
  auto lv = nv.value.data();
  for (std::size_t i = 0; i < z.size(); ++i) z[i] += std::exp(0.5 * lv[i]) * eps[i];
  n.aux = real_.size();
  real_.emplace_back(eps.begin(), eps.end());
  return push(std::move(n));
}

Var Tape::kl_standard_normal(Var mu, Var logvar) {
  const auto& nm = node(mu);
  const auto& nv = node(logvar);
  require_same_shape(nm.value, nv.value, "kl_standard_normal");
  auto m = nm.value.data();
  auto lv = nv.value.data();
  double kl = 0.0;
  for (std::size_t i = 0; i < m.size(); ++i) kl += m[i] * m[i] + std::exp(lv[i]) - lv[i] - 1.0;
  Node n;
  n.op = Op::kKl;
  n.a = mu.id;
  n.b = logvar.id;
  n.needs_grad = nm.needs_grad || nv.needs_grad;
  n.value = Tensor2::scalar(0.5 * kl);
  return push(std::move(n));
}

void Tape::backward(Var root, Gradients& grads) const {
  if (nodes_.empty()) throw TapeError("backward called before any forward computation");
  if (root.id >= nodes_.size()) throw TapeError("backward root does not belong to this tape");
  const auto& rv = nodes_[root.id].value;
  if (rv.rows() != 1 || rv.cols() != 1) {
    throw TapeError("backward root must be scalar, got " + rv.shape_string());
  }
  if (grads.size() != params_->size()) throw ShapeError("gradient set does not match parameters");

  std::vector<Tensor2> g(root.id + 1);
  auto acc = [&](std::size_t id) -> Tensor2& {
    if (g[id].empty()) g[id] = Tensor2(nodes_[id].value.rows(), nodes_[id].value.cols());
    return g[id];
  };
  g[root.id] = Tensor2::scalar(1.0);

  for (std::size_t id = root.id + 1; id-- > 0;) {
    const Node& n = nodes_[id];
    if (!n.needs_grad || g[id].empty()) continue;
    const Tensor2& dy = g[id];
    switch (n.op) {
      case Op::kConstant:
        break;
      case Op::kParam:
        axpy(grads[n.param], dy);
        break;
      case Op::kMatmul:
        if (grad_flows(n.a)) kernels::matmul_nt_acc(dy, nodes_[n.b].value, acc(n.a));
        if (grad_flows(n.b)) kernels::matmul_tn_acc(nodes_[n.a].value, dy, acc(n.b));
        break;
      case Op::kAdd:
        if (grad_flows(n.a)) axpy(acc(n.a), dy);
        if (grad_flows(n.b)) axpy(acc(n.b), dy);
        break;
      case Op::kAddRow:
        if (grad_flows(n.a)) axpy(acc(n.a), dy);
        if (grad_flows(n.b)) {
          Tensor2& db = acc(n.b);
          for (std::size_t r = 0; r < dy.rows(); ++r) {
            for (std::size_t c = 0; c < dy.cols(); ++c) db(0, c) += dy(r, c);
          }
        }
        break;
      case Op::kScale:
        axpy(acc(n.a), dy, n.s0);
        break;
      case Op::kMul: {
        const auto dyd = dy.data();
        if (grad_flows(n.a)) {
          auto da = acc(n.a).data();
          auto bv = nodes_[n.b].value.data();
          for (std::size_t i = 0; i < da.size(); ++i) da[i] += dyd[i] * bv[i];
        }
        if (grad_flows(n.b)) {
          auto db = acc(n.b).data();
          auto av = nodes_[n.a].value.data();
          for (std::size_t i = 0; i < db.size(); ++i) db[i] += dyd[i] * av[i];
        }
        break;
      }
      case Op::kConcat: {
        std::size_t offset = 0;
        for (std::size_t in : concat_inputs_[n.aux]) {
          const std::size_t w = nodes_[in].value.cols();
          if (grad_flows(in)) {
            Tensor2& d = acc(in);
            for (std::size_t r = 0; r < dy.rows(); ++r) {
              for (std::size_t c = 0; c < w; ++c) d(r, c) += dy(r, offset + c);
            }
          }
          offset += w;
        }
        break;
      }
      case Op::kRelu: {
        auto da = acc(n.a).data();
        auto y = n.value.data();
        auto dyd = dy.data();
        for (std::size_t i = 0; i < da.size(); ++i) {
          if (y[i] > 0.0) da[i] += dyd[i];
        }
        break;
      }
      case Op::kSigmoid: {
        auto da = acc(n.a).data();
        auto y = n.value.data();
        auto dyd = dy.data();
        for (std::size_t i = 0; i < da.size(); ++i) da[i] += dyd[i] * y[i] * (1.0 - y[i]);
        break;
      }
      case Op::kClamp: {
        auto da = acc(n.a).data();
        auto x = nodes_[n.a].value.data();
        auto dyd = dy.data();
        for (std::size_t i = 0; i < da.size(); ++i) {
          if (x[i] >= n.s0 && x[i] <= n.s1) da[i] += dyd[i];
        }
        break;
      }
      case Op::kGather: {
        Tensor2& da = acc(n.a);
        const auto& rows = index_[n.aux];
        for (std::size_t r = 0; r < rows.size(); ++r) {
          auto dst = da.row(rows[r]);
          auto src = dy.row(r);
          for (std::size_t c = 0; c < src.size(); ++c) dst[c] += src[c];
        }
        break;
      }
      case Op::kPropagate: {
        Tensor2& da = acc(n.a);
        axpy(da, dy);
        const auto& offsets = index_[n.aux];
        const auto& targets = index_[n.aux + 1];
        const std::size_t cols = dy.cols();
        for (std::size_t v = 0; v + 1 < offsets.size(); ++v) {
          const double* src = dy.row(v).data();
          for (std::uint32_t e = offsets[v]; e < offsets[v + 1]; ++e) {
            double* dst = da.row(targets[e]).data();
            for (std::size_t c = 0; c < cols; ++c) dst[c] += src[c];
          }
        }
        break;
      }
      case Op::kSumRows: {
        Tensor2& da = acc(n.a);
        for (std::size_t r = 0; r < da.rows(); ++r) {
          for (std::size_t c = 0; c < da.cols(); ++c) da(r, c) += dy(0, c);
        }
        break;
      }
      case Op::kSumAll: {
        const double d = dy(0, 0);
        for (double& v : acc(n.a).data()) v += d;
        break;
      }
      case Op::kLogSoftmaxAt: {
        const auto& mask_real = real_[n.aux];
        std::vector<char> mask(mask_real.begin(), mask_real.end());
        const auto x = nodes_[n.a].value.data();
        const auto p = softmax(x, mask);
        auto da = acc(n.a).data();
        const double d = dy(0, 0);
        for (std::size_t i = 0; i < da.size(); ++i) {
          const double indicator = i == n.param ? 1.0 : 0.0;
          da[i] += d * (indicator - p[i]);
        }
        break;
      }
      case Op::kWeightedBce: {
        const auto& y = real_[n.aux];
        const auto x = nodes_[n.a].value.data();
        auto da = acc(n.a).data();
        const double d = dy(0, 0);
        for (std::size_t i = 0; i < da.size(); ++i) {
          const double s = numcore::sigmoid(x[i]);
          if (s < kBceClamp || s > 1.0 - kBceClamp) continue;
          da[i] += d * (-n.s0 * y[i] * (1.0 - s) + (1.0 - y[i]) * s);
        }
        break;
      }
      case Op::kGaussianSample: {
        const auto& eps = real_[n.aux];
        const auto dyd = dy.data();
        if (grad_flows(n.a)) axpy(acc(n.a), dy);
        if (grad_flows(n.b)) {
          auto dv = acc(n.b).data();
          auto lv = nodes_[n.b].value.data();
          for (std::size_t i = 0; i < dv.size(); ++i) {
            dv[i] += dyd[i] * eps[i] * 0.5 * std::exp(0.5 * lv[i]);
          }
        }
        break;
      }
      case Op::kKl: {
        const double d = dy(0, 0);
        if (grad_flows(n.a)) {
          auto dm = acc(n.a).data();
          auto m = nodes_[n.a].value.data();
          for (std::size_t i = 0; i < dm.size(); ++i) dm[i] += d * m[i];
        }
        if (grad_flows(n.b)) {
          auto dv = acc(n.b).data();
          auto lv = nodes_[n.b].value.data();
          for (std::size_t i = 0; i < dv.size(); ++i) dv[i] += d * 0.5 * (std::exp(lv[i]) - 1.0);
        }
        break;
      }
    }
  }
}

}  // namespace retrograph::numcore

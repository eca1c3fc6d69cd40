// Copyright 2026 The AAI Toolkit Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "aai/model.hpp"

#include <algorithm>
#include <cmath>

namespace aai {
namespace {

long reflect_index(long idx, long n) {
  if (n == 1) return 0;
  while (idx < 0 || idx >= n) {
    if (idx < 0) idx = -idx;
    if (idx >= n) idx = 2 * (n - 1) - idx;
  }
  return idx;
}

// The four gate parameter blocks stacked row-wise in the order f, i, g, o,
// split into recurrent (wh) and input (wx) halves. All scans work on the
// stacked form so each time step is a single GEMM across the batch.
struct GateStack {
  Matrix wx;  // 4H x in
  Matrix wh;  // 4H x H
  Vector b;   // 4H
};

GateStack stack_cell(const LstmCellParams& cell) {
  const long h = cell.w_f.rows();
  const long in = cell.w_f.cols() - h;
  GateStack gs;
  gs.wx.resize(4 * h, in);
  gs.wh.resize(4 * h, h);
  gs.b.resize(4 * h);
  const Matrix* ws[4] = {&cell.w_f, &cell.w_i, &cell.w_c, &cell.w_o};
  const Vector* bs[4] = {&cell.b_f, &cell.b_i, &cell.b_c, &cell.b_o};
  for (int k = 0; k < 4; ++k) {
    gs.wh.middleRows(k * h, h) = ws[k]->leftCols(h);
    gs.wx.middleRows(k * h, h) = ws[k]->rightCols(in);
    gs.b.segment(k * h, h) = *bs[k];
  }
  return gs;
}

void unstack_add(const GateStack& gs, LstmCellParams& into) {
  const long h = into.w_f.rows();
  const long in = into.w_f.cols() - h;
  Matrix* ws[4] = {&into.w_f, &into.w_i, &into.w_c, &into.w_o};
  Vector* bs[4] = {&into.b_f, &into.b_i, &into.b_c, &into.b_o};
  for (int k = 0; k < 4; ++k) {
    ws[k]->leftCols(h) += gs.wh.middleRows(k * h, h);
    ws[k]->rightCols(in) += gs.wx.middleRows(k * h, h);
    *bs[k] += gs.b.segment(k * h, h);
  }
}

GateStack zero_stack(const LstmCellParams& cell) {
  const long h = cell.w_f.rows();
  const long in = cell.w_f.cols() - h;
  GateStack gs;
  gs.wx = Matrix::Zero(4 * h, in);
  gs.wh = Matrix::Zero(4 * h, h);
  gs.b = Vector::Zero(4 * h);
  return gs;
}

// Per-step activations for one scan direction, each H x B. Columns of
// sequences shorter than t hold exact zeros: their pre-activations receive
// no input term, and zero states propagate zero states.
struct DirCache {
  std::vector<Matrix> f, i, g, o, c, tanhc, h;
};

long max_rows(const std::vector<Matrix>& xs) {
  long t = 0;
  for (const Matrix& x : xs) t = std::max(t, static_cast<long>(x.rows()));
  return t;
}

void scan_forward(const GateStack& gs, const std::vector<Matrix>& xs,
                  DirCache& cache, std::vector<Matrix>& ys) {
  const int batch = static_cast<int>(xs.size());
  const long h = gs.wh.cols();
  const long tmax = max_rows(xs);
  std::vector<Matrix> proj(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    proj[static_cast<std::size_t>(b)].noalias() =
        xs[static_cast<std::size_t>(b)] * gs.wx.transpose();
  }
  cache.f.assign(static_cast<std::size_t>(tmax), Matrix());
  cache.i.assign(static_cast<std::size_t>(tmax), Matrix());
  cache.g.assign(static_cast<std::size_t>(tmax), Matrix());
  cache.o.assign(static_cast<std::size_t>(tmax), Matrix());
  cache.c.assign(static_cast<std::size_t>(tmax), Matrix());
  cache.tanhc.assign(static_cast<std::size_t>(tmax), Matrix());
  cache.h.assign(static_cast<std::size_t>(tmax), Matrix());
  const Matrix zero = Matrix::Zero(h, batch);
  const Matrix* h_prev = &zero;
  const Matrix* c_prev = &zero;
  Matrix a(4 * h, batch);
  for (long t = 0; t < tmax; ++t) {
    const auto ti = static_cast<std::size_t>(t);
    a.noalias() = gs.wh * (*h_prev);
    for (int b = 0; b < batch; ++b) {
      const Matrix& x = xs[static_cast<std::size_t>(b)];
      if (t < x.rows()) {
        a.col(b).noalias() +=
            proj[static_cast<std::size_t>(b)].row(t).transpose();
        a.col(b) += gs.b;
      }
    }
    cache.f[ti] = (1.0 / (1.0 + (-a.topRows(h).array()).exp())).matrix();
    cache.i[ti] =
        (1.0 / (1.0 + (-a.middleRows(h, h).array()).exp())).matrix();
    cache.g[ti] = a.middleRows(2 * h, h).array().tanh().matrix();
    cache.o[ti] = (1.0 / (1.0 + (-a.bottomRows(h).array()).exp())).matrix();
    cache.c[ti] = cache.f[ti].cwiseProduct(*c_prev) +
                  cache.i[ti].cwiseProduct(cache.g[ti]);
    cache.tanhc[ti] = cache.c[ti].array().tanh().matrix();
    cache.h[ti] = cache.o[ti].cwiseProduct(cache.tanhc[ti]);
    for (int b = 0; b < batch; ++b) {
      Matrix& y = ys[static_cast<std::size_t>(b)];
      if (t < y.rows()) y.row(t) = cache.h[ti].col(b).transpose();
    }
    h_prev = &cache.h[ti];
    c_prev = &cache.c[ti];
  }
}

void scan_backward(const GateStack& gs, const std::vector<Matrix>& xs,
                   const DirCache& cache, const std::vector<Matrix>& dys,
                   GateStack& dgs, std::vector<Matrix>* dxs) {
  const int batch = static_cast<int>(xs.size());
  const long h = gs.wh.cols();
  const long tmax = max_rows(xs);
  std::vector<Matrix> dproj(static_cast<std::size_t>(batch));
  for (int b = 0; b < batch; ++b) {
    dproj[static_cast<std::size_t>(b)] =
        Matrix::Zero(xs[static_cast<std::size_t>(b)].rows(), 4 * h);
  }
  const Matrix zero = Matrix::Zero(h, batch);
  Matrix dh_next = Matrix::Zero(h, batch);
  Matrix dc_next = Matrix::Zero(h, batch);
  Matrix dh(h, batch), dc(h, batch), da(4 * h, batch);
  for (long t = tmax - 1; t >= 0; --t) {
    const auto ti = static_cast<std::size_t>(t);
    dh = dh_next;
    for (int b = 0; b < batch; ++b) {
      const Matrix& dy = dys[static_cast<std::size_t>(b)];
      if (t < dy.rows()) dh.col(b) += dy.row(t).transpose();
    }
    const Matrix& c_prev = (t > 0) ? cache.c[ti - 1] : zero;
    dc = dh.cwiseProduct(cache.o[ti])
             .cwiseProduct(
                 (1.0 - cache.tanhc[ti].array().square()).matrix()) +
         dc_next;
    da.topRows(h) =
        dc.cwiseProduct(c_prev)
            .cwiseProduct(cache.f[ti])
            .cwiseProduct((1.0 - cache.f[ti].array()).matrix());
    da.middleRows(h, h) =
        dc.cwiseProduct(cache.g[ti])
            .cwiseProduct(cache.i[ti])
            .cwiseProduct((1.0 - cache.i[ti].array()).matrix());
    da.middleRows(2 * h, h) = dc.cwiseProduct(cache.i[ti]).cwiseProduct(
        (1.0 - cache.g[ti].array().square()).matrix());
    da.bottomRows(h) =
        dh.cwiseProduct(cache.tanhc[ti])
            .cwiseProduct(cache.o[ti])
            .cwiseProduct((1.0 - cache.o[ti].array()).matrix());
    dc_next = dc.cwiseProduct(cache.f[ti]);
    if (t > 0) dgs.wh.noalias() += da * cache.h[ti - 1].transpose();
    dgs.b += da.rowwise().sum();
    dh_next.noalias() = gs.wh.transpose() * da;
    for (int b = 0; b < batch; ++b) {
      Matrix& dp = dproj[static_cast<std::size_t>(b)];
      if (t < dp.rows()) dp.row(t) = da.col(b).transpose();
    }
  }
  for (int b = 0; b < batch; ++b) {
    const auto bi = static_cast<std::size_t>(b);
    dgs.wx.noalias() += dproj[bi].transpose() * xs[bi];
    if (dxs) (*dxs)[bi].noalias() += dproj[bi] * gs.wx;
  }
}

struct LayerCache {
  std::vector<Matrix> xs_rev;
  DirCache fwd, bwd;
  std::vector<Matrix> y;  // per-seq T x 2H
};

void bilstm_batch_forward(const BiLstmLayer& layer,
                          const std::vector<Matrix>& xs, LayerCache& cache) {
  const std::size_t batch = xs.size();
  const long h = layer.hidden_per_direction;
  std::vector<Matrix> yf(batch), yb(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    yf[b].resize(xs[b].rows(), h);
    yb[b].resize(xs[b].rows(), h);
  }
  scan_forward(stack_cell(layer.forward_cell), xs, cache.fwd, yf);
  cache.xs_rev.resize(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    cache.xs_rev[b] = xs[b].colwise().reverse();
  }
  scan_forward(stack_cell(layer.backward_cell), cache.xs_rev, cache.bwd, yb);
  cache.y.resize(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    cache.y[b].resize(xs[b].rows(), 2 * h);
    cache.y[b].leftCols(h) = yf[b];
    cache.y[b].rightCols(h) = yb[b].colwise().reverse();
  }
}

void bilstm_batch_backward(const BiLstmLayer& layer,
                           const std::vector<Matrix>& xs,
                           const LayerCache& cache,
                           const std::vector<Matrix>& dys,
                           BiLstmLayer& dlayer, std::vector<Matrix>* dxs) {
  const std::size_t batch = xs.size();
  const long h = layer.hidden_per_direction;
  std::vector<Matrix> dyf(batch), dyb(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    dyf[b] = dys[b].leftCols(h);
    dyb[b] = dys[b].rightCols(h).colwise().reverse();
  }
  GateStack dg_f = zero_stack(layer.forward_cell);
  scan_backward(stack_cell(layer.forward_cell), xs, cache.fwd, dyf, dg_f, dxs);
  GateStack dg_b = zero_stack(layer.backward_cell);
  std::vector<Matrix> dxs_rev;
  if (dxs) {
    dxs_rev.resize(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      dxs_rev[b] = Matrix::Zero(xs[b].rows(), xs[b].cols());
    }
  }
  scan_backward(stack_cell(layer.backward_cell), cache.xs_rev, cache.bwd, dyb,
                dg_b, dxs ? &dxs_rev : nullptr);
  if (dxs) {
    for (std::size_t b = 0; b < batch; ++b) {
      (*dxs)[b] += dxs_rev[b].colwise().reverse();
    }
  }
  unstack_add(dg_f, dlayer.forward_cell);
  unstack_add(dg_b, dlayer.backward_cell);
}

Matrix smooth_apply(const SmoothingConv& s, const Matrix& raw) {
  const long t_len = raw.rows();
  const long k_len = s.taps.rows();
  const long pad = (k_len - 1) / 2;
  Matrix out = Matrix::Zero(t_len, raw.cols());
  for (long t = 0; t < t_len; ++t) {
    for (long k = 0; k < k_len; ++k) {
      const long src = reflect_index(t + k - pad, t_len);
      if (s.taps.cols() == 1) {
        out.row(t) += s.taps(k, 0) * raw.row(src);
      } else {
        out.row(t).array() +=
            s.taps.row(k).array() * raw.row(src).array();
      }
    }
  }
  return out;
}

void smooth_backprop(const SmoothingConv& s, const Matrix& raw,
                     const Matrix& dsm, Matrix& draw, Matrix* dtaps) {
  const long t_len = raw.rows();
  const long k_len = s.taps.rows();
  const long pad = (k_len - 1) / 2;
  for (long t = 0; t < t_len; ++t) {
    for (long k = 0; k < k_len; ++k) {
      const long src = reflect_index(t + k - pad, t_len);
      if (s.taps.cols() == 1) {
        draw.row(src) += s.taps(k, 0) * dsm.row(t);
        if (dtaps) (*dtaps)(k, 0) += dsm.row(t).dot(raw.row(src));
      } else {
        draw.row(src).array() += s.taps.row(k).array() * dsm.row(t).array();
        if (dtaps) {
          dtaps->row(k).array() += dsm.row(t).array() * raw.row(src).array();
        }
      }
    }
  }
}

LstmCellParams make_cell(long hidden, long input) {
  LstmCellParams cell;
  cell.w_f = Matrix::Zero(hidden, hidden + input);
  cell.w_i = Matrix::Zero(hidden, hidden + input);
  cell.w_c = Matrix::Zero(hidden, hidden + input);
  cell.w_o = Matrix::Zero(hidden, hidden + input);
  cell.b_f = Vector::Zero(hidden);
  cell.b_i = Vector::Zero(hidden);
  cell.b_c = Vector::Zero(hidden);
  cell.b_o = Vector::Zero(hidden);
  return cell;
}

// Zero-parameter model with the right tensor shapes.
InversionModel allocate_model(const ModelConfig& config) {
  InversionModel m;
  m.config = config;
  const long d = config.dense_units;
  const long h = config.hidden_per_direction;
  const long c = config.output_channels;
  m.input_dense.weights = Matrix::Zero(d, config.input_dim);
  m.input_dense.bias = Vector::Zero(d);
  m.bilstm1.hidden_per_direction = static_cast<int>(h);
  m.bilstm1.forward_cell = make_cell(h, d);
  m.bilstm1.backward_cell = make_cell(h, d);
  m.bilstm2.hidden_per_direction = static_cast<int>(h);
  m.bilstm2.forward_cell = make_cell(h, 2 * h);
  m.bilstm2.backward_cell = make_cell(h, 2 * h);
  m.output_dense.weights = Matrix::Zero(c, 2 * h);
  m.output_dense.bias = Vector::Zero(c);
  m.smoother.taps =
      Matrix::Zero(config.smoother_taps, config.per_channel_smoother ? c : 1);
  return m;
}

void append_cell_views(const std::string& prefix, LstmCellParams& cell,
                       std::vector<TensorView>& out) {
  out.push_back({prefix + ".w_f", cell.w_f.data(), cell.w_f.size()});
  out.push_back({prefix + ".b_f", cell.b_f.data(), cell.b_f.size()});
  out.push_back({prefix + ".w_i", cell.w_i.data(), cell.w_i.size()});
  out.push_back({prefix + ".b_i", cell.b_i.data(), cell.b_i.size()});
  out.push_back({prefix + ".w_c", cell.w_c.data(), cell.w_c.size()});
  out.push_back({prefix + ".b_c", cell.b_c.data(), cell.b_c.size()});
  out.push_back({prefix + ".w_o", cell.w_o.data(), cell.w_o.size()});
  out.push_back({prefix + ".b_o", cell.b_o.data(), cell.b_o.size()});
}

template <typename Model, typename View>
std::vector<View> enumerate_tensors(Model& m, bool include_smoother) {
  std::vector<TensorView> views;
  auto& mm = const_cast<InversionModel&>(static_cast<const InversionModel&>(m));
  views.push_back({"input_dense.weights", mm.input_dense.weights.data(),
                   mm.input_dense.weights.size()});
  views.push_back({"input_dense.bias", mm.input_dense.bias.data(),
                   mm.input_dense.bias.size()});
  append_cell_views("bilstm1.fwd", mm.bilstm1.forward_cell, views);
  append_cell_views("bilstm1.bwd", mm.bilstm1.backward_cell, views);
  append_cell_views("bilstm2.fwd", mm.bilstm2.forward_cell, views);
  append_cell_views("bilstm2.bwd", mm.bilstm2.backward_cell, views);
  views.push_back({"output_dense.weights", mm.output_dense.weights.data(),
                   mm.output_dense.weights.size()});
  views.push_back({"output_dense.bias", mm.output_dense.bias.data(),
                   mm.output_dense.bias.size()});
  if (include_smoother) {
    views.push_back(
        {"smoother.taps", mm.smoother.taps.data(), mm.smoother.taps.size()});
  }
  std::vector<View> result;
  result.reserve(views.size());
  for (const TensorView& v : views) result.push_back({v.name, v.data, v.size});
  return result;
}

struct EngineItem {
  const Matrix* x;
  const Matrix* y;  // null for forward-only
  long len;
  const std::vector<std::uint8_t>* loss_mask;  // null = all frames count
};

BatchLoss run_batch(const InversionModel& m,
                    const std::vector<EngineItem>& items, ModelGradients* grads,
                    std::vector<ForwardResult>* outputs) {
  const std::size_t batch = items.size();
  const long channels = m.config.output_channels;
  std::vector<Matrix> zpre(batch), zs(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    const EngineItem& it = items[b];
    require(it.x->cols() == m.config.input_dim,
            "input width != configured input_dim");
    require(it.len >= 1 && it.len <= it.x->rows(),
            "sequence length out of range");
    if (it.y) {
      require(it.y->rows() >= it.len && it.y->cols() == channels,
              "target shape mismatch");
    }
    zpre[b].noalias() =
        it.x->topRows(it.len) * m.input_dense.weights.transpose();
    zpre[b].rowwise() += m.input_dense.bias.transpose();
    zs[b] = zpre[b].cwiseMax(0.0);
  }
  LayerCache l1, l2;
  bilstm_batch_forward(m.bilstm1, zs, l1);
  bilstm_batch_forward(m.bilstm2, l1.y, l2);
  std::vector<Matrix> raw(batch), smoothed(batch), dsm;
  BatchLoss loss;
  if (grads) dsm.resize(batch);
  for (std::size_t b = 0; b < batch; ++b) {
    raw[b].noalias() = l2.y[b] * m.output_dense.weights.transpose();
    raw[b].rowwise() += m.output_dense.bias.transpose();
    smoothed[b] = smooth_apply(m.smoother, raw[b]);
    const EngineItem& it = items[b];
    if (it.y) {
      if (grads) dsm[b] = Matrix::Zero(it.len, channels);
      for (long t = 0; t < it.len; ++t) {
        if (it.loss_mask &&
            !(*it.loss_mask)[static_cast<std::size_t>(t)]) {
          continue;
        }
        const auto diff = smoothed[b].row(t) - it.y->row(t);
        loss.sum_squared_error += diff.squaredNorm();
        loss.valid_entries += channels;
        if (grads) dsm[b].row(t) = 2.0 * diff;
      }
    }
  }
  if (outputs) {
    outputs->resize(batch);
    for (std::size_t b = 0; b < batch; ++b) {
      (*outputs)[b].raw = std::move(raw[b]);
      (*outputs)[b].smoothed = std::move(smoothed[b]);
    }
  }
  if (!grads) return loss;

  std::vector<Matrix> dl2(batch), dl1(batch), dz(batch);
  Matrix* dtaps =
      grads->smoother_taps ? &*grads->smoother_taps : nullptr;
  for (std::size_t b = 0; b < batch; ++b) {
    const Matrix& raw_b = outputs ? (*outputs)[b].raw : raw[b];
    Matrix draw = Matrix::Zero(raw_b.rows(), channels);
    smooth_backprop(m.smoother, raw_b, dsm[b], draw, dtaps);
    grads->output_dense.weights.noalias() += draw.transpose() * l2.y[b];
    grads->output_dense.bias += draw.colwise().sum().transpose();
    dl2[b].noalias() = draw * m.output_dense.weights;
    dl1[b] = Matrix::Zero(l1.y[b].rows(), l1.y[b].cols());
    dz[b] = Matrix::Zero(zs[b].rows(), zs[b].cols());
  }
  bilstm_batch_backward(m.bilstm2, l1.y, l2, dl2, grads->bilstm2, &dl1);
  bilstm_batch_backward(m.bilstm1, zs, l1, dl1, grads->bilstm1, &dz);
  for (std::size_t b = 0; b < batch; ++b) {
    const EngineItem& it = items[b];
    Matrix dzpre =
        dz[b].cwiseProduct((zpre[b].array() > 0.0).cast<double>().matrix());
    grads->input_dense.weights.noalias() +=
        dzpre.transpose() * it.x->topRows(it.len);
    grads->input_dense.bias += dzpre.colwise().sum().transpose();
  }
  return loss;
}

}  // namespace

long parameter_count(const InversionModel& model) {
  long total = 0;
  for (const ConstTensorView& v : parameter_tensors(model, false)) {
    total += v.size;
  }
  return total;
}

std::vector<TensorView> parameter_tensors(InversionModel& model,
                                          bool skip_frozen) {
  const bool include = !(skip_frozen && model.smoother.frozen);
  return enumerate_tensors<InversionModel, TensorView>(model, include);
}

std::vector<ConstTensorView> parameter_tensors(const InversionModel& model,
                                               bool skip_frozen) {
  const bool include = !(skip_frozen && model.smoother.frozen);
  return enumerate_tensors<const InversionModel, ConstTensorView>(model,
                                                                  include);
}

ModelGradients zero_gradients(const InversionModel& model) {
  InversionModel shaped = allocate_model(model.config);
  ModelGradients g;
  g.input_dense = std::move(shaped.input_dense);
  g.bilstm1 = std::move(shaped.bilstm1);
  g.bilstm2 = std::move(shaped.bilstm2);
  g.output_dense = std::move(shaped.output_dense);
  if (!model.smoother.frozen) g.smoother_taps = std::move(shaped.smoother.taps);
  return g;
}

void scale_gradients(ModelGradients& grads, double factor) {
  for (TensorView& v : gradient_tensors(grads)) {
    Eigen::Map<Vector>(v.data, v.size) *= factor;
  }
}

namespace {

template <typename Grads, typename View>
std::vector<View> enumerate_gradients(Grads& g) {
  auto& gg = const_cast<ModelGradients&>(static_cast<const ModelGradients&>(g));
  std::vector<TensorView> views;
  views.push_back({"input_dense.weights", gg.input_dense.weights.data(),
                   gg.input_dense.weights.size()});
  views.push_back({"input_dense.bias", gg.input_dense.bias.data(),
                   gg.input_dense.bias.size()});
  append_cell_views("bilstm1.fwd", gg.bilstm1.forward_cell, views);
  append_cell_views("bilstm1.bwd", gg.bilstm1.backward_cell, views);
  append_cell_views("bilstm2.fwd", gg.bilstm2.forward_cell, views);
  append_cell_views("bilstm2.bwd", gg.bilstm2.backward_cell, views);
  views.push_back({"output_dense.weights", gg.output_dense.weights.data(),
                   gg.output_dense.weights.size()});
  views.push_back({"output_dense.bias", gg.output_dense.bias.data(),
                   gg.output_dense.bias.size()});
  if (gg.smoother_taps) {
    views.push_back(
        {"smoother.taps", gg.smoother_taps->data(), gg.smoother_taps->size()});
  }
  std::vector<View> result;
  result.reserve(views.size());
  for (const TensorView& v : views) result.push_back({v.name, v.data, v.size});
  return result;
}

}  // namespace

std::vector<TensorView> gradient_tensors(ModelGradients& grads) {
  return enumerate_gradients<ModelGradients, TensorView>(grads);
}

std::vector<ConstTensorView> gradient_tensors(const ModelGradients& grads) {
  return enumerate_gradients<const ModelGradients, ConstTensorView>(grads);
}

void lstm_step(const LstmCellParams& params,
               const Eigen::Ref<const Vector>& h_prev,
               const Eigen::Ref<const Vector>& c_prev,
               const Eigen::Ref<const Vector>& x, Vector& h, Vector& c) {
  const long hidden = params.w_f.rows();
  require(h_prev.size() == hidden && c_prev.size() == hidden,
          "state size mismatch");
  require(params.w_f.cols() == hidden + x.size(), "input size mismatch");
  Vector hx(hidden + x.size());
  hx << h_prev, x;
  const Vector f =
      (1.0 / (1.0 + (-(params.w_f * hx + params.b_f)).array().exp())).matrix();
  const Vector i =
      (1.0 / (1.0 + (-(params.w_i * hx + params.b_i)).array().exp())).matrix();
  const Vector g = (params.w_c * hx + params.b_c).array().tanh().matrix();
  const Vector o =
      (1.0 / (1.0 + (-(params.w_o * hx + params.b_o)).array().exp())).matrix();
  c = f.cwiseProduct(c_prev) + i.cwiseProduct(g);
  h = o.cwiseProduct(c.array().tanh().matrix());
}

Matrix bilstm_forward(const BiLstmLayer& layer, const Matrix& seq) {
  require(seq.rows() >= 1, "empty sequence");
  require(layer.forward_cell.w_f.cols() ==
              layer.hidden_per_direction + seq.cols(),
          "layer input width mismatch");
  std::vector<Matrix> xs = {seq};
  LayerCache cache;
  bilstm_batch_forward(layer, xs, cache);
  return cache.y.front();
}

ForwardResult model_forward(const InversionModel& model, const Matrix& seq) {
  std::vector<EngineItem> items = {
      {&seq, nullptr, static_cast<long>(seq.rows()), nullptr}};
  std::vector<ForwardResult> out;
  run_batch(model, items, nullptr, &out);
  return std::move(out.front());
}

std::vector<ForwardResult> model_forward_batch(
    const InversionModel& model, const std::vector<SeqView>& inputs) {
  std::vector<EngineItem> items;
  items.reserve(inputs.size());
  for (const SeqView& v : inputs) {
    items.push_back({v.data, nullptr, v.length, nullptr});
  }
  std::vector<ForwardResult> out;
  run_batch(model, items, nullptr, &out);
  return out;
}

InversionModel init_model(const ModelConfig& config, std::uint64_t seed,
                          SmootherMode mode, double smoother_cutoff_hz,
                          double frame_rate) {
  InversionModel m = allocate_model(config);
  m.seed = seed;
  Rng rng(seed);
  auto fill_uniform = [&rng](Matrix& w, long fan_in) {
    const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
    double* p = w.data();
    for (long n = 0; n < w.size(); ++n) p[n] = rng.uniform(-bound, bound);
  };
  auto init_cell = [&fill_uniform](LstmCellParams& cell) {
    const long fan_in = cell.w_f.cols();
    fill_uniform(cell.w_f, fan_in);
    fill_uniform(cell.w_i, fan_in);
    fill_uniform(cell.w_c, fan_in);
    fill_uniform(cell.w_o, fan_in);
  };
  fill_uniform(m.input_dense.weights, config.input_dim);
  init_cell(m.bilstm1.forward_cell);
  init_cell(m.bilstm1.backward_cell);
  init_cell(m.bilstm2.forward_cell);
  init_cell(m.bilstm2.backward_cell);
  fill_uniform(m.output_dense.weights, 2 * config.hidden_per_direction);
  if (mode == SmootherMode::fixed) {
    if (config.smoother_taps == 1) {
      // Single-tap identity: a frozen pass-through for unsmoothed baselines.
      m.smoother.taps.setOnes();
    } else {
      SincKernel kernel = design_windowed_sinc(smoother_cutoff_hz, frame_rate,
                                               config.smoother_taps);
      for (long c = 0; c < m.smoother.taps.cols(); ++c) {
        m.smoother.taps.col(c) = kernel.taps;
      }
    }
    m.smoother.frozen = true;
  } else {
    fill_uniform(m.smoother.taps, config.smoother_taps);
    m.smoother.frozen = false;
  }
  return m;
}

BatchLoss accumulate_gradients(const InversionModel& model,
                               const std::vector<SeqView>& inputs,
                               const std::vector<SeqView>& targets,
                               ModelGradients& grads) {
  require(inputs.size() == targets.size() && !inputs.empty(),
          "inputs/targets count mismatch");
  std::vector<EngineItem> items;
  items.reserve(inputs.size());
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    require(inputs[b].length == targets[b].length,
            "input/target length mismatch");
    items.push_back(
        {inputs[b].data, targets[b].data, inputs[b].length, nullptr});
  }
  return run_batch(model, items, &grads, nullptr);
}

ModelGradients compute_gradients(const InversionModel& model,
                                 const Matrix& seq, const Matrix& target,
                                 const std::vector<std::uint8_t>& mask) {
  require(seq.rows() == target.rows(), "sequence/target length mismatch");
  require(mask.size() == static_cast<std::size_t>(seq.rows()),
          "mask length mismatch");
  ModelGradients grads = zero_gradients(model);
  std::vector<EngineItem> items = {
      {&seq, &target, static_cast<long>(seq.rows()), &mask}};
  BatchLoss loss = run_batch(model, items, &grads, nullptr);
  if (loss.valid_entries > 0) {
    scale_gradients(grads, 1.0 / static_cast<double>(loss.valid_entries));
  }
  return grads;
}

}  // namespace aai

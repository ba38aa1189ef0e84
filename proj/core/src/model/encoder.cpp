// Copyright (C) 2026 The Rationale Authors
// SPDX-License-Identifier: Apache-2.0

#include "rationale/model/encoder.hpp"

#include <cmath>
#include <random>

#include "rationale/common/error.hpp"

namespace rationale::model {
namespace {

constexpr float kLayerNormEps = 1e-5f;
constexpr float kInvSqrt2 = 0.70710678118654752f;
constexpr float kInvSqrt2Pi = 0.39894228040143268f;

using RowVector = Eigen::Matrix<float, 1, Eigen::Dynamic>;

Matrix normal(int rows, int cols, float stddev, std::mt19937_64& rng) {
  std::normal_distribution<float> dist(0.0f, stddev);
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = dist(rng);
  return m;
}

Linear make_linear(int in, int out, float stddev, std::mt19937_64& rng) {
  return {normal(in, out, stddev, rng), Matrix::Zero(1, out)};
}

LayerNorm make_norm(int dim) { return {Matrix::Ones(1, dim), Matrix::Zero(1, dim)}; }

Matrix apply(const Linear& l, const Matrix& x) {
  Matrix y = x * l.weight;
  y.rowwise() += l.bias.row(0);
  return y;
}

Matrix layer_norm(const Matrix& x, const LayerNorm& p, LayerNormCache* cache) {
  const auto n = static_cast<float>(x.cols());
  Eigen::VectorXf mean = x.rowwise().sum() / n;
  Matrix centered = x.colwise() - mean;
  Eigen::VectorXf var = centered.array().square().rowwise().sum() / n;
  Eigen::VectorXf inv_std = (var.array() + kLayerNormEps).rsqrt();
  Matrix normalized = centered.array().colwise() * inv_std.array();
  Matrix y = normalized.array().rowwise() * p.gamma.row(0).array();
  y.rowwise() += p.beta.row(0);
  if (cache) {
    cache->normalized = std::move(normalized);
    cache->inv_std = std::move(inv_std);
  }
  return y;
}

// Returns d(loss)/d(input); accumulates gamma/beta gradients when `grad` is set.
Matrix layer_norm_backward(const Matrix& dy, const LayerNormCache& cache, const LayerNorm& p,
                           LayerNorm* grad) {
  const auto n = static_cast<float>(dy.cols());
  if (grad) {
    grad->gamma += (dy.array() * cache.normalized.array()).colwise().sum().matrix();
    grad->beta += dy.colwise().sum();
  }
  Matrix dxhat = dy.array().rowwise() * p.gamma.row(0).array();
  Eigen::VectorXf sum_dxhat = dxhat.rowwise().sum();
  Eigen::VectorXf sum_dxhat_xhat = (dxhat.array() * cache.normalized.array()).rowwise().sum();
  Matrix dx = (n * dxhat.array()).colwise() - sum_dxhat.array();
  dx.array() -= cache.normalized.array().colwise() * sum_dxhat_xhat.array();
  dx.array().colwise() *= cache.inv_std.array() / n;
  return dx;
}

Matrix gelu(const Matrix& x) {
  return x.unaryExpr([](float v) { return 0.5f * v * (1.0f + std::erf(v * kInvSqrt2)); });
}

Matrix gelu_grad(const Matrix& x) {
  return x.unaryExpr([](float v) {
    return 0.5f * (1.0f + std::erf(v * kInvSqrt2)) + v * kInvSqrt2Pi * std::exp(-0.5f * v * v);
  });
}

void softmax_rows(Matrix& s) {
  for (Eigen::Index r = 0; r < s.rows(); ++r) {
    auto row = s.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

void linear_backward(const Matrix& x, const Matrix& dy, Linear* grad) {
  if (!grad) return;
  grad->weight.noalias() += x.transpose() * dy;
  grad->bias += dy.colwise().sum();
}

void visit_linear(const std::string& prefix, Linear& l, const TensorVisitor& fn) {
  fn(prefix + ".weight", l.weight);
  fn(prefix + ".bias", l.bias);
}

void visit_norm(const std::string& prefix, LayerNorm& n, const TensorVisitor& fn) {
  fn(prefix + ".gamma", n.gamma);
  fn(prefix + ".beta", n.beta);
}

Matrix take(std::map<std::string, Matrix>& tensors, const std::string& name, Eigen::Index rows,
            Eigen::Index cols) {
  auto it = tensors.find(name);
  if (it == tensors.end()) throw RegistrationError("weights archive is missing tensor " + name);
  if (it->second.rows() != rows || it->second.cols() != cols) {
    throw RegistrationError("tensor " + name + " has shape " + std::to_string(it->second.rows()) + "x" +
                            std::to_string(it->second.cols()) + ", expected " + std::to_string(rows) +
                            "x" + std::to_string(cols));
  }
  Matrix m = std::move(it->second);
  tensors.erase(it);
  return m;
}

}  // namespace

void EncoderConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw RegistrationError(std::string("config field ") + name + " must be positive");
  };
  positive(vocab_size, "vocab_size");
  positive(hidden_dim, "hidden_dim");
  positive(num_blocks, "num_blocks");
  positive(num_heads, "num_heads");
  positive(ffn_dim, "ffn_dim");
  positive(max_seq_len, "max_seq_len");
  positive(num_classes, "num_classes");
  if (hidden_dim % num_heads != 0) throw RegistrationError("hidden_dim must be divisible by num_heads");
  if (static_cast<int>(label_names.size()) != num_classes) {
    throw RegistrationError("label_names length must equal num_classes");
  }
  if (!class_prior.empty() && static_cast<int>(class_prior.size()) != num_classes) {
    throw RegistrationError("class_prior length must equal num_classes");
  }
}

void to_json(nlohmann::json& j, const EncoderConfig& c) {
  j = nlohmann::json{{"vocab_size", c.vocab_size}, {"hidden_dim", c.hidden_dim},
                     {"num_blocks", c.num_blocks}, {"num_heads", c.num_heads},
                     {"ffn_dim", c.ffn_dim},       {"max_seq_len", c.max_seq_len},
                     {"num_classes", c.num_classes}, {"label_names", c.label_names},
                     {"class_prior", c.class_prior}};
}

void from_json(const nlohmann::json& j, EncoderConfig& c) {
  for (const char* required : {"hidden_dim", "num_blocks", "num_classes"}) {
    if (!j.contains(required)) throw RegistrationError(std::string("config is missing ") + required);
  }
  c.vocab_size = j.value("vocab_size", 0);
  c.hidden_dim = j.at("hidden_dim").get<int>();
  c.num_blocks = j.at("num_blocks").get<int>();
  c.num_heads = j.value("num_heads", 2);
  c.ffn_dim = j.value("ffn_dim", 4 * c.hidden_dim);
  c.max_seq_len = j.value("max_seq_len", 128);
  c.num_classes = j.at("num_classes").get<int>();
  c.label_names = j.value("label_names", std::vector<std::string>{});
  c.class_prior = j.value("class_prior", std::vector<double>{});
}

BaseWeights BaseWeights::initialize(const EncoderConfig& config, std::uint64_t seed) {
  config.validate();
  std::mt19937_64 rng(seed);
  constexpr float kStd = 0.02f;
  const int h = config.hidden_dim;
  BaseWeights w;
  w.config = config;
  w.token_embedding = normal(config.vocab_size, h, kStd, rng);
  w.position_embedding = normal(config.max_seq_len, h, kStd, rng);
  w.embed_norm = make_norm(h);
  for (int b = 0; b < config.num_blocks; ++b) {
    EncoderBlock block;
    block.query = make_linear(h, h, kStd, rng);
    block.key = make_linear(h, h, kStd, rng);
    block.value = make_linear(h, h, kStd, rng);
    block.attn_out = make_linear(h, h, kStd, rng);
    block.attn_norm = make_norm(h);
    block.ffn_in = make_linear(h, config.ffn_dim, kStd, rng);
    block.ffn_out = make_linear(config.ffn_dim, h, kStd, rng);
    block.ffn_norm = make_norm(h);
    w.blocks.push_back(std::move(block));
  }
  w.head = make_linear(h, config.num_classes, kStd, rng);
  return w;
}

BaseWeights BaseWeights::zeros_like(const BaseWeights& other) {
  BaseWeights z = other;
  z.visit([](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

BaseWeights BaseWeights::from_tensors(const EncoderConfig& config, std::map<std::string, Matrix> tensors) {
  config.validate();
  // Shapes come from an initialized template; values from the archive.
  BaseWeights w = initialize(config, 0);
  w.visit([&](const std::string& name, Matrix& m) { m = take(tensors, name, m.rows(), m.cols()); });
  if (!tensors.empty()) throw RegistrationError("weights archive has unexpected tensor " + tensors.begin()->first);
  return w;
}

void BaseWeights::visit(const TensorVisitor& fn) {
  fn("embed.token", token_embedding);
  fn("embed.position", position_embedding);
  visit_norm("embed.norm", embed_norm, fn);
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string p = "block" + std::to_string(b);
    auto& blk = blocks[b];
    visit_linear(p + ".attn.query", blk.query, fn);
    visit_linear(p + ".attn.key", blk.key, fn);
    visit_linear(p + ".attn.value", blk.value, fn);
    visit_linear(p + ".attn.out", blk.attn_out, fn);
    visit_norm(p + ".attn.norm", blk.attn_norm, fn);
    visit_linear(p + ".ffn.in", blk.ffn_in, fn);
    visit_linear(p + ".ffn.out", blk.ffn_out, fn);
    visit_norm(p + ".ffn.norm", blk.ffn_norm, fn);
  }
  visit_linear("head", head, fn);
}

void BaseWeights::visit(const ConstTensorVisitor& fn) const {
  const_cast<BaseWeights*>(this)->visit(TensorVisitor([&](const std::string& n, Matrix& m) { fn(n, m); }));
}

std::vector<NamedTensor> BaseWeights::named_tensors() const {
  std::vector<NamedTensor> out;
  visit(ConstTensorVisitor([&](const std::string& n, const Matrix& m) { out.push_back({n, &m}); }));
  return out;
}

AdapterWeights AdapterWeights::initialize(int num_blocks, int hidden_dim, int bottleneck_dim,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  AdapterWeights w;
  for (int b = 0; b < num_blocks; ++b) {
    Adapter a;
    a.down = make_linear(hidden_dim, bottleneck_dim, 0.05f, rng);
    a.up = {Matrix::Zero(bottleneck_dim, hidden_dim), Matrix::Zero(1, hidden_dim)};
    w.blocks.push_back(std::move(a));
  }
  return w;
}

AdapterWeights AdapterWeights::zeros_like(const AdapterWeights& other) {
  AdapterWeights z = other;
  z.visit([](const std::string&, Matrix& m) { m.setZero(); });
  return z;
}

AdapterWeights AdapterWeights::from_tensors(std::map<std::string, Matrix> tensors) {
  AdapterWeights w;
  for (int b = 0;; ++b) {
    const std::string p = "adapter" + std::to_string(b);
    if (!tensors.contains(p + ".down.weight")) break;
    const auto& dw = tensors.at(p + ".down.weight");
    const auto hidden = dw.rows();
    const auto bottleneck = dw.cols();
    Adapter a;
    a.down.weight = take(tensors, p + ".down.weight", hidden, bottleneck);
    a.down.bias = take(tensors, p + ".down.bias", 1, bottleneck);
    a.up.weight = take(tensors, p + ".up.weight", bottleneck, hidden);
    a.up.bias = take(tensors, p + ".up.bias", 1, hidden);
    w.blocks.push_back(std::move(a));
  }
  if (!tensors.empty()) throw RegistrationError("adapter archive has unexpected tensor " + tensors.begin()->first);
  return w;
}

int AdapterWeights::bottleneck_dim() const {
  return blocks.empty() ? 0 : static_cast<int>(blocks.front().down.weight.cols());
}

void AdapterWeights::visit(const TensorVisitor& fn) {
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const std::string p = "adapter" + std::to_string(b);
    visit_linear(p + ".down", blocks[b].down, fn);
    visit_linear(p + ".up", blocks[b].up, fn);
  }
}

void AdapterWeights::visit(const ConstTensorVisitor& fn) const {
  const_cast<AdapterWeights*>(this)->visit(TensorVisitor([&](const std::string& n, Matrix& m) { fn(n, m); }));
}

std::vector<NamedTensor> AdapterWeights::named_tensors() const {
  std::vector<NamedTensor> out;
  visit(ConstTensorVisitor([&](const std::string& n, const Matrix& m) { out.push_back({n, &m}); }));
  return out;
}

Matrix forward(const BaseWeights& base, const AdapterWeights* adapters, std::span<const std::int32_t> ids,
               ForwardCache* cache) {
  const auto& cfg = base.config;
  const auto t = static_cast<Eigen::Index>(ids.size());
  if (t == 0 || t > cfg.max_seq_len) throw InputError("sequence length out of range");
  const int heads = cfg.num_heads;
  const int head_dim = cfg.hidden_dim / heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));

  Matrix x(t, cfg.hidden_dim);
  for (Eigen::Index i = 0; i < t; ++i) {
    x.row(i) = base.token_embedding.row(ids[i]) + base.position_embedding.row(i);
  }
  if (cache) {
    cache->ids.assign(ids.begin(), ids.end());
    cache->blocks.assign(base.blocks.size(), {});
  }
  x = layer_norm(x, base.embed_norm, cache ? &cache->embed_norm : nullptr);

  for (std::size_t b = 0; b < base.blocks.size(); ++b) {
    const auto& blk = base.blocks[b];
    BlockCache* bc = cache ? &cache->blocks[b] : nullptr;

    Matrix q = apply(blk.query, x);
    Matrix k = apply(blk.key, x);
    Matrix v = apply(blk.value, x);
    Matrix context(t, cfg.hidden_dim);
    if (bc) bc->attn_probs.resize(heads);
    for (int h = 0; h < heads; ++h) {
      Matrix scores = q.middleCols(h * head_dim, head_dim) * k.middleCols(h * head_dim, head_dim).transpose();
      scores *= scale;
      softmax_rows(scores);
      context.middleCols(h * head_dim, head_dim).noalias() = scores * v.middleCols(h * head_dim, head_dim);
      if (bc) bc->attn_probs[h] = std::move(scores);
    }
    Matrix residual = x + apply(blk.attn_out, context);
    Matrix x1 = layer_norm(residual, blk.attn_norm, bc ? &bc->attn_norm : nullptr);

    Matrix ffn_pre = apply(blk.ffn_in, x1);
    Matrix ffn_act = gelu(ffn_pre);
    Matrix x2 = layer_norm(x1 + apply(blk.ffn_out, ffn_act), blk.ffn_norm, bc ? &bc->ffn_norm : nullptr);

    Matrix out;
    if (adapters) {
      const auto& ad = adapters->blocks[b];
      Matrix pre = apply(ad.down, x2);
      Matrix act = gelu(pre);
      out = x2 + apply(ad.up, act);
      if (bc) {
        bc->adapter_pre = std::move(pre);
        bc->adapter_act = std::move(act);
      }
    } else {
      out = x2;
    }

    if (bc) {
      bc->input = std::move(x);
      bc->query = std::move(q);
      bc->key = std::move(k);
      bc->value = std::move(v);
      bc->context = std::move(context);
      bc->attn_normed = std::move(x1);
      bc->ffn_pre = std::move(ffn_pre);
      bc->ffn_act = std::move(ffn_act);
      bc->ffn_normed = std::move(x2);
    }
    x = std::move(out);
  }

  Matrix pooled = x.colwise().mean();
  Matrix logits = apply(base.head, pooled);
  if (cache) cache->pooled = std::move(pooled);
  return logits;
}

void backward(const BaseWeights& base, const AdapterWeights* adapters, const ForwardCache& cache,
              const Matrix& dlogits, BaseWeights* base_grad, AdapterWeights* adapter_grad) {
  const auto& cfg = base.config;
  const auto t = static_cast<Eigen::Index>(cache.ids.size());
  const int heads = cfg.num_heads;
  const int head_dim = cfg.hidden_dim / heads;
  const float scale = 1.0f / std::sqrt(static_cast<float>(head_dim));
  if (!base_grad && !(adapters && adapter_grad)) return;

  linear_backward(cache.pooled, dlogits, base_grad ? &base_grad->head : nullptr);
  Matrix dpooled = dlogits * base.head.weight.transpose();
  Matrix dx = dpooled.replicate(t, 1) / static_cast<float>(t);

  for (std::size_t bi = base.blocks.size(); bi-- > 0;) {
    const auto& blk = base.blocks[bi];
    const auto& bc = cache.blocks[bi];
    EncoderBlock* g = base_grad ? &base_grad->blocks[bi] : nullptr;

    Matrix dx2;
    if (adapters) {
      const auto& ad = adapters->blocks[bi];
      Adapter* ag = adapter_grad ? &adapter_grad->blocks[bi] : nullptr;
      if (ag) linear_backward(bc.adapter_act, dx, &ag->up);
      Matrix dpre = (dx * ad.up.weight.transpose()).cwiseProduct(gelu_grad(bc.adapter_pre));
      if (ag) linear_backward(bc.ffn_normed, dpre, &ag->down);
      dx2 = dx + dpre * ad.down.weight.transpose();
      // Nothing below the lowest adapter is trainable.
      if (!base_grad && bi == 0) return;
    } else {
      dx2 = std::move(dx);
    }

    Matrix dr2 = layer_norm_backward(dx2, bc.ffn_norm, blk.ffn_norm, g ? &g->ffn_norm : nullptr);
    linear_backward(bc.ffn_act, dr2, g ? &g->ffn_out : nullptr);
    Matrix dpre = (dr2 * blk.ffn_out.weight.transpose()).cwiseProduct(gelu_grad(bc.ffn_pre));
    linear_backward(bc.attn_normed, dpre, g ? &g->ffn_in : nullptr);
    Matrix dx1 = dr2 + dpre * blk.ffn_in.weight.transpose();

    Matrix dr1 = layer_norm_backward(dx1, bc.attn_norm, blk.attn_norm, g ? &g->attn_norm : nullptr);
    linear_backward(bc.context, dr1, g ? &g->attn_out : nullptr);
    Matrix dcontext = dr1 * blk.attn_out.weight.transpose();

    Matrix dq(t, cfg.hidden_dim), dk(t, cfg.hidden_dim), dv(t, cfg.hidden_dim);
    for (int h = 0; h < heads; ++h) {
      const auto cols = [&](const Matrix& m) { return m.middleCols(h * head_dim, head_dim); };
      const Matrix& probs = bc.attn_probs[h];
      Matrix dout = cols(dcontext);
      Matrix dprobs = dout * cols(bc.value).transpose();
      dv.middleCols(h * head_dim, head_dim).noalias() = probs.transpose() * dout;
      Eigen::VectorXf row_dot = (dprobs.array() * probs.array()).rowwise().sum();
      Matrix dscores = probs.array() * (dprobs.array().colwise() - row_dot.array());
      dscores *= scale;
      dq.middleCols(h * head_dim, head_dim).noalias() = dscores * cols(bc.key);
      dk.middleCols(h * head_dim, head_dim).noalias() = dscores.transpose() * cols(bc.query);
    }
    linear_backward(bc.input, dq, g ? &g->query : nullptr);
    linear_backward(bc.input, dk, g ? &g->key : nullptr);
    linear_backward(bc.input, dv, g ? &g->value : nullptr);
    dx = dr1;
    dx.noalias() += dq * blk.query.weight.transpose();
    dx.noalias() += dk * blk.key.weight.transpose();
    dx.noalias() += dv * blk.value.weight.transpose();
  }

  if (!base_grad) return;
  Matrix dembed = layer_norm_backward(dx, cache.embed_norm, base.embed_norm, &base_grad->embed_norm);
  for (Eigen::Index i = 0; i < t; ++i) {
    base_grad->token_embedding.row(cache.ids[i]) += dembed.row(i);
    base_grad->position_embedding.row(i) += dembed.row(i);
  }
}

double cross_entropy(const Matrix& logits, int label, Matrix* dlogits) {
  std::vector<double> p = softmax(logits);
  if (dlogits) {
    dlogits->resize(1, logits.cols());
    for (Eigen::Index c = 0; c < logits.cols(); ++c) {
      (*dlogits)(0, c) = static_cast<float>(p[c] - (c == label ? 1.0 : 0.0));
    }
  }
  return -std::log(std::max(p[label], 1e-300));
}

std::vector<double> softmax(const Matrix& logits) {
  const auto n = logits.cols();
  std::vector<double> p(n);
  double max = logits(0, 0);
  for (Eigen::Index c = 1; c < n; ++c) max = std::max(max, static_cast<double>(logits(0, c)));
  double sum = 0.0;
  for (Eigen::Index c = 0; c < n; ++c) {
    p[c] = std::exp(static_cast<double>(logits(0, c)) - max);
    sum += p[c];
  }
  for (auto& v : p) v /= sum;
  return p;
}

}  // namespace rationale::model

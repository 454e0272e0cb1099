// Copyright 2026 The ConflictLab Authors
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

#include "conflictlab/model.h"

#include <bit>
#include <cmath>
#include <cstring>
#include <limits>

#include "conflictlab/error.h"
#include "conflictlab/io.h"
#include "conflictlab/random.h"

namespace conflictlab {
namespace {

constexpr double kInitStd = 0.02;
constexpr double kLayerNormEps = 1e-5;
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2 / pi)
constexpr double kGeluA = 0.044715;

template <typename T>
T Gelu(T x) {
  const T u = static_cast<T>(kGeluC) * (x + static_cast<T>(kGeluA) * x * x * x);
  return static_cast<T>(0.5) * x * (static_cast<T>(1) + std::tanh(u));
}

template <typename T>
T GeluDerivative(T x) {
  const T u = static_cast<T>(kGeluC) * (x + static_cast<T>(kGeluA) * x * x * x);
  const T t = std::tanh(u);
  const T du = static_cast<T>(kGeluC) * (static_cast<T>(1) + static_cast<T>(3 * kGeluA) * x * x);
  return static_cast<T>(0.5) * (static_cast<T>(1) + t) +
         static_cast<T>(0.5) * x * (static_cast<T>(1) - t * t) * du;
}

bool IsResidualProjection(const std::string& name) {
  return name.ends_with(".w_o") || name.ends_with(".w_ff2");
}

bool IsGain(const std::string& name) { return name.ends_with("_g"); }

bool IsBias(const std::string& name) {
  return name.ends_with("_b") || name.ends_with(".b_qkv") || name.ends_with(".b_o") ||
         name.ends_with(".b_ff1") || name.ends_with(".b_ff2");
}

}  // namespace

void LmConfig::Validate() const {
  auto positive = [](int v, const char* what) {
    if (v <= 0) {
      throw Error(ErrorCategory::kValidation,
                  std::string("model config: ") + what + " must be positive");
    }
  };
  positive(vocab_size, "vocab_size");
  positive(d_model, "d_model");
  positive(n_layers, "n_layers");
  positive(n_heads, "n_heads");
  positive(d_ff, "d_ff");
  positive(max_context, "max_context");
  if (d_model % n_heads != 0) {
    throw Error(ErrorCategory::kValidation, "model config: d_model " +
                                                std::to_string(d_model) +
                                                " not divisible by n_heads " +
                                                std::to_string(n_heads));
  }
}

nlohmann::ordered_json LmConfig::ToJson() const {
  return {{"vocab_size", vocab_size}, {"d_model", d_model},   {"n_layers", n_layers},
          {"n_heads", n_heads},       {"d_ff", d_ff},         {"max_context", max_context}};
}

LmConfig LmConfig::FromJson(const nlohmann::ordered_json& j) {
  LmConfig c;
  try {
    c.vocab_size = j.value("vocab_size", c.vocab_size);
    c.d_model = j.value("d_model", c.d_model);
    c.n_layers = j.value("n_layers", c.n_layers);
    c.n_heads = j.value("n_heads", c.n_heads);
    c.d_ff = j.value("d_ff", c.d_ff);
    c.max_context = j.value("max_context", c.max_context);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, std::string("model config: ") + e.what());
  }
  return c;
}

ParameterLayout::ParameterLayout(const LmConfig& c) {
  auto add = [this](std::string name, int rows, int cols) {
    blocks_.push_back({std::move(name), total_, rows, cols});
    total_ += blocks_.back().size();
  };
  add("tok_emb", c.vocab_size, c.d_model);
  add("pos_emb", c.max_context, c.d_model);
  for (int i = 0; i < c.n_layers; ++i) {
    const std::string p = "layer" + std::to_string(i) + ".";
    add(p + "ln1_g", 1, c.d_model);
    add(p + "ln1_b", 1, c.d_model);
    add(p + "w_qkv", c.d_model, 3 * c.d_model);
    add(p + "b_qkv", 1, 3 * c.d_model);
    add(p + "w_o", c.d_model, c.d_model);
    add(p + "b_o", 1, c.d_model);
    add(p + "ln2_g", 1, c.d_model);
    add(p + "ln2_b", 1, c.d_model);
    add(p + "w_ff1", c.d_model, c.d_ff);
    add(p + "b_ff1", 1, c.d_ff);
    add(p + "w_ff2", c.d_ff, c.d_model);
    add(p + "b_ff2", 1, c.d_model);
  }
  add("lnf_g", 1, c.d_model);
  add("lnf_b", 1, c.d_model);
  add("w_out", c.d_model, c.vocab_size);
}

const ParameterBlock& ParameterLayout::Find(const std::string& name) const {
  for (const auto& b : blocks_) {
    if (b.name == name) return b;
  }
  throw Error(ErrorCategory::kArgument, "no parameter block '" + name + "'");
}

nlohmann::ordered_json ParameterLayout::ToJson() const {
  nlohmann::ordered_json blocks = nlohmann::ordered_json::array();
  for (const auto& b : blocks_) {
    blocks.push_back({{"name", b.name}, {"offset", b.offset}, {"rows", b.rows},
                      {"cols", b.cols}});
  }
  return {{"order", "row-major"}, {"total", total_}, {"blocks", blocks}};
}

template <typename T>
struct Transformer<T>::LayerCache {
  Matrix x_in, xhat1, h1, qkv, attn_out, x_mid, xhat2, h2, f, a;
  Eigen::Matrix<T, Eigen::Dynamic, 1> rstd1, rstd2;
  std::vector<Matrix> probs;  // per head, [len x len]
};

template <typename T>
struct Transformer<T>::ForwardCache {
  std::vector<LayerCache> layers;
  Matrix x_final, xhatf, hf;
  Eigen::Matrix<T, Eigen::Dynamic, 1> rstdf;
};

namespace {

template <typename Matrix, typename Vector, typename Row>
void LayerNormForward(const Matrix& x, const Row& g, const Row& b, Matrix& xhat,
                      Vector& rstd, Matrix& y) {
  using T = typename Matrix::Scalar;
  const auto n = x.rows();
  const auto d = x.cols();
  xhat.resize(n, d);
  rstd.resize(n);
  for (Eigen::Index t = 0; t < n; ++t) {
    const T mean = x.row(t).mean();
    const T var = (x.row(t).array() - mean).square().mean();
    rstd(t) = static_cast<T>(1) / std::sqrt(var + static_cast<T>(kLayerNormEps));
    xhat.row(t) = (x.row(t).array() - mean) * rstd(t);
  }
  y = (xhat.array().rowwise() * g.row(0).array()).rowwise() + b.row(0).array();
}

// dx for y = xhat * g + b; accumulates dg, db.
template <typename Matrix, typename Vector, typename Row, typename GradRow>
Matrix LayerNormBackward(const Matrix& dy, const Matrix& xhat, const Vector& rstd,
                         const Row& g, GradRow dg, GradRow db) {
  using T = typename Matrix::Scalar;
  dg.array() += (dy.array() * xhat.array()).colwise().sum();
  db.array() += dy.array().colwise().sum();
  Matrix dxhat = dy.array().rowwise() * g.row(0).array();
  Matrix dx(dy.rows(), dy.cols());
  const T inv_d = static_cast<T>(1) / static_cast<T>(dy.cols());
  for (Eigen::Index t = 0; t < dy.rows(); ++t) {
    const T m1 = dxhat.row(t).sum() * inv_d;
    const T m2 = dxhat.row(t).dot(xhat.row(t)) * inv_d;
    dx.row(t) = rstd(t) * (dxhat.row(t).array() - m1 - xhat.row(t).array() * m2);
  }
  return dx;
}

}  // namespace

template <typename T>
Transformer<T>::Transformer(const LmConfig& config)
    : config_(config), layout_((config.Validate(), config)), params_(layout_.total(), T(0)) {}

template <typename T>
void Transformer<T>::InitRandom(uint64_t seed) {
  Rng rng(seed);
  const double residual_scale = 1.0 / std::sqrt(2.0 * config_.n_layers);
  for (const auto& b : layout_.blocks()) {
    T* p = params_.data() + b.offset;
    if (IsGain(b.name)) {
      std::fill(p, p + b.size(), T(1));
    } else if (IsBias(b.name)) {
      std::fill(p, p + b.size(), T(0));
    } else {
      const double s = kInitStd * (IsResidualProjection(b.name) ? residual_scale : 1.0);
      for (size_t i = 0; i < b.size(); ++i) p[i] = static_cast<T>(rng.Normal() * s);
    }
  }
}

template <typename T>
void Transformer<T>::SetZero() {
  std::fill(params_.begin(), params_.end(), T(0));
}

template <typename T>
Eigen::Map<const typename Transformer<T>::Matrix> Transformer<T>::Block(size_t index) const {
  const auto& b = layout_.blocks()[index];
  return Eigen::Map<const Matrix>(params_.data() + b.offset, b.rows, b.cols);
}

template <typename T>
Eigen::Map<const typename Transformer<T>::Matrix> Transformer<T>::Block(
    const std::string& name) const {
  const auto& b = layout_.Find(name);
  return Eigen::Map<const Matrix>(params_.data() + b.offset, b.rows, b.cols);
}

template <typename T>
void Transformer<T>::CheckIds(std::span<const TokenId> ids) const {
  if (ids.empty()) throw Error(ErrorCategory::kArgument, "empty token sequence");
  if (ids.size() > static_cast<size_t>(config_.max_context)) {
    throw Error(ErrorCategory::kContext,
                "sequence of " + std::to_string(ids.size()) + " tokens exceeds max_context " +
                    std::to_string(config_.max_context));
  }
  for (TokenId id : ids) {
    if (id < 0 || id >= config_.vocab_size) {
      throw Error(ErrorCategory::kVocabulary, "token id " + std::to_string(id) +
                                                  " outside vocabulary of " +
                                                  std::to_string(config_.vocab_size));
    }
  }
}

template <typename T>
void Transformer<T>::Forward(std::span<const TokenId> ids, ForwardCache* cache,
                             Matrix* logits, int stop_layer, Matrix* hidden) const {
  CheckIds(ids);
  const int len = static_cast<int>(ids.size());
  const int d = config_.d_model;
  const int nh = config_.n_heads;
  const int dh = d / nh;
  const T scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  auto tok = Block(0);
  auto pos = Block(1);
  Matrix x(len, d);
  for (int t = 0; t < len; ++t) x.row(t) = tok.row(ids[static_cast<size_t>(t)]) + pos.row(t);
  if (stop_layer == 0) {
    *hidden = std::move(x);
    return;
  }
  if (cache) cache->layers.resize(static_cast<size_t>(config_.n_layers));

  LayerCache local;
  for (int l = 0; l < config_.n_layers; ++l) {
    LayerCache& c = cache ? cache->layers[static_cast<size_t>(l)] : local;
    const size_t base = 2 + static_cast<size_t>(l) * kBlocksPerLayer;
    auto ln1_g = Block(base + 0), ln1_b = Block(base + 1);
    auto w_qkv = Block(base + 2), b_qkv = Block(base + 3);
    auto w_o = Block(base + 4), b_o = Block(base + 5);
    auto ln2_g = Block(base + 6), ln2_b = Block(base + 7);
    auto w_ff1 = Block(base + 8), b_ff1 = Block(base + 9);
    auto w_ff2 = Block(base + 10), b_ff2 = Block(base + 11);

    c.x_in = x;
    LayerNormForward(c.x_in, ln1_g, ln1_b, c.xhat1, c.rstd1, c.h1);
    c.qkv.noalias() = c.h1 * w_qkv;
    c.qkv.rowwise() += b_qkv.row(0);
    c.attn_out.resize(len, d);
    c.probs.resize(static_cast<size_t>(nh));
    for (int h = 0; h < nh; ++h) {
      auto q = c.qkv.block(0, h * dh, len, dh);
      auto k = c.qkv.block(0, d + h * dh, len, dh);
      auto v = c.qkv.block(0, 2 * d + h * dh, len, dh);
      Matrix& p = c.probs[static_cast<size_t>(h)];
      p.noalias() = q * k.transpose();
      for (int i = 0; i < len; ++i) {
        auto row = p.row(i).head(i + 1);
        row *= scale;
        const T mx = row.maxCoeff();
        row = (row.array() - mx).exp();
        row /= row.sum();
        p.row(i).tail(len - i - 1).setZero();
      }
      c.attn_out.block(0, h * dh, len, dh).noalias() = p * v;
    }
    x.noalias() += c.attn_out * w_o;
    x.rowwise() += b_o.row(0);
    c.x_mid = x;
    LayerNormForward(c.x_mid, ln2_g, ln2_b, c.xhat2, c.rstd2, c.h2);
    c.f.noalias() = c.h2 * w_ff1;
    c.f.rowwise() += b_ff1.row(0);
    c.a = c.f.unaryExpr([](T v) { return Gelu(v); });
    x.noalias() += c.a * w_ff2;
    x.rowwise() += b_ff2.row(0);
    if (stop_layer == l + 1) {
      *hidden = std::move(x);
      return;
    }
  }

  const size_t fin = 2 + static_cast<size_t>(config_.n_layers) * kBlocksPerLayer;
  Matrix xhatf, hf;
  Eigen::Matrix<T, Eigen::Dynamic, 1> rstdf;
  LayerNormForward(x, Block(fin), Block(fin + 1), xhatf, rstdf, hf);
  if (stop_layer == kLastLayer && hidden) {
    *hidden = std::move(hf);
    return;
  }
  if (logits) logits->noalias() = hf * Block(fin + 2);
  if (cache) {
    cache->x_final = std::move(x);
    cache->xhatf = std::move(xhatf);
    cache->rstdf = std::move(rstdf);
    cache->hf = std::move(hf);
  }
}

template <typename T>
typename Transformer<T>::Matrix Transformer<T>::Logits(std::span<const TokenId> ids) const {
  Matrix logits;
  Forward(ids, nullptr, &logits, config_.n_layers + 1, nullptr);
  return logits;
}

template <typename T>
typename Transformer<T>::Matrix Transformer<T>::HiddenStates(std::span<const TokenId> ids,
                                                             int layer) const {
  if (layer != kLastLayer && (layer < 0 || layer > config_.n_layers)) {
    throw Error(ErrorCategory::kArgument,
                "layer " + std::to_string(layer) + " outside 0.." +
                    std::to_string(config_.n_layers) + " (or last)");
  }
  Matrix hidden;
  Forward(ids, nullptr, nullptr, layer, &hidden);
  return hidden;
}

namespace {

template <typename Row>
double LogSumExp(const Row& row) {
  double mx = -std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < row.size(); ++j) mx = std::max(mx, static_cast<double>(row(j)));
  double s = 0.0;
  for (Eigen::Index j = 0; j < row.size(); ++j) s += std::exp(static_cast<double>(row(j)) - mx);
  return mx + std::log(s);
}

}  // namespace

template <typename T>
double Transformer<T>::LogProb(std::span<const TokenId> ids) const {
  const Matrix logits = Logits(ids);
  double total = 0.0;
  for (size_t t = 0; t + 1 < ids.size(); ++t) {
    const auto row = logits.row(static_cast<Eigen::Index>(t));
    total += static_cast<double>(row(ids[t + 1])) - LogSumExp(row);
  }
  return total;
}

template <typename T>
double Transformer<T>::NllAndGradient(std::span<const TokenId> ids, std::span<T> grad,
                                      T scale) const {
  if (grad.size() != params_.size()) {
    throw Error(ErrorCategory::kInternal, "gradient buffer has the wrong size");
  }
  ForwardCache cache;
  Matrix logits;
  Forward(ids, &cache, &logits, config_.n_layers + 1, nullptr);
  const int len = static_cast<int>(ids.size());
  const int d = config_.d_model;
  const int nh = config_.n_heads;
  const int dh = d / nh;
  const T attn_scale = static_cast<T>(1.0 / std::sqrt(static_cast<double>(dh)));

  auto gblock = [&](size_t index) {
    const auto& b = layout_.blocks()[index];
    return Eigen::Map<Matrix>(grad.data() + b.offset, b.rows, b.cols);
  };

  // dlogits = scale * (softmax - onehot) on positions predicting a token.
  double nll = 0.0;
  Matrix dlogits = Matrix::Zero(len, config_.vocab_size);
  for (int t = 0; t + 1 < len; ++t) {
    const auto row = logits.row(t);
    const double lse = LogSumExp(row);
    const TokenId target = ids[static_cast<size_t>(t + 1)];
    nll += lse - static_cast<double>(row(target));
    for (int j = 0; j < config_.vocab_size; ++j) {
      dlogits(t, j) = scale * static_cast<T>(std::exp(static_cast<double>(row(j)) - lse));
    }
    dlogits(t, target) -= scale;
  }

  const size_t fin = 2 + static_cast<size_t>(config_.n_layers) * kBlocksPerLayer;
  gblock(fin + 2).noalias() += cache.hf.transpose() * dlogits;
  Matrix dhf = dlogits * Block(fin + 2).transpose();
  Matrix dx = LayerNormBackward(dhf, cache.xhatf, cache.rstdf, Block(fin), gblock(fin),
                                gblock(fin + 1));

  for (int l = config_.n_layers - 1; l >= 0; --l) {
    const LayerCache& c = cache.layers[static_cast<size_t>(l)];
    const size_t base = 2 + static_cast<size_t>(l) * kBlocksPerLayer;

    // Feed-forward sublayer: x_out = x_mid + gelu(LN2(x_mid) W1 + b1) W2 + b2.
    gblock(base + 10).noalias() += c.a.transpose() * dx;
    gblock(base + 11).array() += dx.array().colwise().sum();
    Matrix df = (dx * Block(base + 10).transpose()).array() *
                c.f.unaryExpr([](T v) { return GeluDerivative(v); }).array();
    gblock(base + 8).noalias() += c.h2.transpose() * df;
    gblock(base + 9).array() += df.array().colwise().sum();
    Matrix dh2 = df * Block(base + 8).transpose();
    dx += LayerNormBackward(dh2, c.xhat2, c.rstd2, Block(base + 6), gblock(base + 6),
                            gblock(base + 7));

    // Attention sublayer: x_mid = x_in + Attn(LN1(x_in)) Wo + bo.
    gblock(base + 4).noalias() += c.attn_out.transpose() * dx;
    gblock(base + 5).array() += dx.array().colwise().sum();
    Matrix dattn = dx * Block(base + 4).transpose();
    Matrix dqkv(len, 3 * d);
    for (int h = 0; h < nh; ++h) {
      const Matrix& p = c.probs[static_cast<size_t>(h)];
      auto q = c.qkv.block(0, h * dh, len, dh);
      auto k = c.qkv.block(0, d + h * dh, len, dh);
      auto v = c.qkv.block(0, 2 * d + h * dh, len, dh);
      auto d_out = dattn.block(0, h * dh, len, dh);
      Matrix dp = d_out * v.transpose();
      dqkv.block(0, 2 * d + h * dh, len, dh).noalias() = p.transpose() * d_out;
      Eigen::Matrix<T, Eigen::Dynamic, 1> inner = (dp.array() * p.array()).rowwise().sum();
      Matrix ds = p.array() * (dp.array().colwise() - inner.array());
      ds *= attn_scale;
      dqkv.block(0, h * dh, len, dh).noalias() = ds * k;
      dqkv.block(0, d + h * dh, len, dh).noalias() = ds.transpose() * q;
    }
    gblock(base + 2).noalias() += c.h1.transpose() * dqkv;
    gblock(base + 3).array() += dqkv.array().colwise().sum();
    Matrix dh1 = dqkv * Block(base + 2).transpose();
    dx += LayerNormBackward(dh1, c.xhat1, c.rstd1, Block(base + 0), gblock(base + 0),
                            gblock(base + 1));
  }

  auto dtok = gblock(0);
  auto dpos = gblock(1);
  for (int t = 0; t < len; ++t) {
    dtok.row(ids[static_cast<size_t>(t)]) += dx.row(t);
    dpos.row(t) += dx.row(t);
  }
  return nll;
}

template class Transformer<float>;
template class Transformer<double>;

SequenceScore ScoreSequence(const LmModel& model, const Tokenizer& tokenizer,
                            const std::string& text) {
  const auto ids = tokenizer.Encode(text);
  return {model.LogProb(ids), static_cast<int>(ids.size()) - 1};
}

Eigen::VectorXd ExtractRepresentation(const LmModel& model, const Tokenizer& tokenizer,
                                      const std::string& text, int layer,
                                      int skip_leading) {
  const auto ids = tokenizer.Encode(text);
  const auto hidden = model.HiddenStates(ids, layer);
  // Rows 1..len-2 are the text's own tokens.
  const int first = 1 + std::max(skip_leading, 0);
  const int last = static_cast<int>(ids.size()) - 2;
  if (first > last) {
    throw Error(ErrorCategory::kArgument,
                "no tokens left to average in '" + text + "' after skipping " +
                    std::to_string(skip_leading));
  }
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(model.config().d_model);
  for (int t = first; t <= last; ++t) mean += hidden.row(t).transpose().cast<double>();
  return mean / static_cast<double>(last - first + 1);
}

namespace {

constexpr const char* kModelFile = "model.json";
constexpr const char* kWeightsFile = "weights.f32";

uint32_t ToLittleEndian(uint32_t v) {
  if constexpr (std::endian::native == std::endian::little) return v;
  return ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
}

}  // namespace

void SaveCheckpoint(const std::string& dir, const LmModel& model,
                    const Tokenizer& tokenizer, const nlohmann::ordered_json& metadata) {
  if (static_cast<size_t>(model.config().vocab_size) != tokenizer.size()) {
    throw Error(ErrorCategory::kArgument, "tokenizer and model vocabulary sizes differ");
  }
  MakeDirs(dir);
  nlohmann::ordered_json j;
  j["schema_version"] = kSchemaVersion;
  j["config"] = model.config().ToJson();
  j["parameter_count"] = model.parameter_count();
  j["weights"] = kWeightsFile;
  j["layout"] = model.layout().ToJson();
  j["tokenizer"] = tokenizer.ToJson();
  j["metadata"] = metadata;
  WriteJson(JoinPath(dir, kModelFile), j);

  std::string blob(model.parameter_count() * 4, '\0');
  for (size_t i = 0; i < model.parameter_count(); ++i) {
    const uint32_t bits = ToLittleEndian(std::bit_cast<uint32_t>(model.params()[i]));
    std::memcpy(blob.data() + 4 * i, &bits, 4);
  }
  WriteFile(JoinPath(dir, kWeightsFile), blob);
}

Checkpoint LoadCheckpoint(const std::string& dir) {
  const auto j = ReadJson(JoinPath(dir, kModelFile));
  CheckSchemaVersion(j, JoinPath(dir, kModelFile));
  LmConfig config;
  Tokenizer tokenizer;
  try {
    config = LmConfig::FromJson(j.at("config"));
    tokenizer = Tokenizer::FromJson(j.at("tokenizer"));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCategory::kValidation, dir + ": " + e.what());
  }
  if (static_cast<size_t>(config.vocab_size) != tokenizer.size()) {
    throw Error(ErrorCategory::kValidation, dir + ": tokenizer and config disagree on vocab size");
  }
  Checkpoint ckpt{LmModel(config), std::move(tokenizer), j.value("metadata", nlohmann::ordered_json::object())};
  const std::string blob = ReadFile(JoinPath(dir, kWeightsFile));
  if (blob.size() != ckpt.model.parameter_count() * 4) {
    throw Error(ErrorCategory::kValidation,
                dir + ": weights.f32 holds " + std::to_string(blob.size() / 4) +
                    " floats, layout needs " + std::to_string(ckpt.model.parameter_count()));
  }
  for (size_t i = 0; i < ckpt.model.parameter_count(); ++i) {
    uint32_t bits;
    std::memcpy(&bits, blob.data() + 4 * i, 4);
    ckpt.model.params()[i] = std::bit_cast<float>(ToLittleEndian(bits));
  }
  return ckpt;
}

}  // namespace conflictlab

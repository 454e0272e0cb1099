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

#ifndef CONFLICTLAB_MODEL_H_
#define CONFLICTLAB_MODEL_H_

#include <Eigen/Core>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "conflictlab/tokenizer.h"
#include "json.hpp"

namespace conflictlab {

struct LmConfig {
  int vocab_size = 0;
  int d_model = 128;
  int n_layers = 4;
  int n_heads = 4;
  int d_ff = 512;
  int max_context = 160;

  // Throws kValidation on non-positive sizes or d_model % n_heads != 0.
  void Validate() const;
  nlohmann::ordered_json ToJson() const;
  static LmConfig FromJson(const nlohmann::ordered_json& j);
  friend bool operator==(const LmConfig&, const LmConfig&) = default;
};

struct ParameterBlock {
  std::string name;
  size_t offset = 0;
  int rows = 0;
  int cols = 0;
  size_t size() const { return static_cast<size_t>(rows) * static_cast<size_t>(cols); }
};

// Flat parameter order (row-major matrices, activations multiply from the
// left, so a d_in x d_out weight maps a row vector x to x * W):
//   tok_emb [V x d], pos_emb [C x d],
//   per layer i: layer{i}.ln1_g [1 x d], ln1_b, w_qkv [d x 3d], b_qkv [1 x 3d],
//                w_o [d x d], b_o, ln2_g, ln2_b, w_ff1 [d x ff], b_ff1 [1 x ff],
//                w_ff2 [ff x d], b_ff2 [1 x d],
//   lnf_g [1 x d], lnf_b [1 x d], w_out [d x V].
// Within w_qkv the columns are q | k | v, each split into n_heads contiguous
// head slices.
class ParameterLayout {
 public:
  explicit ParameterLayout(const LmConfig& config);

  const std::vector<ParameterBlock>& blocks() const { return blocks_; }
  const ParameterBlock& Find(const std::string& name) const;
  size_t total() const { return total_; }
  nlohmann::ordered_json ToJson() const;

 private:
  std::vector<ParameterBlock> blocks_;
  size_t total_ = 0;
};

// Representation layer: 0 is the embedding sum, i in 1..n_layers the residual
// stream after block i, kLastLayer the final LayerNorm output.
inline constexpr int kLastLayer = -1;

// Parameter and gradient storage. Eigen's allocator aligns the buffer to the
// widest SIMD width, so vectorized reductions split the same way on every
// allocation and training stays bit-reproducible.
template <typename T>
using ParamVector = std::vector<T, Eigen::aligned_allocator<T>>;

// Pre-norm decoder-only transformer with learned positions, fused QKV,
// tanh-GELU feed-forward and an untied output projection. Scalar-templated so
// gradient checks can run in double; LmModel is the float instantiation.
template <typename T>
class Transformer {
 public:
  using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit Transformer(const LmConfig& config);

  const LmConfig& config() const { return config_; }
  const ParameterLayout& layout() const { return layout_; }
  size_t parameter_count() const { return params_.size(); }
  ParamVector<T>& params() { return params_; }
  const ParamVector<T>& params() const { return params_; }

  // N(0, 0.02) weights, residual output projections scaled by 1/sqrt(2L),
  // zero biases, unit LayerNorm gains.
  void InitRandom(uint64_t seed);
  void SetZero();

  // [len x vocab]. Throws kContext if len > max_context, kVocabulary on
  // out-of-range ids.
  Matrix Logits(std::span<const TokenId> ids) const;

  // sum_{t>=1} log p(ids[t] | ids[<t]); log-sum-exp in double.
  double LogProb(std::span<const TokenId> ids) const;

  // Hidden states [len x d_model] at `layer` (see kLastLayer).
  Matrix HiddenStates(std::span<const TokenId> ids, int layer) const;

  // Summed next-token NLL over positions 1..len-1. Adds scale * dNLL/dtheta
  // into grad (same layout as params()).
  double NllAndGradient(std::span<const TokenId> ids, std::span<T> grad, T scale) const;

 private:
  struct LayerCache;
  struct ForwardCache;

  void Forward(std::span<const TokenId> ids, ForwardCache* cache, Matrix* logits,
               int stop_layer, Matrix* hidden) const;
  void CheckIds(std::span<const TokenId> ids) const;
  Eigen::Map<const Matrix> Block(const std::string& name) const;
  Eigen::Map<const Matrix> Block(size_t index) const;

  LmConfig config_;
  ParameterLayout layout_;
  ParamVector<T> params_;
  // Block indices cached per layer: ln1_g, ln1_b, w_qkv, b_qkv, w_o, b_o,
  // ln2_g, ln2_b, w_ff1, b_ff1, w_ff2, b_ff2.
  static constexpr int kBlocksPerLayer = 12;
};

using LmModel = Transformer<float>;

extern template class Transformer<float>;
extern template class Transformer<double>;

// Scoring of one text: BOS prepended, EOS included. num_tokens = len - 1.
struct SequenceScore {
  double logprob = 0.0;
  int num_tokens = 0;
  double Normalized() const { return logprob / num_tokens; }
};

SequenceScore ScoreSequence(const LmModel& model, const Tokenizer& tokenizer,
                            const std::string& text);

// Mean hidden state over the text's own tokens (BOS/EOS excluded), skipping
// the first `skip_leading` of them. Throws kArgument on an invalid layer or
// when nothing remains to average.
Eigen::VectorXd ExtractRepresentation(const LmModel& model, const Tokenizer& tokenizer,
                                      const std::string& text, int layer,
                                      int skip_leading = 0);

// Checkpoint directory: model.json (schema_version, config, layout, tokenizer,
// plus caller metadata such as seeds and epoch) and weights.f32, the flat
// parameter vector as little-endian IEEE-754 binary32.
void SaveCheckpoint(const std::string& dir, const LmModel& model,
                    const Tokenizer& tokenizer, const nlohmann::ordered_json& metadata);

struct Checkpoint {
  LmModel model;
  Tokenizer tokenizer;
  nlohmann::ordered_json metadata;
};

Checkpoint LoadCheckpoint(const std::string& dir);

}  // namespace conflictlab

#endif  // CONFLICTLAB_MODEL_H_

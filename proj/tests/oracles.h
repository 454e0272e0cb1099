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

// Independent reference computations shared by the unit and acceptance
// tests. Nothing here calls into the library's numerical code: the
// transformer is a scalar loop over the documented parameter layout, the
// eigensolver is cyclic Jacobi, and attribute extraction is a regex built
// from the template body.

#ifndef CONFLICTLAB_TESTS_ORACLES_H_
#define CONFLICTLAB_TESTS_ORACLES_H_

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "conflictlab/model.h"
#include "conflictlab/templates.h"

namespace oracle {

using Mat = std::vector<std::vector<double>>;

// Block `name` of a flat parameter vector as a rows x cols matrix.
template <typename T>
Mat Param(const conflictlab::ParameterLayout& layout, const conflictlab::ParamVector<T>& params,
          const std::string& name) {
  const auto& b = layout.Find(name);
  Mat m(static_cast<size_t>(b.rows), std::vector<double>(static_cast<size_t>(b.cols)));
  for (int r = 0; r < b.rows; ++r) {
    for (int c = 0; c < b.cols; ++c) {
      m[static_cast<size_t>(r)][static_cast<size_t>(c)] =
          static_cast<double>(params[b.offset + static_cast<size_t>(r * b.cols + c)]);
    }
  }
  return m;
}

inline std::vector<double> VecMat(const std::vector<double>& x, const Mat& w) {
  std::vector<double> y(w[0].size(), 0.0);
  for (size_t i = 0; i < x.size(); ++i) {
    for (size_t j = 0; j < y.size(); ++j) y[j] += x[i] * w[i][j];
  }
  return y;
}

inline std::vector<double> LayerNorm(const std::vector<double>& x, const Mat& g, const Mat& b) {
  double mean = 0.0;
  for (double v : x) mean += v;
  mean /= static_cast<double>(x.size());
  double var = 0.0;
  for (double v : x) var += (v - mean) * (v - mean);
  var /= static_cast<double>(x.size());
  std::vector<double> y(x.size());
  for (size_t i = 0; i < x.size(); ++i) {
    y[i] = (x[i] - mean) / std::sqrt(var + 1e-5) * g[0][i] + b[0][i];
  }
  return y;
}

inline double Gelu(double v) {
  const double c = std::sqrt(2.0 / M_PI);
  return 0.5 * v * (1.0 + std::tanh(c * (v + 0.044715 * v * v * v)));
}

struct Pass {
  std::vector<std::vector<double>> logits;       // len x V
  std::vector<std::vector<std::vector<double>>> hidden;  // layer 0..L, then final LN
};

// Step-by-step forward pass: every position is computed on its own, attending
// to positions 0..t only.
template <typename T>
Pass Forward(const conflictlab::LmConfig& cfg, const conflictlab::ParamVector<T>& params,
             const std::vector<int>& ids) {
  const conflictlab::ParameterLayout layout(cfg);
  const auto p = [&](const std::string& n) { return Param(layout, params, n); };
  const size_t len = ids.size();
  const int d = cfg.d_model;
  const int dh = d / cfg.n_heads;
  const Mat tok = p("tok_emb"), pos = p("pos_emb");

  std::vector<std::vector<double>> x(len, std::vector<double>(static_cast<size_t>(d)));
  for (size_t t = 0; t < len; ++t) {
    for (int j = 0; j < d; ++j) {
      x[t][static_cast<size_t>(j)] =
          tok[static_cast<size_t>(ids[t])][static_cast<size_t>(j)] + pos[t][static_cast<size_t>(j)];
    }
  }
  Pass out;
  out.hidden.push_back(x);

  for (int l = 0; l < cfg.n_layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    const Mat ln1_g = p(pre + "ln1_g"), ln1_b = p(pre + "ln1_b");
    const Mat w_qkv = p(pre + "w_qkv"), b_qkv = p(pre + "b_qkv");
    const Mat w_o = p(pre + "w_o"), b_o = p(pre + "b_o");
    const Mat ln2_g = p(pre + "ln2_g"), ln2_b = p(pre + "ln2_b");
    const Mat w1 = p(pre + "w_ff1"), b1 = p(pre + "b_ff1");
    const Mat w2 = p(pre + "w_ff2"), b2 = p(pre + "b_ff2");

    std::vector<std::vector<double>> qkv(len);
    for (size_t t = 0; t < len; ++t) {
      qkv[t] = VecMat(LayerNorm(x[t], ln1_g, ln1_b), w_qkv);
      for (size_t j = 0; j < qkv[t].size(); ++j) qkv[t][j] += b_qkv[0][j];
    }
    auto next = x;
    for (size_t t = 0; t < len; ++t) {
      std::vector<double> attn(static_cast<size_t>(d), 0.0);
      for (int h = 0; h < cfg.n_heads; ++h) {
        std::vector<double> s(t + 1);
        double mx = -1e300;
        for (size_t u = 0; u <= t; ++u) {
          double dot = 0.0;
          for (int j = 0; j < dh; ++j) {
            dot += qkv[t][static_cast<size_t>(h * dh + j)] *
                   qkv[u][static_cast<size_t>(d + h * dh + j)];
          }
          s[u] = dot / std::sqrt(static_cast<double>(dh));
          mx = std::max(mx, s[u]);
        }
        double z = 0.0;
        for (double& v : s) z += (v = std::exp(v - mx));
        for (size_t u = 0; u <= t; ++u) {
          for (int j = 0; j < dh; ++j) {
            attn[static_cast<size_t>(h * dh + j)] +=
                s[u] / z * qkv[u][static_cast<size_t>(2 * d + h * dh + j)];
          }
        }
      }
      const auto proj = VecMat(attn, w_o);
      for (int j = 0; j < d; ++j) {
        next[t][static_cast<size_t>(j)] += proj[static_cast<size_t>(j)] + b_o[0][static_cast<size_t>(j)];
      }
      auto f = VecMat(LayerNorm(next[t], ln2_g, ln2_b), w1);
      for (size_t j = 0; j < f.size(); ++j) f[j] = Gelu(f[j] + b1[0][j]);
      const auto g = VecMat(f, w2);
      for (int j = 0; j < d; ++j) {
        next[t][static_cast<size_t>(j)] += g[static_cast<size_t>(j)] + b2[0][static_cast<size_t>(j)];
      }
    }
    x = std::move(next);
    out.hidden.push_back(x);
  }

  const Mat gf = p("lnf_g"), bf = p("lnf_b"), w_out = p("w_out");
  std::vector<std::vector<double>> fin(len);
  for (size_t t = 0; t < len; ++t) {
    fin[t] = LayerNorm(x[t], gf, bf);
    out.logits.push_back(VecMat(fin[t], w_out));
  }
  out.hidden.push_back(fin);
  return out;
}

// Chain rule over explicit softmaxes: sum_{t>=1} log softmax(logits[t-1])[ids[t]].
template <typename T>
double LogProb(const conflictlab::LmConfig& cfg, const conflictlab::ParamVector<T>& params,
               const std::vector<int>& ids) {
  const Pass pass = Forward(cfg, params, ids);
  double total = 0.0;
  for (size_t t = 1; t < ids.size(); ++t) {
    const auto& row = pass.logits[t - 1];
    double z = 0.0;
    for (double v : row) z += std::exp(v);
    total += std::log(std::exp(row[static_cast<size_t>(ids[t])]) / z);
  }
  return total;
}

// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns eigenvalues
// in descending order.
inline std::vector<double> JacobiEigenvalues(Mat a) {
  const size_t n = a.size();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (size_t i = 0; i < n; ++i) {
      for (size_t j = i + 1; j < n; ++j) off += a[i][j] * a[i][j];
    }
    if (off < 1e-30) break;
    for (size_t p = 0; p < n; ++p) {
      for (size_t q = p + 1; q < n; ++q) {
        if (std::abs(a[p][q]) < 1e-300) continue;
        const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (size_t k = 0; k < n; ++k) {
          const double akp = a[k][p], akq = a[k][q];
          a[k][p] = c * akp - s * akq;
          a[k][q] = s * akp + c * akq;
        }
        for (size_t k = 0; k < n; ++k) {
          const double apk = a[p][k], aqk = a[q][k];
          a[p][k] = c * apk - s * aqk;
          a[q][k] = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(n);
  for (size_t i = 0; i < n; ++i) ev[i] = a[i][i];
  std::sort(ev.rbegin(), ev.rend());
  return ev;
}

// (n - 1)-normalized sample covariance of row vectors.
inline Mat Covariance(const std::vector<std::vector<double>>& pts) {
  const size_t n = pts.size(), d = pts[0].size();
  std::vector<double> mean(d, 0.0);
  for (const auto& p : pts) {
    for (size_t j = 0; j < d; ++j) mean[j] += p[j] / static_cast<double>(n);
  }
  Mat c(d, std::vector<double>(d, 0.0));
  for (const auto& p : pts) {
    for (size_t i = 0; i < d; ++i) {
      for (size_t j = 0; j < d; ++j) {
        c[i][j] += (p[i] - mean[i]) * (p[j] - mean[j]) / static_cast<double>(n - 1);
      }
    }
  }
  return c;
}

// Values recovered from a rendered biography by matching it against the
// template body with every slot turned into a capture group. The source
// prefix (or suffix) is accepted and its newspaper or volume captured.
struct Extracted {
  std::map<std::string, std::string> slots;  // "name", "birth_date", ...
  std::optional<std::string> newspaper;
  std::optional<int> vol;
};

inline std::string EscapeRegex(const std::string& s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

inline std::optional<Extracted> Extract(const conflictlab::Template& t, const std::string& text) {
  std::string pattern;
  std::vector<std::string> order;
  size_t i = 0;
  while (i < t.body.size()) {
    const size_t open = t.body.find('{', i);
    if (open == std::string::npos) {
      pattern += EscapeRegex(t.body.substr(i));
      break;
    }
    const size_t close = t.body.find('}', open);
    pattern += EscapeRegex(t.body.substr(i, open - i));
    order.push_back(t.body.substr(open + 1, close - open - 1));
    // Pool birth places are "City, Country", dates are "May 29, 2012" and
    // no other value holds a comma; typing the slots keeps adjacent slots
    // such as "{birth_place}, {name}" unambiguous.
    if (order.back() == "birth_place") {
      pattern += "([^,]+, [^,]+?)";
    } else if (order.back() == "birth_date") {
      pattern += "([A-Z][a-z]+ [0-9]{1,2}, [0-9]{4})";
    } else {
      pattern += "([^,]+?)";
    }
    i = close + 1;
  }
  std::string prefix, suffix;
  if (t.prefix == conflictlab::PrefixSlot::kNewspaper) {
    prefix = "(?:According to (.+?), )?";
    suffix = "(?: According to (.+?)\\.)?";
  } else if (t.prefix == conflictlab::PrefixSlot::kVol) {
    prefix = "(?:According to Global News \\(Vol\\. ([0-9]+)\\), )?";
    suffix = "(?: According to Global News \\(Vol\\. ([0-9]+)\\)\\.)?";
  }
  const std::regex re("^" + prefix + pattern + suffix + "$");
  std::smatch m;
  if (!std::regex_match(text, m, re)) return std::nullopt;
  Extracted e;
  const size_t first = prefix.empty() ? 1 : 2;
  for (size_t k = 0; k < order.size(); ++k) e.slots[order[k]] = m[first + k].str();
  if (!prefix.empty()) {
    const std::string src = m[1].matched ? m[1].str() : m[first + order.size()].str();
    if (!src.empty()) {
      if (t.prefix == conflictlab::PrefixSlot::kVol) {
        e.vol = std::stoi(src);
      } else {
        e.newspaper = src;
      }
    }
  }
  return e;
}

}  // namespace oracle

#endif  // CONFLICTLAB_TESTS_ORACLES_H_

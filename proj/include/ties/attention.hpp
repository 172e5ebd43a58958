// Copyright 2026 The ties Authors
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

#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ties/errors.hpp"
#include "ties/rankmetrics.hpp"

namespace ties {

/// How the token sequence splits into a language prefix and visual tokens.
/// Only visual tokens are ever pruned.
struct TokenLayout {
    int n_language = 0;
    int n_visual = 0;
    int visual_offset = 0;  // index of the first visual token

    int seq_len() const noexcept { return n_language + n_visual; }
};

struct ModelDims {
    int layers = 0;
    int heads = 0;
    int d_model = 0;
};

/// Per-layer, per-head row-stochastic attention for one frame: an
/// L x H x N x N tensor, layer-major then head-major then row-major.
/// Immutable after construction; the constructor enforces row sums of 1
/// within `kRowSumTol` (float32 files round rows by up to ~1e-5).
class AttentionStack {
public:
    static constexpr double kRowSumTol = 1e-4;

    AttentionStack() = default;
    AttentionStack(int layers, int heads, TokenLayout layout, std::vector<double> data);

    int layers() const noexcept { return layers_; }
    int heads() const noexcept { return heads_; }
    int seq_len() const noexcept { return layout_.seq_len(); }
    const TokenLayout& layout() const noexcept { return layout_; }

    double at(int layer, int head, int i, int j) const {
        return data_[offset(layer, head, i) + static_cast<std::size_t>(j)];
    }
    std::span<const double> row(int layer, int head, int i) const {
        return {data_.data() + offset(layer, head, i), static_cast<std::size_t>(seq_len())};
    }

    const std::vector<double>& data() const noexcept { return data_; }

    /// Re-checks the construction invariants; throws ConsistencyError.
    void validate(double row_tol = kRowSumTol) const;

private:
    std::size_t offset(int layer, int head, int i) const {
        const auto n = static_cast<std::size_t>(seq_len());
        return ((static_cast<std::size_t>(layer) * heads_ + head) * n + i) * n;
    }

    int layers_ = 0;
    int heads_ = 0;
    TokenLayout layout_;
    std::vector<double> data_;
};

/// Column sums of the head-mean attention matrix at one layer, over all N
/// columns. Summing this vector recovers N (each row contributes 1), which
/// doubles as a stack-integrity check.
std::vector<double> head_mean_column_sums(const AttentionStack& stack, int layer);

/// Importance score S_j for each visual token j at the given layer: the
/// total attention mass column j receives in the head-mean matrix, with
/// sources i ranging over the whole sequence (language included). Returns
/// the n_visual scores in token order.
ScoreVector importance_scores(const AttentionStack& stack, int layer);

/// Importance scores for a contiguous run of layers.
struct LayerScoreSeries {
    int from_layer = 0;
    std::vector<ScoreVector> per_layer;
};

/// Scores for every layer in [from_layer, L-1]. Requires at least two
/// layers in the range so a rank-consistency profile can be built on top.
LayerScoreSeries score_series(const AttentionStack& stack, int from_layer);

/// Analytic per-forward-pass FLOPs model: each layer costs
/// 2*N^2*d_model (QK^T and AV) plus 4*N*d_model^2 (Q/K/V/O projections),
/// with N the full sequence length before `prune_from` and
/// n_language + n_active from that layer on. Softmax and MLP are excluded;
/// only ratios between pruned and unpruned estimates are meaningful.
double flops_estimate(int n_active, const ModelDims& dims, const TokenLayout& layout,
                      int prune_from);

/// ATNS v1 container: one ASCII header line "ATNS 1 <L> <H> <N> <N_l>\n"
/// followed by L*H*N*N little-endian float32 values in layer-major,
/// head-major, row-major order.
void save_atns(const AttentionStack& stack, const std::filesystem::path& path);
AttentionStack load_atns(const std::filesystem::path& path);

}  // namespace ties

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

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ties/matrix.hpp"

namespace ties {

enum class StrategyKind { TopK, BottomK, UniformRank, Middle, Diversity };

const char* strategy_name(StrategyKind kind);
StrategyKind parse_strategy(const std::string& name);

/// A standalone selection strategy: which tokens to keep and how many.
/// `pool_k` only matters for BottomK (the size of the high-attention pool
/// the bottom slice is taken from).
struct StrategySpec {
    StrategyKind kind = StrategyKind::TopK;
    int k = 0;
    int pool_k = 0;
    std::optional<std::uint64_t> seed;  // reserved; current strategies are all deterministic
};

/// Retained visual-token indices plus how the budget was split between the
/// attention-ranked share and the alternative-strategy share.
struct SelectionResult {
    std::vector<int> retained;  // sorted ascending (original token order)
    int n_top = 0;
    int n_alt = 0;
    double trust_weight = 0.0;
    std::string strategy_trace;
};

/// The k highest-scoring indices; score ties broken by lower index.
/// All selectors return indices sorted ascending and accept k == 0.
std::vector<int> select_top_k(std::span<const double> scores, int k);

/// The k lowest-scoring indices among the top pool_k: take the pool_k
/// highest scores, then keep the k weakest of that pool.
std::vector<int> select_bottom_k(std::span<const double> scores, int k, int pool_k);

/// Deterministic stride over the descending-score rank order: ranks at
/// positions round(j * (n-1) / (k-1)) for j = 0..k-1 (k == 1 picks rank 0).
std::vector<int> select_uniform_rank(std::span<const double> scores, int k);

/// The contiguous rank window of width k centered on the median rank:
/// ranks [floor((n-k)/2), floor((n-k)/2) + k) of the descending order.
std::vector<int> select_middle(std::span<const double> scores, int k);

/// Greedy max-min (farthest-point) selection under Euclidean distance over
/// per-token feature rows: start from the max-norm token, then repeatedly
/// add the token whose minimum distance to the chosen set is largest.
/// Ties broken by lower index.
std::vector<int> select_diversity(const Matrix& features, int k);

/// Dispatch on kind. `features` is only consulted for Diversity and must
/// be non-null there; `pool_k` only for BottomK (clamped to [k, n]).
std::vector<int> apply_strategy(StrategyKind kind, std::span<const double> scores,
                                const Matrix* features, int k, int pool_k);

/// Apply a strategy to the sub-problem spanned by `candidates` (indices
/// into the full score vector); returned indices are in full-vector terms.
std::vector<int> apply_strategy_subset(StrategyKind kind, std::span<const double> scores,
                                       const Matrix* features, int k, int pool_k,
                                       std::span<const int> candidates);

}  // namespace ties

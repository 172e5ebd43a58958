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

#include <optional>
#include <span>
#include <vector>

namespace ties {

/// One real-valued score per token.
using ScoreVector = std::vector<double>;

/// Competition ranking of a score vector: rank 1 is the highest score and
/// exactly equal scores share a rank ("1224" style). Rank values live in
/// [1, size].
struct Ranking {
    std::vector<int> ranks;

    int size() const noexcept { return static_cast<int>(ranks.size()); }
};

struct KendallResult {
    double tau = 0.0;
    /// True when every element of one input is tied with every other, so
    /// the tau-b denominator vanishes; tau is reported as 0 in that case.
    bool degenerate = false;
};

/// Kendall tau-b between two equal-length rankings:
///
///   tau = (P - Q) / sqrt((P + Q + T) * (P + Q + U))
///
/// P/Q count concordant/discordant pairs, T counts pairs tied only in `a`,
/// U pairs tied only in `b`. Pairs tied in both rankings contribute to
/// neither T nor U. O(n^2); n stays small here (tracked top-k sets).
KendallResult kendall_tau_b(const Ranking& a, const Ranking& b);

/// Competition-rank a score vector: highest score gets rank 1, exact
/// float equality makes a tie. Rejects non-finite scores.
Ranking rank_scores(std::span<const double> scores);

/// The k best-ranked token indices (smallest rank values), ties broken by
/// lower index. Result is sorted ascending by index.
std::vector<int> top_ranked_indices(const Ranking& r, int k);

/// Per-layer-pair tau values plus their mean.
struct TauProfile {
    std::vector<double> per_pair;
    double mean_tau = 0.0;
    int k_used = 0;
};

/// Rank-consistency profile across an ordered series of rankings: tau-b
/// for each consecutive pair, restricted either to `restrict_to` or, by
/// default, to the earlier layer's top-k token set -- the question asked
/// is whether tokens trusted at layer l are still trusted at layer l+1.
/// `top_k` larger than the ranking length tracks all tokens.
TauProfile layerwise_tau(std::span<const Ranking> rankings, int top_k,
                         const std::optional<std::vector<int>>& restrict_to = std::nullopt);

/// Shannon entropy (natural log) of a nonnegative weight vector after
/// normalizing it to a probability distribution. 0 * ln 0 counts as 0.
double shannon_entropy(std::span<const double> weights);

}  // namespace ties

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

#include "ties/rankmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "ties/errors.hpp"

namespace ties {

KendallResult kendall_tau_b(const Ranking& a, const Ranking& b) {
    const int n = a.size();
    if (n != b.size()) throw InputError("kendall_tau_b: rankings differ in length");
    if (n < 2) throw InputError("kendall_tau_b: need at least 2 elements");

    std::int64_t concordant = 0, discordant = 0, ties_a_only = 0, ties_b_only = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int da = a.ranks[i] - a.ranks[j];
            const int db = b.ranks[i] - b.ranks[j];
            if (da == 0 && db == 0) continue;  // tied in both: counts nowhere
            if (da == 0) {
                ++ties_a_only;
            } else if (db == 0) {
                ++ties_b_only;
            } else if ((da > 0) == (db > 0)) {
                ++concordant;
            } else {
                ++discordant;
            }
        }
    }

    const double left = static_cast<double>(concordant + discordant + ties_a_only);
    const double right = static_cast<double>(concordant + discordant + ties_b_only);
    const double denom = std::sqrt(left * right);
    if (denom == 0.0) return {0.0, true};

    const double tau = static_cast<double>(concordant - discordant) / denom;
    return {std::clamp(tau, -1.0, 1.0), false};
}

Ranking rank_scores(std::span<const double> scores) {
    const int n = static_cast<int>(scores.size());
    if (n == 0) throw InputError("rank_scores: empty score vector");
    for (double v : scores)
        if (!std::isfinite(v)) throw InputError("rank_scores: non-finite score");

    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        if (scores[lhs] != scores[rhs]) return scores[lhs] > scores[rhs];
        return lhs < rhs;
    });

    Ranking out;
    out.ranks.assign(scores.size(), 0);
    for (int pos = 0; pos < n; ++pos) {
        if (pos > 0 && scores[order[pos]] == scores[order[pos - 1]]) {
            out.ranks[order[pos]] = out.ranks[order[pos - 1]];
        } else {
            out.ranks[order[pos]] = pos + 1;
        }
    }
    return out;
}

std::vector<int> top_ranked_indices(const Ranking& r, int k) {
    const int n = r.size();
    if (k < 0) throw InputError("top_ranked_indices: negative k");
    k = std::min(k, n);

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        if (r.ranks[lhs] != r.ranks[rhs]) return r.ranks[lhs] < r.ranks[rhs];
        return lhs < rhs;
    });
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

namespace {

Ranking restrict_ranking(const Ranking& r, std::span<const int> indices) {
    Ranking out;
    out.ranks.reserve(indices.size());
    for (int idx : indices) out.ranks.push_back(r.ranks[static_cast<std::size_t>(idx)]);
    return out;
}

}  // namespace

TauProfile layerwise_tau(std::span<const Ranking> rankings, int top_k,
                         const std::optional<std::vector<int>>& restrict_to) {
    if (rankings.size() < 2) throw InputError("layerwise_tau: need at least 2 rankings");
    const int n = rankings[0].size();
    for (const Ranking& r : rankings)
        if (r.size() != n) throw InputError("layerwise_tau: rankings differ in length");

    if (restrict_to) {
        if (restrict_to->size() < 2)
            throw InputError("layerwise_tau: restriction set smaller than 2");
        for (int idx : *restrict_to)
            if (idx < 0 || idx >= n) throw InputError("layerwise_tau: restriction index out of range");
    }
    top_k = std::min(top_k, n);
    if (!restrict_to && top_k < 2)
        throw InputError("layerwise_tau: top_k restriction smaller than 2");

    TauProfile profile;
    profile.k_used = restrict_to ? static_cast<int>(restrict_to->size()) : top_k;
    profile.per_pair.reserve(rankings.size() - 1);

    for (std::size_t layer = 0; layer + 1 < rankings.size(); ++layer) {
        const std::vector<int> tracked =
            restrict_to ? *restrict_to : top_ranked_indices(rankings[layer], top_k);
        const Ranking earlier = restrict_ranking(rankings[layer], tracked);
        const Ranking later = restrict_ranking(rankings[layer + 1], tracked);
        profile.per_pair.push_back(kendall_tau_b(earlier, later).tau);
    }

    profile.mean_tau =
        std::accumulate(profile.per_pair.begin(), profile.per_pair.end(), 0.0) /
        static_cast<double>(profile.per_pair.size());
    return profile;
}

double shannon_entropy(std::span<const double> weights) {
    if (weights.empty()) throw InputError("shannon_entropy: empty vector");
    double sum = 0.0;
    for (double v : weights) {
        if (!std::isfinite(v)) throw InputError("shannon_entropy: non-finite weight");
        if (v < 0.0) throw InputError("shannon_entropy: negative weight");
        sum += v;
    }
    if (sum <= 0.0) throw InputError("shannon_entropy: weights sum to zero");

    double h = 0.0;
    for (double v : weights) {
        if (v == 0.0) continue;
        const double p = v / sum;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace ties

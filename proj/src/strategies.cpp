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

#include "ties/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ties/errors.hpp"

namespace ties {

const char* strategy_name(StrategyKind kind) {
    switch (kind) {
        case StrategyKind::TopK: return "topk";
        case StrategyKind::BottomK: return "bottomk";
        case StrategyKind::UniformRank: return "uniform";
        case StrategyKind::Middle: return "middle";
        case StrategyKind::Diversity: return "diversity";
    }
    return "unknown";
}

StrategyKind parse_strategy(const std::string& name) {
    if (name == "topk") return StrategyKind::TopK;
    if (name == "bottomk") return StrategyKind::BottomK;
    if (name == "uniform") return StrategyKind::UniformRank;
    if (name == "middle") return StrategyKind::Middle;
    if (name == "diversity") return StrategyKind::Diversity;
    throw InputError("unknown strategy '" + name + "'");
}

namespace {

void check_scores(std::span<const double> scores, int k) {
    if (k < 0) throw InputError("selection: negative k");
    if (k > static_cast<int>(scores.size()))
        throw InputError("selection: k exceeds token count");
    for (double v : scores)
        if (!std::isfinite(v)) throw InputError("selection: non-finite score");
}

/// Indices sorted by descending score, ties by lower index.
std::vector<int> order_desc(std::span<const double> scores) {
    std::vector<int> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int lhs, int rhs) {
        if (scores[lhs] != scores[rhs]) return scores[lhs] > scores[rhs];
        return lhs < rhs;
    });
    return order;
}

std::vector<int> sorted_prefix(std::vector<int> order, int k) {
    order.resize(static_cast<std::size_t>(k));
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace

std::vector<int> select_top_k(std::span<const double> scores, int k) {
    check_scores(scores, k);
    return sorted_prefix(order_desc(scores), k);
}

std::vector<int> select_bottom_k(std::span<const double> scores, int k, int pool_k) {
    check_scores(scores, k);
    if (pool_k < k || pool_k > static_cast<int>(scores.size()))
        throw InputError("select_bottom_k: require k <= pool_k <= n");

    const std::vector<int> order = order_desc(scores);
    std::vector<int> kept(order.begin() + (pool_k - k), order.begin() + pool_k);
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<int> select_uniform_rank(std::span<const double> scores, int k) {
    check_scores(scores, k);
    if (k == 0) return {};

    const std::vector<int> order = order_desc(scores);
    const int n = static_cast<int>(scores.size());
    std::vector<int> kept;
    kept.reserve(static_cast<std::size_t>(k));
    if (k == 1) {
        kept.push_back(order[0]);
    } else {
        for (int j = 0; j < k; ++j) {
            const auto pos = static_cast<std::size_t>(
                std::llround(static_cast<double>(j) * (n - 1) / (k - 1)));
            kept.push_back(order[pos]);
        }
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<int> select_middle(std::span<const double> scores, int k) {
    check_scores(scores, k);
    const int n = static_cast<int>(scores.size());
    const int start = (n - k) / 2;

    const std::vector<int> order = order_desc(scores);
    std::vector<int> kept(order.begin() + start, order.begin() + start + k);
    std::sort(kept.begin(), kept.end());
    return kept;
}

std::vector<int> select_diversity(const Matrix& features, int k) {
    const int n = features.rows();
    if (n == 0 || features.cols() == 0)
        throw InputError("select_diversity: empty feature matrix");
    if (!features.all_finite()) throw InputError("select_diversity: non-finite feature");
    if (k < 0 || k > n) throw InputError("select_diversity: k out of range");
    if (k == 0) return {};

    auto sq_dist = [&](int a, int b) {
        double acc = 0.0;
        const auto ra = features.row(a);
        const auto rb = features.row(b);
        for (int c = 0; c < features.cols(); ++c) {
            const double d = ra[c] - rb[c];
            acc += d * d;
        }
        return acc;
    };

    // Seed point: maximum squared norm, ties by lower index.
    int seed = 0;
    double best_norm = -1.0;
    for (int i = 0; i < n; ++i) {
        double norm = 0.0;
        for (double v : features.row(i)) norm += v * v;
        if (norm > best_norm) {
            best_norm = norm;
            seed = i;
        }
    }

    std::vector<int> chosen{seed};
    std::vector<char> is_chosen(static_cast<std::size_t>(n), 0);
    is_chosen[static_cast<std::size_t>(seed)] = 1;
    std::vector<double> min_dist(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) min_dist[static_cast<std::size_t>(i)] = sq_dist(i, seed);

    while (static_cast<int>(chosen.size()) < k) {
        int next = -1;
        double best = -1.0;
        for (int i = 0; i < n; ++i) {
            if (is_chosen[static_cast<std::size_t>(i)]) continue;
            if (min_dist[static_cast<std::size_t>(i)] > best) {
                best = min_dist[static_cast<std::size_t>(i)];
                next = i;
            }
        }
        chosen.push_back(next);
        is_chosen[static_cast<std::size_t>(next)] = 1;
        for (int i = 0; i < n; ++i)
            min_dist[static_cast<std::size_t>(i)] =
                std::min(min_dist[static_cast<std::size_t>(i)], sq_dist(i, next));
    }

    std::sort(chosen.begin(), chosen.end());
    return chosen;
}

std::vector<int> apply_strategy(StrategyKind kind, std::span<const double> scores,
                                const Matrix* features, int k, int pool_k) {
    switch (kind) {
        case StrategyKind::TopK:
            return select_top_k(scores, k);
        case StrategyKind::BottomK: {
            const int n = static_cast<int>(scores.size());
            return select_bottom_k(scores, k, std::clamp(pool_k, k, n));
        }
        case StrategyKind::UniformRank:
            return select_uniform_rank(scores, k);
        case StrategyKind::Middle:
            return select_middle(scores, k);
        case StrategyKind::Diversity:
            if (features == nullptr)
                throw InputError("apply_strategy: diversity selection needs token features");
            return select_diversity(*features, k);
    }
    throw InputError("apply_strategy: unknown strategy kind");
}

std::vector<int> apply_strategy_subset(StrategyKind kind, std::span<const double> scores,
                                       const Matrix* features, int k, int pool_k,
                                       std::span<const int> candidates) {
    if (k > static_cast<int>(candidates.size()))
        throw InputError("apply_strategy_subset: k exceeds candidate count");

    std::vector<double> sub_scores;
    sub_scores.reserve(candidates.size());
    for (int idx : candidates) sub_scores.push_back(scores[static_cast<std::size_t>(idx)]);

    std::vector<int> sub_chosen;
    if (kind == StrategyKind::Diversity) {
        if (features == nullptr)
            throw InputError("apply_strategy_subset: diversity selection needs token features");
        const Matrix sub_features = features->gather_rows(candidates);
        sub_chosen = select_diversity(sub_features, k);
    } else {
        sub_chosen = apply_strategy(kind, sub_scores, nullptr, k, pool_k);
    }

    std::vector<int> out;
    out.reserve(sub_chosen.size());
    for (int local : sub_chosen) out.push_back(candidates[static_cast<std::size_t>(local)]);
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace ties

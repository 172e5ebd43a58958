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
#include <string>
#include <vector>

#include "ties/strategies.hpp"

namespace ties {

/// Offline summary of the tau distribution over a calibration sample.
/// Quantiles anchor the trust-weight ramp; the raw samples are kept so
/// alternative interpolation schemes can be evaluated later.
struct CalibrationProfile {
    int sample_count = 0;
    std::vector<double> tau_samples;
    double tau_med = 0.0;
    double q10 = 0.0;
    double q25 = 0.0;
    double q75 = 0.0;
    double q90 = 0.0;
    std::string source_id;
};

/// Linear-interpolation quantile of an unsorted sample (the classic
/// h = q * (n - 1) scheme).
double quantile(std::span<const double> samples, double q);

/// Build a profile from per-frame mean-tau samples. Median is the exact
/// order-statistic median (mean of the two central values for even counts).
CalibrationProfile calibrate(std::span<const double> taus, std::string source_id);

/// JSON persistence. The document holds exactly
/// {version, source_id, sample_count, tau_samples, tau_med, q10, q25, q75, q90}
/// and round-trips doubles losslessly.
std::string profile_to_json(const CalibrationProfile& profile);
CalibrationProfile profile_from_json(const std::string& text);
void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path);
CalibrationProfile load_profile(const std::filesystem::path& path);

struct TrustWeight {
    double value = 0.0;
    bool degenerate = false;  // q90 == q10, ramp undefined, value pinned to 0.5
};

/// Trust in attention-ranked selection as a decreasing ramp over the
/// calibration quantiles:
///
///   w = clamp((q90 - tau) / (q90 - q10), 0, 1)
///
/// High rank consistency (suspected spurious locking) maps to low trust.
TrustWeight trust_weight(double tau_curr, const CalibrationProfile& profile);

struct BudgetSplit {
    int n_top = 0;
    int n_alt = 0;
};

/// n_top = floor(w * budget); the remainder goes to the alternative share.
BudgetSplit split_budget(double w, int budget);

enum class PruneMode { Hard, Soft };

const char* mode_name(PruneMode mode);
PruneMode parse_mode(const std::string& name);

/// Everything the per-frame selection step needs to know.
struct PruneConfig {
    double prune_ratio = 0.0;       // budget / n_visual
    int budget = 0;                 // retained visual tokens per frame
    PruneMode mode = PruneMode::Soft;
    double tau_threshold = 0.0;     // Hard mode switch point
    StrategyKind alt_strategy = StrategyKind::UniformRank;
    int alt_pool_k = 0;             // BottomK pool when used as the alternative
    int prune_from_layer = 1;       // also the attention-scoring layer
    int tau_k = 0;                  // top-k set tracked for tau; defaults to budget
};

/// Resolve a config against a token count: budget = floor(ratio * n_visual),
/// tau_k and the BottomK pool default to the budget and n_visual / 2.
PruneConfig make_prune_config(double prune_ratio, int n_visual, PruneMode mode);

/// Threshold policy: keep the whole budget from Top-k while tau stays at or
/// below the threshold; above it, hand the whole budget to the alternative
/// strategy. trust_weight in the result records which branch ran (1 or 0).
SelectionResult hard_ties_select(std::span<const double> scores, double tau_curr,
                                 const PruneConfig& cfg, const Matrix* features = nullptr);

/// Blended policy: floor(w * budget) tokens from Top-k, the remainder from
/// the alternative strategy applied to the not-yet-chosen tokens only.
SelectionResult soft_ties_select(std::span<const double> scores, double w,
                                 const PruneConfig& cfg, const Matrix* features = nullptr);

}  // namespace ties

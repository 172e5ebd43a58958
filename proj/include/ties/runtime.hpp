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
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "ties/attention.hpp"
#include "ties/matrix.hpp"
#include "ties/policy.hpp"

namespace ties {

/// One observation step: a flat summary vector used for anchor similarity
/// plus the per-visual-token feature rows consumed by the toy model and
/// diversity selection.
struct Frame {
    std::int64_t frame_id = 0;
    std::vector<double> observation;
    Matrix token_features;  // n_visual x d
};

/// Mutable per-session state of the online loop. Steps must be applied
/// sequentially; distinct sessions are independent.
struct RuntimeState {
    std::optional<Frame> anchor;
    std::optional<double> tau_curr;
    std::optional<double> w_curr;
    std::optional<SelectionResult> anchor_selection;
    std::int64_t recompute_count = 0;
    std::int64_t frames_seen = 0;
};

struct StepReport {
    std::int64_t frame_id = 0;
    bool triggered = false;  // tau recomputed this step
    double tau_used = 0.0;
    double w_used = 0.0;
    SelectionResult selection;
    double token_reduction = 0.0;  // 1 - retained / n_visual
    double flops_full = 0.0;
    double flops_pruned = 0.0;
    std::optional<double> output_drift;  // only under dual execution
};

/// Optional hooks and flags for a runtime session.
struct RuntimeOptions {
    /// Reuse the anchor's retained indices verbatim between triggers
    /// instead of re-scoring every frame.
    bool reuse_indices = false;
    /// Run the model twice (full and pruned) and report output drift.
    /// Requires `forward`.
    bool dual_exec = false;
    /// Model hook: maps (frame, retained-or-empty) to an output vector.
    /// An empty retained span means the unpruned pass.
    std::function<std::vector<double>(const Frame&, std::span<const int>)> forward;
};

/// Cosine similarity of the two observation vectors.
double frame_similarity(const Frame& a, const Frame& b);

/// One step of the online loop. Recomputes tau (and the trust weight) only
/// when there is no anchor yet or the frame drifted below `gamma` cosine
/// similarity from it; otherwise the cached values are reused unchanged.
/// Selection itself runs every frame from this frame's attention scores.
/// Similarity lives in [-1, 1], so gamma <= -1 never re-triggers and
/// gamma > 1 triggers every step.
StepReport step(RuntimeState& state, const Frame& frame, const AttentionStack& stack,
                const PruneConfig& cfg, const CalibrationProfile* profile, double gamma,
                const RuntimeOptions& options = {});

struct EpisodeSummary {
    std::int64_t frames = 0;
    std::int64_t recomputes = 0;
    double recompute_rate = 0.0;
    double mean_reduction = 0.0;
    std::optional<double> mean_drift;
    double flops_full_total = 0.0;
    double flops_pruned_total = 0.0;
    double flops_saved = 0.0;
    bool complete = true;     // false when a step failed mid-episode
    std::string error;        // failure message when !complete
};

struct EpisodeResult {
    std::vector<StepReport> reports;
    EpisodeSummary summary;
};

/// Run an ordered stream of (frame, stack) pairs through one session. A
/// failing step stops the episode and marks the summary as partial.
EpisodeResult run_episode(std::span<const std::pair<Frame, AttentionStack>> stream,
                          const PruneConfig& cfg, const CalibrationProfile* profile,
                          double gamma, const RuntimeOptions& options = {});

/// Newline-delimited JSON: one "step" object per report followed by one
/// "summary" object, stable key order throughout.
std::string report_to_ndjson_line(const StepReport& report);
std::string summary_to_ndjson_line(const EpisodeSummary& summary);
void write_ndjson(const EpisodeResult& result, const std::filesystem::path& path);

}  // namespace ties

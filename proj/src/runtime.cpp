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

#include "ties/runtime.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ties/errors.hpp"

namespace ties {

double frame_similarity(const Frame& a, const Frame& b) {
    if (a.observation.size() != b.observation.size())
        throw InputError("frame_similarity: observation lengths differ");
    if (a.observation.empty()) throw InputError("frame_similarity: empty observation");

    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.observation.size(); ++i) {
        dot += a.observation[i] * b.observation[i];
        na += a.observation[i] * a.observation[i];
        nb += b.observation[i] * b.observation[i];
    }
    if (na == 0.0 || nb == 0.0) throw InputError("frame_similarity: zero observation vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

namespace {

double recompute_tau(const AttentionStack& stack, const PruneConfig& cfg) {
    const LayerScoreSeries series = score_series(stack, cfg.prune_from_layer);
    std::vector<Ranking> rankings;
    rankings.reserve(series.per_layer.size());
    for (const ScoreVector& scores : series.per_layer) rankings.push_back(rank_scores(scores));
    return layerwise_tau(rankings, cfg.tau_k).mean_tau;
}

}  // namespace

StepReport step(RuntimeState& state, const Frame& frame, const AttentionStack& stack,
                const PruneConfig& cfg, const CalibrationProfile* profile, double gamma,
                const RuntimeOptions& options) {
    if (stack.layout().n_visual != frame.token_features.rows())
        throw ConsistencyError("step: attention stack visual count does not match frame");
    if (cfg.budget > stack.layout().n_visual)
        throw ConsistencyError("step: budget exceeds visual token count");
    if (cfg.mode == PruneMode::Soft && profile == nullptr)
        throw InputError("step: soft mode requires a calibration profile");

    StepReport report;
    report.frame_id = frame.frame_id;

    const bool trigger = !state.anchor || frame_similarity(frame, *state.anchor) < gamma;
    if (trigger) {
        state.anchor = frame;
        state.tau_curr = recompute_tau(stack, cfg);
        state.w_curr =
            profile ? trust_weight(*state.tau_curr, *profile).value : 0.0;
        state.anchor_selection.reset();
        ++state.recompute_count;
    }
    report.triggered = trigger;
    report.tau_used = *state.tau_curr;

    if (options.reuse_indices && !trigger && state.anchor_selection) {
        report.selection = *state.anchor_selection;
    } else {
        const ScoreVector scores = importance_scores(stack, cfg.prune_from_layer);
        if (cfg.mode == PruneMode::Hard) {
            report.selection =
                hard_ties_select(scores, *state.tau_curr, cfg, &frame.token_features);
        } else {
            report.selection =
                soft_ties_select(scores, *state.w_curr, cfg, &frame.token_features);
        }
        if (options.reuse_indices && trigger) state.anchor_selection = report.selection;
    }
    report.w_used = report.selection.trust_weight;

    const int n_visual = stack.layout().n_visual;
    const int retained = static_cast<int>(report.selection.retained.size());
    report.token_reduction =
        1.0 - static_cast<double>(retained) / static_cast<double>(n_visual);

    const ModelDims dims{stack.layers(), stack.heads(), frame.token_features.cols()};
    report.flops_full = flops_estimate(n_visual, dims, stack.layout(), cfg.prune_from_layer);
    report.flops_pruned = flops_estimate(retained, dims, stack.layout(), cfg.prune_from_layer);

    if (options.dual_exec) {
        if (!options.forward) throw InputError("step: dual_exec requires a forward hook");
        const std::vector<double> full = options.forward(frame, {});
        const std::vector<double> pruned = options.forward(frame, report.selection.retained);
        if (full.size() != pruned.size())
            throw ConsistencyError("step: forward hook output sizes differ");
        double acc = 0.0;
        for (std::size_t i = 0; i < full.size(); ++i) {
            const double d = full[i] - pruned[i];
            acc += d * d;
        }
        report.output_drift = std::sqrt(acc);
    }

    ++state.frames_seen;
    return report;
}

EpisodeResult run_episode(std::span<const std::pair<Frame, AttentionStack>> stream,
                          const PruneConfig& cfg, const CalibrationProfile* profile,
                          double gamma, const RuntimeOptions& options) {
    if (stream.empty()) throw InputError("run_episode: empty stream");

    EpisodeResult result;
    result.reports.reserve(stream.size());
    RuntimeState state;

    for (const auto& [frame, stack] : stream) {
        try {
            result.reports.push_back(step(state, frame, stack, cfg, profile, gamma, options));
        } catch (const std::exception& e) {
            result.summary.complete = false;
            result.summary.error = e.what();
            break;
        }
    }

    EpisodeSummary& s = result.summary;
    s.frames = static_cast<std::int64_t>(result.reports.size());
    s.recomputes = state.recompute_count;
    if (s.frames > 0) {
        s.recompute_rate = static_cast<double>(s.recomputes) / static_cast<double>(s.frames);
        double reduction = 0.0, drift = 0.0;
        bool any_drift = false;
        for (const StepReport& r : result.reports) {
            reduction += r.token_reduction;
            s.flops_full_total += r.flops_full;
            s.flops_pruned_total += r.flops_pruned;
            if (r.output_drift) {
                drift += *r.output_drift;
                any_drift = true;
            }
        }
        s.mean_reduction = reduction / static_cast<double>(s.frames);
        if (any_drift) s.mean_drift = drift / static_cast<double>(s.frames);
        s.flops_saved = s.flops_full_total - s.flops_pruned_total;
    }
    return result;
}

namespace {

nlohmann::ordered_json report_json(const StepReport& r) {
    nlohmann::ordered_json line;
    line["type"] = "step";
    line["schema_version"] = 1;
    line["frame_id"] = r.frame_id;
    line["triggered"] = r.triggered;
    line["tau_used"] = r.tau_used;
    line["w_used"] = r.w_used;
    line["n_top"] = r.selection.n_top;
    line["n_alt"] = r.selection.n_alt;
    line["retained"] = r.selection.retained;
    line["strategy"] = r.selection.strategy_trace;
    line["token_reduction"] = r.token_reduction;
    line["flops_full"] = r.flops_full;
    line["flops_pruned"] = r.flops_pruned;
    if (r.output_drift) line["output_drift"] = *r.output_drift;
    return line;
}

nlohmann::ordered_json summary_json(const EpisodeSummary& s) {
    nlohmann::ordered_json line;
    line["type"] = "summary";
    line["schema_version"] = 1;
    line["frames"] = s.frames;
    line["recomputes"] = s.recomputes;
    line["recompute_rate"] = s.recompute_rate;
    line["mean_reduction"] = s.mean_reduction;
    if (s.mean_drift) line["mean_drift"] = *s.mean_drift;
    line["flops_full_total"] = s.flops_full_total;
    line["flops_pruned_total"] = s.flops_pruned_total;
    line["flops_saved"] = s.flops_saved;
    line["complete"] = s.complete;
    if (!s.complete) line["error"] = s.error;
    return line;
}

}  // namespace

std::string report_to_ndjson_line(const StepReport& report) {
    return report_json(report).dump();
}

std::string summary_to_ndjson_line(const EpisodeSummary& summary) {
    return summary_json(summary).dump();
}

void write_ndjson(const EpisodeResult& result, const std::filesystem::path& path) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw InputError("ndjson: cannot open for writing: " + path.string());
        for (const StepReport& r : result.reports) out << report_to_ndjson_line(r) << "\n";
        out << summary_to_ndjson_line(result.summary) << "\n";
        if (!out) throw InputError("ndjson: short write: " + path.string());
    }
    std::filesystem::rename(tmp, path);
}

}  // namespace ties

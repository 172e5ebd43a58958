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

#include "ties/policy.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>

#include <json.hpp>

#include "ties/errors.hpp"

namespace ties {

double quantile(std::span<const double> samples, double q) {
    if (samples.empty()) throw InputError("quantile: empty sample");
    if (q < 0.0 || q > 1.0) throw InputError("quantile: q outside [0, 1]");

    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());

    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    const double frac = h - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

CalibrationProfile calibrate(std::span<const double> taus, std::string source_id) {
    if (taus.size() < 2) throw InputError("calibrate: need at least 2 tau samples");
    for (double t : taus) {
        if (!std::isfinite(t)) throw InputError("calibrate: non-finite tau sample");
        if (t < -1.0 || t > 1.0) throw InputError("calibrate: tau sample outside [-1, 1]");
    }

    CalibrationProfile profile;
    profile.sample_count = static_cast<int>(taus.size());
    profile.tau_samples.assign(taus.begin(), taus.end());
    profile.source_id = std::move(source_id);

    std::vector<double> sorted = profile.tau_samples;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t m = sorted.size();
    profile.tau_med = (m % 2 == 1) ? sorted[m / 2] : (sorted[m / 2 - 1] + sorted[m / 2]) / 2.0;

    profile.q10 = quantile(sorted, 0.10);
    profile.q25 = quantile(sorted, 0.25);
    profile.q75 = quantile(sorted, 0.75);
    profile.q90 = quantile(sorted, 0.90);
    return profile;
}

std::string profile_to_json(const CalibrationProfile& profile) {
    nlohmann::ordered_json doc;
    doc["version"] = 1;
    doc["source_id"] = profile.source_id;
    doc["sample_count"] = profile.sample_count;
    doc["tau_samples"] = profile.tau_samples;
    doc["tau_med"] = profile.tau_med;
    doc["q10"] = profile.q10;
    doc["q25"] = profile.q25;
    doc["q75"] = profile.q75;
    doc["q90"] = profile.q90;
    return doc.dump(2) + "\n";
}

CalibrationProfile profile_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("profile: invalid JSON: ") + e.what());
    }

    try {
        if (doc.at("version").get<int>() != 1)
            throw InputError("profile: unsupported version");
        CalibrationProfile profile;
        profile.source_id = doc.at("source_id").get<std::string>();
        profile.sample_count = doc.at("sample_count").get<int>();
        profile.tau_samples = doc.at("tau_samples").get<std::vector<double>>();
        profile.tau_med = doc.at("tau_med").get<double>();
        profile.q10 = doc.at("q10").get<double>();
        profile.q25 = doc.at("q25").get<double>();
        profile.q75 = doc.at("q75").get<double>();
        profile.q90 = doc.at("q90").get<double>();

        if (profile.sample_count != static_cast<int>(profile.tau_samples.size()))
            throw InputError("profile: sample_count does not match tau_samples");
        if (profile.sample_count < 2) throw InputError("profile: fewer than 2 samples");
        if (!(profile.q10 <= profile.q25 && profile.q25 <= profile.tau_med &&
              profile.tau_med <= profile.q75 && profile.q75 <= profile.q90))
            throw InputError("profile: quantiles out of order");
        return profile;
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("profile: missing or mistyped field: ") + e.what());
    }
}

void save_profile(const CalibrationProfile& profile, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw InputError("profile: cannot open for writing: " + path.string());
    const std::string text = profile_to_json(profile);
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw InputError("profile: short write: " + path.string());
}

CalibrationProfile load_profile(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("profile: cannot open: " + path.string());
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return profile_from_json(text);
}

TrustWeight trust_weight(double tau_curr, const CalibrationProfile& profile) {
    if (!std::isfinite(tau_curr) || tau_curr < -1.0 || tau_curr > 1.0)
        throw InputError("trust_weight: tau outside [-1, 1]");
    if (profile.q90 == profile.q10) return {0.5, true};

    const double w = (profile.q90 - tau_curr) / (profile.q90 - profile.q10);
    return {std::clamp(w, 0.0, 1.0), false};
}

BudgetSplit split_budget(double w, int budget) {
    if (!(w >= 0.0 && w <= 1.0)) throw InputError("split_budget: w outside [0, 1]");
    if (budget < 1) throw InputError("split_budget: budget must be positive");

    const int n_top = static_cast<int>(std::floor(w * static_cast<double>(budget)));
    return {n_top, budget - n_top};
}

const char* mode_name(PruneMode mode) {
    return mode == PruneMode::Hard ? "hard" : "soft";
}

PruneMode parse_mode(const std::string& name) {
    if (name == "hard") return PruneMode::Hard;
    if (name == "soft") return PruneMode::Soft;
    throw InputError("unknown prune mode '" + name + "'");
}

PruneConfig make_prune_config(double prune_ratio, int n_visual, PruneMode mode) {
    if (!(prune_ratio > 0.0 && prune_ratio <= 1.0))
        throw InputError("make_prune_config: prune_ratio outside (0, 1]");
    if (n_visual < 1) throw InputError("make_prune_config: no visual tokens");

    PruneConfig cfg;
    cfg.prune_ratio = prune_ratio;
    cfg.budget = static_cast<int>(std::floor(prune_ratio * static_cast<double>(n_visual)));
    if (cfg.budget < 1) throw InputError("make_prune_config: budget rounds to zero");
    cfg.mode = mode;
    cfg.alt_pool_k = std::max(cfg.budget, n_visual / 2);
    cfg.tau_k = cfg.budget;
    return cfg;
}

namespace {

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

SelectionResult hard_ties_select(std::span<const double> scores, double tau_curr,
                                 const PruneConfig& cfg, const Matrix* features) {
    if (cfg.budget < 1 || cfg.budget > static_cast<int>(scores.size()))
        throw InputError("hard_ties_select: budget outside [1, n_visual]");

    SelectionResult result;
    if (tau_curr > cfg.tau_threshold) {
        result.retained =
            apply_strategy(cfg.alt_strategy, scores, features, cfg.budget, cfg.alt_pool_k);
        result.n_top = 0;
        result.n_alt = cfg.budget;
        result.trust_weight = 0.0;
        result.strategy_trace = std::string("hard(") + strategy_name(cfg.alt_strategy) + ")";
    } else {
        result.retained = select_top_k(scores, cfg.budget);
        result.n_top = cfg.budget;
        result.n_alt = 0;
        result.trust_weight = 1.0;
        result.strategy_trace = "hard(topk)";
    }
    return result;
}

SelectionResult soft_ties_select(std::span<const double> scores, double w,
                                 const PruneConfig& cfg, const Matrix* features) {
    if (cfg.budget < 1 || cfg.budget > static_cast<int>(scores.size()))
        throw InputError("soft_ties_select: budget outside [1, n_visual]");

    const BudgetSplit split = split_budget(w, cfg.budget);
    std::vector<int> top = select_top_k(scores, split.n_top);

    // Alternative share draws from the tokens Top-k did not take.
    std::vector<char> taken(scores.size(), 0);
    for (int idx : top) taken[static_cast<std::size_t>(idx)] = 1;
    std::vector<int> remaining;
    remaining.reserve(scores.size() - top.size());
    for (int i = 0; i < static_cast<int>(scores.size()); ++i)
        if (!taken[static_cast<std::size_t>(i)]) remaining.push_back(i);

    const std::vector<int> alt = apply_strategy_subset(cfg.alt_strategy, scores, features,
                                                       split.n_alt, cfg.alt_pool_k, remaining);

    SelectionResult result;
    result.retained.reserve(static_cast<std::size_t>(cfg.budget));
    result.retained.insert(result.retained.end(), top.begin(), top.end());
    result.retained.insert(result.retained.end(), alt.begin(), alt.end());
    std::sort(result.retained.begin(), result.retained.end());
    result.n_top = split.n_top;
    result.n_alt = split.n_alt;
    result.trust_weight = w;
    result.strategy_trace = std::string("soft(w=") + format_double(w) +
                            ",top=" + std::to_string(split.n_top) + "," +
                            strategy_name(cfg.alt_strategy) + "=" + std::to_string(split.n_alt) +
                            ")";
    return result;
}

}  // namespace ties

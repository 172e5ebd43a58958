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

#include "ties/attention.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>

namespace ties {

AttentionStack::AttentionStack(int layers, int heads, TokenLayout layout,
                               std::vector<double> data)
    : layers_(layers), heads_(heads), layout_(layout), data_(std::move(data)) {
    validate();
}

void AttentionStack::validate(double row_tol) const {
    const int n = seq_len();
    if (layers_ < 2) throw ConsistencyError("AttentionStack: need at least 2 layers");
    if (heads_ < 1) throw ConsistencyError("AttentionStack: need at least 1 head");
    if (n < 2) throw ConsistencyError("AttentionStack: sequence length below 2");
    if (layout_.n_visual < 1) throw ConsistencyError("AttentionStack: no visual tokens");
    if (layout_.visual_offset < 0 || layout_.visual_offset + layout_.n_visual > n)
        throw ConsistencyError("AttentionStack: visual token range exceeds sequence");

    const auto expected = static_cast<std::size_t>(layers_) * heads_ * n * n;
    if (data_.size() != expected)
        throw ConsistencyError("AttentionStack: tensor size does not match dimensions");

    for (int l = 0; l < layers_; ++l) {
        for (int h = 0; h < heads_; ++h) {
            for (int i = 0; i < n; ++i) {
                double sum = 0.0;
                for (double v : row(l, h, i)) {
                    if (!(v >= 0.0))  // catches negatives and NaN
                        throw ConsistencyError("AttentionStack: negative or NaN attention weight");
                    sum += v;
                }
                if (std::abs(sum - 1.0) > row_tol)
                    throw ConsistencyError("AttentionStack: attention row does not sum to 1");
            }
        }
    }
}

std::vector<double> head_mean_column_sums(const AttentionStack& stack, int layer) {
    if (layer < 0 || layer >= stack.layers())
        throw InputError("head_mean_column_sums: layer out of range");

    const int n = stack.seq_len();
    std::vector<double> sums(static_cast<std::size_t>(n), 0.0);
    for (int h = 0; h < stack.heads(); ++h) {
        for (int i = 0; i < n; ++i) {
            const auto r = stack.row(layer, h, i);
            for (int j = 0; j < n; ++j) sums[static_cast<std::size_t>(j)] += r[j];
        }
    }
    const double inv_heads = 1.0 / static_cast<double>(stack.heads());
    for (double& v : sums) v *= inv_heads;
    return sums;
}

ScoreVector importance_scores(const AttentionStack& stack, int layer) {
    const std::vector<double> sums = head_mean_column_sums(stack, layer);
    const TokenLayout& layout = stack.layout();
    return {sums.begin() + layout.visual_offset,
            sums.begin() + layout.visual_offset + layout.n_visual};
}

LayerScoreSeries score_series(const AttentionStack& stack, int from_layer) {
    if (from_layer < 0 || from_layer > stack.layers() - 2)
        throw InputError("score_series: from_layer must leave at least 2 layers");

    LayerScoreSeries series;
    series.from_layer = from_layer;
    series.per_layer.reserve(static_cast<std::size_t>(stack.layers() - from_layer));
    for (int l = from_layer; l < stack.layers(); ++l)
        series.per_layer.push_back(importance_scores(stack, l));
    return series;
}

double flops_estimate(int n_active, const ModelDims& dims, const TokenLayout& layout,
                      int prune_from) {
    if (n_active < 1) throw InputError("flops_estimate: n_active must be positive");
    if (n_active > layout.n_visual)
        throw InputError("flops_estimate: n_active exceeds visual token count");
    if (prune_from < 1 || prune_from >= dims.layers)
        throw InputError("flops_estimate: prune_from outside [1, layers)");

    const double d = static_cast<double>(dims.d_model);
    const double n_full = static_cast<double>(layout.seq_len());
    const double n_pruned = static_cast<double>(layout.n_language + n_active);

    double total = 0.0;
    for (int l = 0; l < dims.layers; ++l) {
        const double n = (l < prune_from) ? n_full : n_pruned;
        total += 2.0 * n * n * d + 4.0 * n * d * d;
    }
    return total;
}

namespace {

void append_le_f32(std::string& out, float v) {
    const auto bits = std::bit_cast<std::uint32_t>(v);
    out.push_back(static_cast<char>(bits & 0xFF));
    out.push_back(static_cast<char>((bits >> 8) & 0xFF));
    out.push_back(static_cast<char>((bits >> 16) & 0xFF));
    out.push_back(static_cast<char>((bits >> 24) & 0xFF));
}

float read_le_f32(const unsigned char* p) {
    const std::uint32_t bits = static_cast<std::uint32_t>(p[0]) |
                               (static_cast<std::uint32_t>(p[1]) << 8) |
                               (static_cast<std::uint32_t>(p[2]) << 16) |
                               (static_cast<std::uint32_t>(p[3]) << 24);
    return std::bit_cast<float>(bits);
}

}  // namespace

void save_atns(const AttentionStack& stack, const std::filesystem::path& path) {
    std::string buffer;
    buffer.reserve(64 + stack.data().size() * 4);
    buffer += "ATNS 1 " + std::to_string(stack.layers()) + " " + std::to_string(stack.heads()) +
              " " + std::to_string(stack.seq_len()) + " " +
              std::to_string(stack.layout().n_language) + "\n";
    for (double v : stack.data()) append_le_f32(buffer, static_cast<float>(v));

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw AtnsError(AtnsCode::Io, "atns: cannot open for writing: " + path.string());
    out.write(buffer.data(), static_cast<std::streamsize>(buffer.size()));
    if (!out) throw AtnsError(AtnsCode::Io, "atns: short write: " + path.string());
}

AttentionStack load_atns(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw AtnsError(AtnsCode::Io, "atns: cannot open: " + path.string());

    std::string header;
    if (!std::getline(in, header))
        throw AtnsError(AtnsCode::BadMagic, "atns: missing header line: " + path.string());

    std::istringstream fields(header);
    std::string magic;
    long long version = 0, layers = 0, heads = 0, seq = 0, n_language = -1;
    fields >> magic;
    if (magic != "ATNS")
        throw AtnsError(AtnsCode::BadMagic, "atns: bad magic '" + magic + "': " + path.string());
    if (!(fields >> version) || version != 1)
        throw AtnsError(AtnsCode::BadVersion,
                        "atns: unsupported version " + std::to_string(version) + ": " + path.string());
    if (!(fields >> layers >> heads >> seq >> n_language))
        throw AtnsError(AtnsCode::BadDims, "atns: malformed dimension fields: " + path.string());
    if (layers <= 0 || heads <= 0 || seq <= 0 || n_language < 0 || n_language >= seq)
        throw AtnsError(AtnsCode::BadDims, "atns: nonpositive or inconsistent dims: " + path.string());

    const std::size_t count = static_cast<std::size_t>(layers) * static_cast<std::size_t>(heads) *
                              static_cast<std::size_t>(seq) * static_cast<std::size_t>(seq);
    std::vector<unsigned char> payload(count * 4);
    in.read(reinterpret_cast<char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
    if (static_cast<std::size_t>(in.gcount()) != payload.size())
        throw AtnsError(AtnsCode::Truncated, "atns: truncated payload: " + path.string());
    if (in.peek() != std::char_traits<char>::eof())
        throw AtnsError(AtnsCode::TrailingData, "atns: trailing bytes after payload: " + path.string());

    std::vector<double> data(count);
    for (std::size_t i = 0; i < count; ++i)
        data[i] = static_cast<double>(read_le_f32(payload.data() + i * 4));

    TokenLayout layout{static_cast<int>(n_language), static_cast<int>(seq - n_language),
                       static_cast<int>(n_language)};
    return AttentionStack(static_cast<int>(layers), static_cast<int>(heads), layout,
                          std::move(data));
}

}  // namespace ties

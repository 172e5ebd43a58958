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

#include <cmath>
#include <span>
#include <vector>

#include "ties/errors.hpp"

namespace ties {

/// Dense row-major matrix of doubles. Small by design; everything in this
/// project fits comfortably in a flat vector.
class Matrix {
public:
    Matrix() = default;
    Matrix(int rows, int cols)
        : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows) * cols, 0.0) {
        if (rows < 0 || cols < 0) throw InputError("Matrix: negative dimensions");
    }
    Matrix(int rows, int cols, std::vector<double> data)
        : rows_(rows), cols_(cols), data_(std::move(data)) {
        if (rows < 0 || cols < 0) throw InputError("Matrix: negative dimensions");
        if (data_.size() != static_cast<std::size_t>(rows) * cols)
            throw InputError("Matrix: data size does not match dimensions");
    }

    int rows() const noexcept { return rows_; }
    int cols() const noexcept { return cols_; }

    double at(int r, int c) const { return data_[static_cast<std::size_t>(r) * cols_ + c]; }
    double& at(int r, int c) { return data_[static_cast<std::size_t>(r) * cols_ + c]; }

    std::span<const double> row(int r) const {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }
    std::span<double> row(int r) {
        return {data_.data() + static_cast<std::size_t>(r) * cols_, static_cast<std::size_t>(cols_)};
    }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    bool all_finite() const {
        for (double v : data_)
            if (!std::isfinite(v)) return false;
        return true;
    }

    /// New matrix holding the given rows, in the order given.
    Matrix gather_rows(std::span<const int> indices) const {
        Matrix out(static_cast<int>(indices.size()), cols_);
        for (int r = 0; r < out.rows(); ++r) {
            const auto src = row(indices[static_cast<std::size_t>(r)]);
            auto dst = out.row(r);
            for (int c = 0; c < cols_; ++c) dst[c] = src[c];
        }
        return out;
    }

    bool operator==(const Matrix& other) const = default;

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

}  // namespace ties

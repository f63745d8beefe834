// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/numcore/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "byzfl/error.hpp"
#include "byzfl/numcore/kernels.hpp"

namespace byzfl::num {
namespace {

void check_same_length(std::size_t a, std::size_t b, char const* op) {
    if (a != b)
        throw DimensionError(std::string(op) + ": length mismatch (" + std::to_string(a) + " vs " +
                             std::to_string(b) + ")");
}

}  // namespace

bool ParamVector::all_finite() const noexcept {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

Matrix Matrix::from_rows(std::vector<std::vector<double>> const& rows) {
    if (rows.empty())
        return {};
    Matrix m(rows.size(), rows.front().size());
    for (std::size_t r = 0; r < rows.size(); ++r) {
        check_same_length(rows[r].size(), m.cols(), "Matrix::from_rows");
        std::copy(rows[r].begin(), rows[r].end(), m.row(r).begin());
    }
    return m;
}

UpdateSet::UpdateSet(Matrix rows, std::vector<bool> byzantine, std::vector<std::size_t> client_ids)
    : rows_(std::move(rows)), byzantine_(std::move(byzantine)), client_ids_(std::move(client_ids)) {
    if (rows_.rows() == 0)
        throw ParameterError("UpdateSet: needs at least one row");
    if (byzantine_.size() != rows_.rows() || client_ids_.size() != rows_.rows())
        throw ParameterError("UpdateSet: flags/ids must have one entry per row");
    for (std::size_t i = 1; i < client_ids_.size(); ++i)
        if (client_ids_[i] <= client_ids_[i - 1])
            throw ParameterError("UpdateSet: client ids must be strictly ascending");
}

UpdateSet::UpdateSet(Matrix rows)
    : UpdateSet([&] {
          std::size_t const n = rows.rows();
          std::vector<std::size_t> ids(n);
          std::iota(ids.begin(), ids.end(), std::size_t{0});
          return UpdateSet(std::move(rows), std::vector<bool>(n, false), std::move(ids));
      }()) {}

UpdateSet UpdateSet::from_rows(std::vector<std::vector<double>> const& rows) {
    return UpdateSet(Matrix::from_rows(rows));
}

std::size_t UpdateSet::num_byzantine() const noexcept {
    return static_cast<std::size_t>(std::count(byzantine_.begin(), byzantine_.end(), true));
}

UpdateSet UpdateSet::select(std::span<std::size_t const> indices) const {
    Matrix m(indices.size(), dim());
    std::vector<bool> flags(indices.size());
    std::vector<std::size_t> ids(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        std::copy_n(row(indices[k]).begin(), dim(), m.row(k).begin());
        flags[k] = byzantine_[indices[k]];
        ids[k] = k;
    }
    return UpdateSet(std::move(m), std::move(flags), std::move(ids));
}

ParamVector axpy(double a, ParamVector const& x, ParamVector const& y) {
    check_same_length(x.size(), y.size(), "axpy");
    ParamVector out = y;
    active_kernels().axpy(a, x.data(), out.data(), out.size());
    return out;
}

void axpy_inplace(double a, std::span<double const> x, std::span<double> y) {
    check_same_length(x.size(), y.size(), "axpy");
    active_kernels().axpy(a, x.data(), y.data(), y.size());
}

ParamVector scaled(ParamVector const& x, double a) {
    ParamVector out = x;
    active_kernels().scale(a, out.data(), out.size());
    return out;
}

ParamVector add(ParamVector const& x, ParamVector const& y) {
    check_same_length(x.size(), y.size(), "add");
    ParamVector out = y;
    active_kernels().add(x.data(), out.data(), out.size());
    return out;
}

ParamVector sub(ParamVector const& x, ParamVector const& y) {
    check_same_length(x.size(), y.size(), "sub");
    ParamVector out(x.size());
    active_kernels().sub(x.data(), y.data(), out.data(), out.size());
    return out;
}

double dot(std::span<double const> x, std::span<double const> y) {
    check_same_length(x.size(), y.size(), "dot");
    return active_kernels().dot(x.data(), y.data(), x.size());
}

double l2_norm(std::span<double const> x) {
    return std::sqrt(active_kernels().dot(x.data(), x.data(), x.size()));
}

double squared_distance(std::span<double const> x, std::span<double const> y) {
    check_same_length(x.size(), y.size(), "squared_distance");
    return active_kernels().sq_dist(x.data(), y.data(), x.size());
}

double distance(std::span<double const> x, std::span<double const> y) {
    return std::sqrt(squared_distance(x, y));
}

ParamVector mean_of_rows(Matrix const& m, std::span<std::size_t const> indices) {
    if (indices.empty())
        throw ParameterError("mean_of_rows: no rows selected");
    auto const& k = active_kernels();
    ParamVector out(m.cols());
    for (std::size_t i : indices)
        k.add(m.row(i).data(), out.data(), out.size());
    double const count = static_cast<double>(indices.size());
    for (double& v : out)
        v = v / count;
    return out;
}

ParamVector mean_of_rows(Matrix const& m) {
    std::vector<std::size_t> all(m.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return mean_of_rows(m, all);
}

}  // namespace byzfl::num

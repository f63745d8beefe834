// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace byzfl::num {

/// Flat vector of model parameters or of a model update.
class ParamVector {
public:
    ParamVector() = default;
    explicit ParamVector(std::size_t d, double fill = 0.0) : values_(d, fill) {}
    ParamVector(std::initializer_list<double> init) : values_(init) {}
    explicit ParamVector(std::vector<double> values) : values_(std::move(values)) {}
    explicit ParamVector(std::span<double const> values) : values_(values.begin(), values.end()) {}

    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }

    double* data() noexcept { return values_.data(); }
    double const* data() const noexcept { return values_.data(); }
    double& operator[](std::size_t i) noexcept { return values_[i]; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    auto begin() noexcept { return values_.begin(); }
    auto end() noexcept { return values_.end(); }
    auto begin() const noexcept { return values_.begin(); }
    auto end() const noexcept { return values_.end(); }

    std::span<double> span() noexcept { return values_; }
    std::span<double const> span() const noexcept { return values_; }
    operator std::span<double const>() const noexcept { return values_; }

    std::vector<double> const& values() const noexcept { return values_; }

    bool all_finite() const noexcept;

    friend bool operator==(ParamVector const&, ParamVector const&) = default;

private:
    std::vector<double> values_;
};

/// Dense row-major matrix.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
    /// Rows must share a length.
    static Matrix from_rows(std::vector<std::vector<double>> const& rows);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }

    double& operator()(std::size_t r, std::size_t c) noexcept { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return data_[r * cols_ + c]; }

    std::span<double> row(std::size_t r) noexcept { return {data_.data() + r * cols_, cols_}; }
    std::span<double const> row(std::size_t r) const noexcept { return {data_.data() + r * cols_, cols_}; }

    double* data() noexcept { return data_.data(); }
    double const* data() const noexcept { return data_.data(); }

    friend bool operator==(Matrix const&, Matrix const&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

/// The n x d matrix of one round's client updates, in ascending client-id
/// order, with a Byzantine flag per row.
class UpdateSet {
public:
    UpdateSet() = default;
    /// Throws ParameterError unless n >= 1, flags and ids have n entries, and
    /// ids are strictly ascending.
    UpdateSet(Matrix rows, std::vector<bool> byzantine, std::vector<std::size_t> client_ids);
    /// All-benign set with ids 0..n-1.
    explicit UpdateSet(Matrix rows);
    static UpdateSet from_rows(std::vector<std::vector<double>> const& rows);

    std::size_t size() const noexcept { return rows_.rows(); }
    std::size_t dim() const noexcept { return rows_.cols(); }
    std::size_t num_byzantine() const noexcept;

    std::span<double const> row(std::size_t i) const noexcept { return rows_.row(i); }
    std::span<double> row(std::size_t i) noexcept { return rows_.row(i); }
    Matrix const& matrix() const noexcept { return rows_; }

    bool is_byzantine(std::size_t i) const noexcept { return byzantine_[i]; }
    std::size_t client_id(std::size_t i) const noexcept { return client_ids_[i]; }
    std::vector<bool> const& byzantine_mask() const noexcept { return byzantine_; }
    std::vector<std::size_t> const& client_ids() const noexcept { return client_ids_; }

    /// Rows `indices` (kept in the given order) as a new set. Flags follow
    /// the rows; ids are renumbered 0..k-1.
    UpdateSet select(std::span<std::size_t const> indices) const;

private:
    Matrix rows_;
    std::vector<bool> byzantine_;
    std::vector<std::size_t> client_ids_;
};

// Vector arithmetic. All functions are pure and throw DimensionError on a
// length mismatch.

/// a * x + y
ParamVector axpy(double a, ParamVector const& x, ParamVector const& y);
/// y += a * x
void axpy_inplace(double a, std::span<double const> x, std::span<double> y);
ParamVector scaled(ParamVector const& x, double a);
ParamVector add(ParamVector const& x, ParamVector const& y);
ParamVector sub(ParamVector const& x, ParamVector const& y);
double dot(std::span<double const> x, std::span<double const> y);
double l2_norm(std::span<double const> x);
double squared_distance(std::span<double const> x, std::span<double const> y);
double distance(std::span<double const> x, std::span<double const> y);

/// Arithmetic mean of the listed rows, summed in list order. An empty list is
/// a ParameterError.
ParamVector mean_of_rows(Matrix const& m, std::span<std::size_t const> indices);
ParamVector mean_of_rows(Matrix const& m);

}  // namespace byzfl::num

// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Small differentiable models with hand-written gradients.
//
// Parameter layouts (row-major, concatenated in this order):
//   linear    w[input_dim], b                          d = input_dim + 1
//   logistic  W[L][input_dim], b[L]                    d = input_dim*L + L
//   mlp       W1[h][input_dim], b1[h], W2[L][h], b2[L] d = input_dim*h + h + h*L + L
//
// The linear model regresses the integer label as a real target with mean
// squared error; its class prediction is the nearest label (ties go down),
// clamped to [0, L). Classifiers use mean softmax cross-entropy, with the
// max logit subtracted before exponentiation.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::models {

enum class ModelKind { linear, logistic, mlp };
enum class Activation { relu, tanh };

std::string_view to_string(ModelKind kind) noexcept;
std::string_view to_string(Activation act) noexcept;
/// Throws ConfigError on an unknown name.
ModelKind parse_model_kind(std::string_view name);
Activation parse_activation(std::string_view name);

struct ModelSpec {
    ModelKind kind = ModelKind::logistic;
    std::size_t input_dim = 1;
    std::size_t num_classes = 2;
    std::size_t hidden_dim = 0;  // mlp only
    Activation activation = Activation::relu;

    std::size_t param_dim() const noexcept;
    /// Throws ConfigError when the spec cannot describe a model.
    void validate() const;
};

struct Batch {
    num::Matrix features;         ///< b x input_dim
    std::vector<std::int32_t> labels;  ///< b entries in [0, L)

    std::size_t size() const noexcept { return labels.size(); }
};

struct LossGrad {
    double loss = 0.0;
    num::ParamVector grad;
};

struct Evaluation {
    double loss = 0.0;
    double accuracy = 0.0;
};

/// Anything the local optimizer can descend.
class Objective {
public:
    virtual ~Objective() = default;
    virtual std::size_t param_dim() const = 0;
    /// Writes the gradient into `grad` (length param_dim) and returns the loss.
    virtual double loss_and_grad(std::span<double const> w, Batch const& batch, std::span<double> grad) const = 0;
};

class ModelObjective final : public Objective {
public:
    explicit ModelObjective(ModelSpec spec);
    std::size_t param_dim() const override { return spec_.param_dim(); }
    double loss_and_grad(std::span<double const> w, Batch const& batch, std::span<double> grad) const override;
    ModelSpec const& spec() const noexcept { return spec_; }

private:
    ModelSpec spec_;
};

num::ParamVector init_params(ModelSpec const& spec, num::RngStream& rng);

/// Mean loss over the batch and its exact gradient. Throws DimensionError for
/// a wrong-length `w`, DataError for an out-of-range label.
LossGrad loss_and_grad(ModelSpec const& spec, num::ParamVector const& w, Batch const& batch);

/// Loss only (same value loss_and_grad reports).
double loss(ModelSpec const& spec, std::span<double const> w, Batch const& batch);

/// Per-sample predicted class; argmax ties resolve to the lowest class index.
std::vector<std::int32_t> predict(ModelSpec const& spec, std::span<double const> w, num::Matrix const& features);

/// Throws ParameterError on empty data.
Evaluation evaluate(ModelSpec const& spec, num::ParamVector const& w, Batch const& data);

}  // namespace byzfl::models

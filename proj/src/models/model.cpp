// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/models/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "byzfl/error.hpp"
#include "byzfl/numcore/kernels.hpp"

namespace byzfl::models {
namespace {

using num::KernelTable;

void check_inputs(ModelSpec const& spec, std::span<double const> w, Batch const& batch, bool need_labels) {
    if (w.size() != spec.param_dim())
        throw DimensionError("model: parameter length " + std::to_string(w.size()) + ", expected " +
                             std::to_string(spec.param_dim()));
    if (batch.features.cols() != spec.input_dim)
        throw DimensionError("model: feature width " + std::to_string(batch.features.cols()) + ", expected " +
                             std::to_string(spec.input_dim));
    if (need_labels) {
        if (batch.labels.size() != batch.features.rows())
            throw DimensionError("model: one label per row required");
        for (auto l : batch.labels)
            if (l < 0 || static_cast<std::size_t>(l) >= spec.num_classes)
                throw DataError("model: label " + std::to_string(l) + " outside [0, " +
                                std::to_string(spec.num_classes) + ")");
    }
}

// Softmax cross-entropy for one sample. Turns `logits` into (p - onehot) in
// place and returns -log p_label.
double softmax_xent(std::span<double> logits, std::int32_t label) {
    double const top = *std::max_element(logits.begin(), logits.end());
    double const shifted_label = logits[label] - top;
    double z = 0.0;
    for (double& v : logits) {
        v = std::exp(v - top);
        z += v;
    }
    double const loss = std::log(z) - shifted_label;
    for (double& v : logits)
        v = v / z;
    logits[label] -= 1.0;
    return loss;
}

// Loss and (optionally) gradient: the single forward/backward implementation
// shared by loss(), loss_and_grad() and the Objective adapter.
double forward_backward(ModelSpec const& spec, std::span<double const> w, Batch const& batch, double* grad) {
    KernelTable const& k = num::active_kernels();
    std::size_t const b = batch.size();
    std::size_t const in = spec.input_dim;
    std::size_t const classes = spec.num_classes;
    double const inv_b = 1.0 / static_cast<double>(b);
    if (grad)
        std::fill_n(grad, spec.param_dim(), 0.0);

    double total = 0.0;
    switch (spec.kind) {
    case ModelKind::linear: {
        double const* weights = w.data();
        double const bias = w[in];
        for (std::size_t s = 0; s < b; ++s) {
            double const* x = batch.features.row(s).data();
            double const residual = k.dot(weights, x, in) + bias - static_cast<double>(batch.labels[s]);
            total += residual * residual;
            if (grad) {
                double const g = 2.0 * residual * inv_b;
                k.axpy(g, x, grad, in);
                grad[in] += g;
            }
        }
        break;
    }
    case ModelKind::logistic: {
        double const* weights = w.data();
        double const* bias = w.data() + classes * in;
        std::vector<double> logits(classes);
        for (std::size_t s = 0; s < b; ++s) {
            double const* x = batch.features.row(s).data();
            for (std::size_t c = 0; c < classes; ++c)
                logits[c] = k.dot(weights + c * in, x, in) + bias[c];
            total += softmax_xent(logits, batch.labels[s]);
            if (grad) {
                for (std::size_t c = 0; c < classes; ++c) {
                    double const g = logits[c] * inv_b;
                    k.axpy(g, x, grad + c * in, in);
                    grad[classes * in + c] += g;
                }
            }
        }
        break;
    }
    case ModelKind::mlp: {
        std::size_t const h = spec.hidden_dim;
        double const* w1 = w.data();
        double const* b1 = w1 + h * in;
        double const* w2 = b1 + h;
        double const* b2 = w2 + classes * h;
        std::vector<double> act(h);
        std::vector<double> logits(classes);
        std::vector<double> dact(h);
        for (std::size_t s = 0; s < b; ++s) {
            double const* x = batch.features.row(s).data();
            for (std::size_t j = 0; j < h; ++j) {
                double const z = k.dot(w1 + j * in, x, in) + b1[j];
                act[j] = spec.activation == Activation::relu ? std::max(z, 0.0) : std::tanh(z);
            }
            for (std::size_t c = 0; c < classes; ++c)
                logits[c] = k.dot(w2 + c * h, act.data(), h) + b2[c];
            total += softmax_xent(logits, batch.labels[s]);
            if (!grad)
                continue;
            double* gw1 = grad;
            double* gb1 = gw1 + h * in;
            double* gw2 = gb1 + h;
            double* gb2 = gw2 + classes * h;
            std::fill(dact.begin(), dact.end(), 0.0);
            for (std::size_t c = 0; c < classes; ++c) {
                double const g = logits[c] * inv_b;
                k.axpy(g, act.data(), gw2 + c * h, h);
                gb2[c] += g;
                k.axpy(g, w2 + c * h, dact.data(), h);
            }
            for (std::size_t j = 0; j < h; ++j) {
                double const deriv =
                    spec.activation == Activation::relu ? (act[j] > 0.0 ? 1.0 : 0.0) : 1.0 - act[j] * act[j];
                double const dz = dact[j] * deriv;
                if (dz != 0.0)
                    k.axpy(dz, x, gw1 + j * in, in);
                gb1[j] += dz;
            }
        }
        break;
    }
    }
    return total * inv_b;
}

}  // namespace

std::string_view to_string(ModelKind kind) noexcept {
    switch (kind) {
    case ModelKind::linear: return "linear";
    case ModelKind::logistic: return "logistic";
    case ModelKind::mlp: return "mlp";
    }
    return "?";
}

std::string_view to_string(Activation act) noexcept {
    return act == Activation::relu ? "relu" : "tanh";
}

ModelKind parse_model_kind(std::string_view name) {
    if (name == "linear") return ModelKind::linear;
    if (name == "logistic") return ModelKind::logistic;
    if (name == "mlp") return ModelKind::mlp;
    throw ConfigError("unknown model kind '" + std::string(name) + "'");
}

Activation parse_activation(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    throw ConfigError("unknown activation '" + std::string(name) + "'");
}

std::size_t ModelSpec::param_dim() const noexcept {
    switch (kind) {
    case ModelKind::linear: return input_dim + 1;
    case ModelKind::logistic: return input_dim * num_classes + num_classes;
    case ModelKind::mlp: return input_dim * hidden_dim + hidden_dim + hidden_dim * num_classes + num_classes;
    }
    return 0;
}

void ModelSpec::validate() const {
    if (input_dim == 0)
        throw ConfigError("model: input_dim must be positive");
    if (num_classes < 2)
        throw ConfigError("model: num_classes must be at least 2");
    if (kind == ModelKind::mlp && hidden_dim == 0)
        throw ConfigError("model: mlp needs hidden_dim >= 1");
}

ModelObjective::ModelObjective(ModelSpec spec) : spec_(spec) { spec_.validate(); }

double ModelObjective::loss_and_grad(std::span<double const> w, Batch const& batch, std::span<double> grad) const {
    check_inputs(spec_, w, batch, true);
    if (grad.size() != spec_.param_dim())
        throw DimensionError("model: gradient buffer has the wrong length");
    if (batch.size() == 0)
        throw ParameterError("model: empty batch");
    return forward_backward(spec_, w, batch, grad.data());
}

num::ParamVector init_params(ModelSpec const& spec, num::RngStream& rng) {
    spec.validate();
    num::ParamVector w(spec.param_dim());
    auto fill_uniform = [&](std::size_t offset, std::size_t count, std::size_t fan_in) {
        double const bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
        for (std::size_t i = 0; i < count; ++i)
            w[offset + i] = rng.uniform(-bound, bound);
    };
    std::size_t const in = spec.input_dim;
    std::size_t const classes = spec.num_classes;
    switch (spec.kind) {
    case ModelKind::linear:
        fill_uniform(0, in, in);
        break;
    case ModelKind::logistic:
        fill_uniform(0, in * classes, in);
        break;
    case ModelKind::mlp: {
        std::size_t const h = spec.hidden_dim;
        fill_uniform(0, h * in, in);
        fill_uniform(h * in + h, classes * h, h);
        break;
    }
    }
    return w;
}

LossGrad loss_and_grad(ModelSpec const& spec, num::ParamVector const& w, Batch const& batch) {
    LossGrad out;
    out.grad = num::ParamVector(spec.param_dim());
    out.loss = ModelObjective(spec).loss_and_grad(w, batch, out.grad.span());
    return out;
}

double loss(ModelSpec const& spec, std::span<double const> w, Batch const& batch) {
    check_inputs(spec, w, batch, true);
    if (batch.size() == 0)
        throw ParameterError("model: empty batch");
    return forward_backward(spec, w, batch, nullptr);
}

std::vector<std::int32_t> predict(ModelSpec const& spec, std::span<double const> w, num::Matrix const& features) {
    KernelTable const& k = num::active_kernels();
    std::size_t const in = spec.input_dim;
    std::size_t const classes = spec.num_classes;
    std::vector<std::int32_t> out(features.rows());
    std::vector<double> scores(classes);
    std::vector<double> act(spec.hidden_dim);
    for (std::size_t s = 0; s < features.rows(); ++s) {
        double const* x = features.row(s).data();
        if (spec.kind == ModelKind::linear) {
            double const pred = k.dot(w.data(), x, in) + w[in];
            double const nearest = std::ceil(pred - 0.5);
            out[s] = static_cast<std::int32_t>(std::clamp(nearest, 0.0, static_cast<double>(classes - 1)));
            continue;
        }
        if (spec.kind == ModelKind::logistic) {
            for (std::size_t c = 0; c < classes; ++c)
                scores[c] = k.dot(w.data() + c * in, x, in) + w[classes * in + c];
        } else {
            std::size_t const h = spec.hidden_dim;
            double const* w1 = w.data();
            double const* b1 = w1 + h * in;
            double const* w2 = b1 + h;
            double const* b2 = w2 + classes * h;
            for (std::size_t j = 0; j < h; ++j) {
                double const z = k.dot(w1 + j * in, x, in) + b1[j];
                act[j] = spec.activation == Activation::relu ? std::max(z, 0.0) : std::tanh(z);
            }
            for (std::size_t c = 0; c < classes; ++c)
                scores[c] = k.dot(w2 + c * h, act.data(), h) + b2[c];
        }
        std::size_t best = 0;
        for (std::size_t c = 1; c < classes; ++c)
            if (scores[c] > scores[best])
                best = c;
        out[s] = static_cast<std::int32_t>(best);
    }
    return out;
}

Evaluation evaluate(ModelSpec const& spec, num::ParamVector const& w, Batch const& data) {
    if (data.size() == 0)
        throw ParameterError("evaluate: empty data");
    Evaluation ev;
    ev.loss = loss(spec, w.span(), data);
    auto const pred = predict(spec, w.span(), data.features);
    std::size_t correct = 0;
    for (std::size_t s = 0; s < pred.size(); ++s)
        correct += pred[s] == data.labels[s] ? 1 : 0;
    ev.accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
    return ev;
}

}  // namespace byzfl::models

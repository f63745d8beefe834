#include <cmath>

#include "byzfl/data/dataset.hpp"
#include "byzfl/error.hpp"
#include "byzfl/models/model.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace byzfl;
using namespace byzfl::models;
using num::ParamVector;

namespace {
Batch random_batch(std::size_t b, std::size_t dim, std::size_t classes, num::RngStream& rng) {
    Batch batch;
    batch.features = num::Matrix(b, dim);
    for (std::size_t i = 0; i < b * dim; ++i)
        batch.features.data()[i] = rng.normal();
    for (std::size_t i = 0; i < b; ++i)
        batch.labels.push_back(static_cast<std::int32_t>(rng.uniform_index(classes)));
    return batch;
}
}  // namespace

TEST_SUITE("models") {
    TEST_CASE("dimension formula") {
        CHECK(ModelSpec{ModelKind::logistic, 4, 3, 0, Activation::relu}.param_dim() == 15);
        CHECK(ModelSpec{ModelKind::mlp, 4, 3, 8, Activation::relu}.param_dim() == 67);
    }

    TEST_CASE("init is deterministic") {
        ModelSpec spec{ModelKind::mlp, 4, 3, 8, Activation::tanh};
        auto r1 = num::RngStream::root(1), r2 = num::RngStream::root(1);
        CHECK(init_params(spec, r1) == init_params(spec, r2));
    }

    TEST_CASE("logistic at zero is ln L") {
        ModelSpec spec{ModelKind::logistic, 3, 5, 0, Activation::relu};
        auto rng = num::RngStream::root(3);
        auto batch = random_batch(7, 3, 5, rng);
        CHECK(loss(spec, ParamVector(spec.param_dim()).span(), batch) == doctest::Approx(std::log(5.0)));
    }

    TEST_CASE("linear at zero with zero targets") {
        ModelSpec spec{ModelKind::linear, 3, 2, 0, Activation::relu};
        auto rng = num::RngStream::root(4);
        auto batch = random_batch(6, 3, 1, rng);  // all labels 0
        auto lg = loss_and_grad(spec, ParamVector(spec.param_dim()), batch);
        CHECK(lg.loss == 0.0);
        CHECK(lg.grad == ParamVector(spec.param_dim()));
    }

    TEST_CASE("label out of range") {
        ModelSpec spec{ModelKind::logistic, 2, 2, 0, Activation::relu};
        Batch batch;
        batch.features = num::Matrix(1, 2);
        batch.labels = {2};
        CHECK_THROWS_AS(loss(spec, ParamVector(spec.param_dim()).span(), batch), DataError);
    }

    TEST_CASE("finite differences") {
        auto rng = num::RngStream::root(5);
        for (auto spec : {ModelSpec{ModelKind::linear, 3, 2, 0, Activation::relu},
                          ModelSpec{ModelKind::logistic, 3, 4, 0, Activation::relu},
                          ModelSpec{ModelKind::mlp, 3, 3, 5, Activation::tanh},
                          ModelSpec{ModelKind::mlp, 3, 3, 5, Activation::relu}}) {
            auto batch = random_batch(5, 3, spec.num_classes, rng);
            auto w = num::gaussian(rng, 0, 0.5, spec.param_dim());
            auto lg = loss_and_grad(spec, w, batch);
            auto fd = oracle::fd_gradient(spec, w.values(), batch, 1e-6);
            for (std::size_t i = 0; i < fd.size(); ++i)
                CHECK(lg.grad[i] == doctest::Approx(fd[i]).epsilon(1e-5).scale(1.0));
        }
    }

    TEST_CASE("evaluate") {
        ModelSpec spec{ModelKind::logistic, 2, 2, 0, Activation::relu};
        Batch data;
        data.features = num::Matrix::from_rows({{1, 0}, {-1, 0}, {2, 1}, {-2, 1}});
        data.labels = {1, 0, 1, 0};
        CHECK(evaluate(spec, ParamVector(spec.param_dim()), data).accuracy == 0.5);
        // class-major weights, then biases
        ParamVector w(spec.param_dim());
        w[0] = -1.0;
        w[2] = 1.0;
        CHECK(evaluate(spec, w, data).accuracy == 1.0);
        CHECK_THROWS_AS(evaluate(spec, w, Batch{}), ParameterError);
    }

    TEST_CASE("centralized training reaches high accuracy") {
        auto rng = num::RngStream::root(6);
        auto ds = data::synth_gaussian_mixture(2, 2, 500, 6.0, rng);
        auto rs = rng.derive("split");
        auto split = data::split_holdout(ds, 0.2, rs);
        ModelSpec spec{ModelKind::logistic, 2, 2, 0, Activation::relu};
        ParamVector w(spec.param_dim());
        auto br = rng.derive("batches");
        for (int step = 0; step < 500; ++step) {
            std::vector<std::size_t> idx;
            for (int i = 0; i < 32; ++i)
                idx.push_back(br.uniform_index(split.train.size()));
            auto lg = loss_and_grad(spec, w, data::gather(split.train, idx));
            w = num::axpy(-0.1, lg.grad, w);
        }
        CHECK(evaluate(spec, w, data::as_batch(split.test)).accuracy >= 0.95);
    }
}

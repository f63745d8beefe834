// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/attacks/attacks.hpp"

#include <cctype>
#include <cmath>
#include <string>

#include "byzfl/error.hpp"
#include "byzfl/numcore/kernels.hpp"
#include "byzfl/numcore/special.hpp"

namespace byzfl::attacks {
namespace {

class LabelFlipCallback final : public ClientCallback {
public:
    explicit LabelFlipCallback(std::size_t num_classes) : num_classes_(num_classes) {}
    void on_batch_begin(models::Batch& batch) const override {
        for (auto& l : batch.labels)
            l = flip_label(l, num_classes_);
    }

private:
    std::size_t num_classes_;
};

class SignFlipCallback final : public ClientCallback {
public:
    void on_backward_end(std::span<double> grad) const override {
        for (double& g : grad)
            g = -g;
    }
};

class OmniscientCallback final : public AdversaryCallback {
public:
    explicit OmniscientCallback(AttackConfig cfg) : cfg_(cfg) {}

    void on_algorithm_begin(AlgorithmContext const& ctx) override {
        if ((cfg_.kind == AttackKind::alie || cfg_.kind == AttackKind::minmax) && ctx.num_malicious > 0 &&
            ctx.num_clients - ctx.num_malicious < 2)
            throw ConfigError(std::string(to_string(cfg_.kind)) + ": needs at least two benign clients");
    }

    void on_local_round_end(AdversaryView& view) override {
        if (view.num_malicious() == 0)
            return;
        switch (cfg_.kind) {
        case AttackKind::noise: noise_updates(view, cfg_); break;
        case AttackKind::alie: alie_updates(view, cfg_); break;
        case AttackKind::ipm: ipm_updates(view, cfg_); break;
        case AttackKind::minmax: minmax_updates(view, cfg_); break;
        default: break;
        }
    }

private:
    AttackConfig cfg_;
};

}  // namespace

std::string_view to_string(AttackKind kind) noexcept {
    switch (kind) {
    case AttackKind::label_flip: return "label_flip";
    case AttackKind::sign_flip: return "sign_flip";
    case AttackKind::noise: return "noise";
    case AttackKind::alie: return "alie";
    case AttackKind::ipm: return "ipm";
    case AttackKind::minmax: return "minmax";
    }
    return "?";
}

AttackKind parse_attack_kind(std::string_view name) {
    // Case and separators are ignored, as are an "Adversary" suffix and the
    // "-ping" form of the flip attacks.
    std::string key;
    for (char ch : name)
        if (std::isalnum(static_cast<unsigned char>(ch)))
            key.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (key.size() > 9 && key.ends_with("adversary"))
        key.resize(key.size() - 9);
    if (key.ends_with("flipping"))
        key.resize(key.size() - 4);
    for (auto k : all_attacks()) {
        std::string canon;
        for (char ch : to_string(k))
            if (ch != '_')
                canon.push_back(ch);
        if (canon == key)
            return k;
    }
    throw ConfigError("unknown attack '" + std::string(name) + "'");
}

int default_level(AttackKind kind) noexcept {
    switch (kind) {
    case AttackKind::label_flip: return 1;
    case AttackKind::sign_flip: return 2;
    case AttackKind::noise: return 2;
    case AttackKind::alie: return 4;
    case AttackKind::ipm: return 4;
    case AttackKind::minmax: return 5;
    }
    return 1;
}

std::vector<AttackKind> all_attacks() {
    return {AttackKind::label_flip, AttackKind::sign_flip, AttackKind::noise,
            AttackKind::alie,       AttackKind::ipm,       AttackKind::minmax};
}

std::string_view to_string(Perturbation p) noexcept {
    switch (p) {
    case Perturbation::neg_unit_mean: return "neg_unit_mean";
    case Perturbation::neg_std: return "neg_std";
    case Perturbation::neg_sign: return "neg_sign";
    }
    return "?";
}

Perturbation parse_perturbation(std::string_view name) {
    for (auto p : {Perturbation::neg_unit_mean, Perturbation::neg_std, Perturbation::neg_sign})
        if (to_string(p) == name)
            return p;
    throw ConfigError("unknown minmax perturbation '" + std::string(name) + "'");
}

AttackConfig AttackConfig::defaults_for(AttackKind kind) {
    AttackConfig cfg;
    cfg.kind = kind;
    cfg.level = default_level(kind);
    return cfg;
}

std::int32_t flip_label(std::int32_t label, std::size_t num_classes) {
    if (label < 0 || static_cast<std::size_t>(label) >= num_classes)
        throw DataError("flip_label: label " + std::to_string(label) + " outside [0, " +
                        std::to_string(num_classes) + ")");
    return static_cast<std::int32_t>(num_classes) - label - 1;
}

num::ParamVector sign_flip(num::ParamVector const& grad) {
    num::ParamVector out = grad;
    for (double& g : out)
        g = -g;
    return out;
}

num::ParamVector noise_update(std::size_t d, double sigma, num::RngStream& rng) {
    if (!(sigma >= 0.0))
        throw ParameterError("noise_update: sigma must be non-negative");
    return num::gaussian(rng, 0.0, sigma, d);
}

double alie_z(std::size_t num_clients, std::size_t num_malicious, AlieParams const& params) {
    if (!params.auto_z)
        return params.z_max;
    auto const n = static_cast<long long>(num_clients);
    auto const s = n / 2 + 1 - static_cast<long long>(num_malicious);
    double const p = static_cast<double>(n - s) / static_cast<double>(n);
    if (!(p > 0.0 && p < 1.0))
        throw ConfigError("alie: automatic z undefined for K=" + std::to_string(num_clients) +
                          ", M=" + std::to_string(num_malicious));
    return num::normal_quantile(p);
}

ColumnStats column_stats(num::Matrix const& m) {
    std::size_t const n = m.rows();
    std::size_t const d = m.cols();
    ColumnStats out{num::mean_of_rows(m), num::ParamVector(d)};
    if (n < 2)
        return out;
    for (std::size_t r = 0; r < n; ++r) {
        auto row = m.row(r);
        for (std::size_t i = 0; i < d; ++i) {
            double const t = row[i] - out.mean[i];
            out.std[i] += t * t;
        }
    }
    double const denom = static_cast<double>(n - 1);
    for (double& v : out.std)
        v = std::sqrt(v / denom);
    return out;
}

void alie_updates(AdversaryView& view, AttackConfig const& cfg) {
    if (view.num_benign() < 2)
        throw ConfigError("alie: needs at least two benign updates");
    double const z = alie_z(view.num_clients(), view.num_malicious(), cfg.alie);
    auto const stats = column_stats(view.benign_matrix());
    double const shift = static_cast<double>(cfg.alie.direction_sign) * z;
    num::ParamVector mal(view.dim());
    for (std::size_t i = 0; i < mal.size(); ++i)
        mal[i] = stats.mean[i] + shift * stats.std[i];
    view.fill_malicious(mal);
}

void ipm_updates(AdversaryView& view, AttackConfig const& cfg) {
    if (view.num_benign() < 1)
        throw ConfigError("ipm: needs at least one benign update");
    auto const& k = num::active_kernels();
    num::ParamVector sum(view.dim());
    for (std::size_t j = 0; j < view.num_benign(); ++j)
        k.add(view.benign(j).data(), sum.data(), sum.size());
    double const factor = -cfg.ipm_epsilon / static_cast<double>(view.num_benign());
    view.fill_malicious(num::scaled(sum, factor));
}

MinMaxResult minmax_search(num::Matrix const& benign, MinMaxParams const& params) {
    std::size_t const n = benign.rows();
    std::size_t const d = benign.cols();
    if (n < 2)
        throw ConfigError("minmax: needs at least two benign updates");
    if (!(params.gamma_init > 0.0 && params.gamma_tol > 0.0))
        throw ConfigError("minmax: gamma_init and gamma_tol must be positive");
    auto const& k = num::active_kernels();
    auto const stats = column_stats(benign);

    double diameter_sq = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            diameter_sq = std::max(diameter_sq, k.sq_dist(benign.row(a).data(), benign.row(b).data(), d));

    MinMaxResult out{0.0, stats.mean};
    if (diameter_sq == 0.0)
        return out;

    num::ParamVector dir(d);
    switch (params.perturbation) {
    case Perturbation::neg_std: {
        double const norm = num::l2_norm(stats.std);
        if (norm > 0.0)
            for (std::size_t i = 0; i < d; ++i)
                dir[i] = -stats.std[i] / norm;
        break;
    }
    case Perturbation::neg_unit_mean: {
        double const norm = num::l2_norm(stats.mean);
        if (norm > 0.0)
            for (std::size_t i = 0; i < d; ++i)
                dir[i] = -stats.mean[i] / norm;
        break;
    }
    case Perturbation::neg_sign:
        for (std::size_t i = 0; i < d; ++i)
            dir[i] = stats.mean[i] > 0.0 ? -1.0 : (stats.mean[i] < 0.0 ? 1.0 : 0.0);
        break;
    }
    if (num::l2_norm(dir) == 0.0)
        return out;

    num::ParamVector candidate(d);
    auto feasible = [&](double gamma) {
        candidate = stats.mean;
        k.axpy(gamma, dir.data(), candidate.data(), d);
        for (std::size_t j = 0; j < n; ++j)
            if (k.sq_dist(candidate.data(), benign.row(j).data(), d) > diameter_sq)
                return false;
        return true;
    };

    // The feasible set is an interval containing 0 (the mean is always within
    // the diameter), so bracket its right end and bisect.
    double lo = 0.0;
    double hi = params.gamma_init;
    if (feasible(hi)) {
        lo = hi;
        for (int i = 0; i < 1100 && feasible(2.0 * lo); ++i)
            lo *= 2.0;
        hi = 2.0 * lo;
    } else {
        while (hi > params.gamma_tol) {
            double const half = 0.5 * hi;
            if (feasible(half)) {
                lo = half;
                break;
            }
            hi = half;
        }
    }
    while (hi - lo > params.gamma_tol) {
        double const mid = 0.5 * (lo + hi);
        if (feasible(mid))
            lo = mid;
        else
            hi = mid;
    }
    out.gamma = lo;
    k.axpy(lo, dir.data(), out.update.data(), d);
    return out;
}

void minmax_updates(AdversaryView& view, AttackConfig const& cfg) {
    auto const res = minmax_search(view.benign_matrix(), cfg.minmax);
    view.fill_malicious(res.update);
}

void noise_updates(AdversaryView& view, AttackConfig const& cfg) {
    for (std::size_t j = 0; j < view.num_malicious(); ++j) {
        num::RngStream rng = view.rng().derive("client", view.malicious_client_id(j));
        auto const noise = noise_update(view.dim(), cfg.noise_std, rng);
        std::copy(noise.begin(), noise.end(), view.malicious(j).begin());
    }
}

AttackPlan make_attack(AttackConfig const& cfg, std::size_t num_classes) {
    AttackPlan plan;
    switch (cfg.kind) {
    case AttackKind::label_flip: plan.client = std::make_shared<LabelFlipCallback>(num_classes); break;
    case AttackKind::sign_flip: plan.client = std::make_shared<SignFlipCallback>(); break;
    default: plan.adversary = std::make_shared<OmniscientCallback>(cfg); break;
    }
    return plan;
}

}  // namespace byzfl::attacks

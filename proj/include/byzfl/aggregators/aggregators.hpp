// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

// Aggregation rules. Every rule maps an UpdateSet to one ParamVector and is a
// pure function of its arguments; state such as the centered-clipping memory
// is owned by the caller and passed in.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "byzfl/numcore/rng.hpp"
#include "byzfl/numcore/tensor.hpp"

namespace byzfl::agg {

enum class AggKind { mean, median, trimmed_mean, geomed, krum, cc, dnc, clipped_clustering, signguard };

std::string_view to_string(AggKind kind) noexcept;
/// Accepts the snake_case names and the CamelCase spellings (Mean, GeoMed, ...).
AggKind parse_agg_kind(std::string_view name);
std::vector<AggKind> all_aggregators();

struct AggregatorConfig {
    AggKind kind = AggKind::mean;

    std::size_t trim_b = 0;

    std::size_t geomed_max_iters = 100;
    double geomed_eps = 1e-6;

    /// Assumed number of Byzantine rows for krum and dnc. Unset means the
    /// caller's default (the trial's true M).
    std::optional<std::size_t> f;

    double cc_tau = 10.0;
    std::size_t cc_iters = 3;

    std::size_t dnc_niters = 1;
    /// Unset means min(d, 1000).
    std::optional<std::size_t> dnc_sub_dim;
    double dnc_c = 1.0;

    /// Clip radius from the median of all norms seen so far instead of the
    /// current round's.
    bool cluster_historical_norm = false;

    double sg_lower = 0.1;
    double sg_upper = 3.0;
    double sg_coord_frac = 0.1;

    /// Bucket size; unset disables bucketing.
    std::optional<std::size_t> bucketing;

    std::string describe() const;
};

/// Per-call inputs that are not part of the update set.
struct AggregateContext {
    /// Centered-clipping start point; empty means zero.
    std::span<double const> v0;
    /// Default for AggregatorConfig::f.
    std::size_t default_f = 0;
    /// Norm history for clipped_clustering in historical mode. Appended to.
    std::vector<double>* norm_history = nullptr;
};

num::ParamVector agg_mean(num::UpdateSet const& u);
num::ParamVector agg_median(num::UpdateSet const& u);
/// ConfigError when 2b >= n.
num::ParamVector agg_trimmed_mean(num::UpdateSet const& u, std::size_t b);

struct GeomedResult {
    num::ParamVector v;
    /// Objective sum_i ||v - u_i|| at the start point and after every step.
    std::vector<double> objective;
    std::size_t iterations = 0;
};
GeomedResult geomed_weiszfeld(num::UpdateSet const& u, std::size_t max_iters, double eps);
num::ParamVector agg_geomed(num::UpdateSet const& u, std::size_t max_iters = 100, double eps = 1e-6);

struct KrumResult {
    std::size_t selected = 0;
    std::vector<double> scores;
    std::size_t neighbours = 0;
};
KrumResult krum_scores(num::UpdateSet const& u, std::size_t f);
num::ParamVector agg_krum(num::UpdateSet const& u, std::size_t f);

num::ParamVector agg_cc(num::UpdateSet const& u, double tau, std::size_t iters, std::span<double const> v0);

struct DncResult {
    num::ParamVector v;
    std::vector<std::size_t> kept;
};
DncResult dnc_select(num::UpdateSet const& u, std::size_t niters, std::size_t sub_dim, double c, std::size_t f,
                     num::RngStream& rng);
num::ParamVector agg_dnc(num::UpdateSet const& u, std::size_t niters, std::size_t sub_dim, double c, std::size_t f,
                         num::RngStream& rng);

/// Average-linkage agglomerative clustering of a symmetric n x n distance
/// matrix down to two clusters. Returns the cluster label (0 or 1) of every
/// point; label 0 is the cluster holding point 0. n >= 2.
std::vector<int> average_linkage_two_clusters(num::Matrix const& dist);

struct ClusterResult {
    num::ParamVector v;
    double tau = 0.0;
    std::vector<std::size_t> selected;
};
/// tau <= 0 means the median norm of the current rows.
ClusterResult clipped_clustering_select(num::UpdateSet const& u, double tau = 0.0);
num::ParamVector agg_clipped_clustering(num::UpdateSet const& u);

struct SignGuardResult {
    num::ParamVector v;
    std::vector<std::size_t> norm_kept;
    std::vector<std::size_t> sign_kept;
    std::vector<std::size_t> kept;
    bool fell_back = false;
};
SignGuardResult signguard_select(num::UpdateSet const& u, double lower, double upper, double coord_frac,
                                 num::RngStream& rng);
num::ParamVector agg_signguard(num::UpdateSet const& u, double lower, double upper, double coord_frac,
                               num::RngStream& rng);

/// The update set of bucket means: rows shuffled by `rng`, cut into
/// ceil(n / s) consecutive buckets.
num::UpdateSet make_buckets(num::UpdateSet const& u, std::size_t s, num::RngStream& rng);
num::ParamVector bucketing_wrap(num::UpdateSet const& u, std::size_t s, AggregatorConfig const& base,
                                num::RngStream& rng, AggregateContext const& ctx = {});

/// Checks parameter domains that do not depend on n.
void validate(AggregatorConfig const& cfg);

/// Dispatch on cfg.kind, applying bucketing first when configured.
num::ParamVector aggregate(num::UpdateSet const& u, AggregatorConfig const& cfg, num::RngStream& rng,
                           AggregateContext const& ctx = {});

/// Median of a list of values; even length gives the mean of the middle pair.
double median_of(std::vector<double> values);

}  // namespace byzfl::agg

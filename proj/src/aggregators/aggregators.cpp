// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/aggregators/aggregators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <iterator>
#include <limits>
#include <numeric>
#include <sstream>

#include <spdlog/spdlog.h>

#include "byzfl/error.hpp"
#include "byzfl/numcore/kernels.hpp"
#include "byzfl/numcore/linalg.hpp"

namespace byzfl::agg {

using num::Matrix;
using num::ParamVector;
using num::UpdateSet;

namespace {

constexpr std::size_t kPowerIters = 100;

std::vector<double> column(UpdateSet const& u, std::size_t c) {
    std::vector<double> col(u.size());
    for (std::size_t r = 0; r < u.size(); ++r)
        col[r] = u.row(r)[c];
    return col;
}

std::vector<double> row_norms(UpdateSet const& u) {
    std::vector<double> out(u.size());
    for (std::size_t i = 0; i < u.size(); ++i)
        out[i] = num::l2_norm(u.row(i));
    return out;
}

ParamVector mean_of(UpdateSet const& u, std::span<std::size_t const> idx) {
    return num::mean_of_rows(u.matrix(), idx);
}

void require_rows(UpdateSet const& u, char const* who) {
    if (u.size() == 0)
        throw ParameterError(std::string(who) + ": empty update set");
}

std::string lower_ascii(std::string_view s) {
    std::string out;
    for (char ch : s)
        if (ch != '_' && ch != '-')
            out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    return out;
}

}  // namespace

std::string_view to_string(AggKind kind) noexcept {
    switch (kind) {
    case AggKind::mean: return "mean";
    case AggKind::median: return "median";
    case AggKind::trimmed_mean: return "trimmed_mean";
    case AggKind::geomed: return "geomed";
    case AggKind::krum: return "krum";
    case AggKind::cc: return "cc";
    case AggKind::dnc: return "dnc";
    case AggKind::clipped_clustering: return "clipped_clustering";
    case AggKind::signguard: return "signguard";
    }
    return "?";
}

AggKind parse_agg_kind(std::string_view name) {
    std::string const key = lower_ascii(name);
    for (auto k : all_aggregators())
        if (lower_ascii(to_string(k)) == key)
            return k;
    if (key == "centeredclipping")
        return AggKind::cc;
    throw ConfigError("unknown aggregator '" + std::string(name) + "'");
}

std::vector<AggKind> all_aggregators() {
    return {AggKind::mean, AggKind::median, AggKind::trimmed_mean, AggKind::geomed,   AggKind::krum,
            AggKind::cc,   AggKind::dnc,    AggKind::clipped_clustering, AggKind::signguard};
}

std::string AggregatorConfig::describe() const {
    std::ostringstream os;
    os << to_string(kind);
    switch (kind) {
    case AggKind::trimmed_mean: os << "(b=" << trim_b << ")"; break;
    case AggKind::krum:
        if (f)
            os << "(f=" << *f << ")";
        break;
    case AggKind::cc: os << "(tau=" << cc_tau << ",iters=" << cc_iters << ")"; break;
    default: break;
    }
    if (bucketing)
        os << "+bucketing(s=" << *bucketing << ")";
    return os.str();
}

double median_of(std::vector<double> values) {
    if (values.empty())
        throw ParameterError("median_of: empty input");
    std::sort(values.begin(), values.end());
    std::size_t const n = values.size();
    if (n % 2 == 1)
        return values[n / 2];
    return (values[n / 2 - 1] + values[n / 2]) / 2.0;
}

ParamVector agg_mean(UpdateSet const& u) {
    require_rows(u, "mean");
    return num::mean_of_rows(u.matrix());
}

ParamVector agg_median(UpdateSet const& u) {
    require_rows(u, "median");
    ParamVector out(u.dim());
    for (std::size_t c = 0; c < u.dim(); ++c)
        out[c] = median_of(column(u, c));
    return out;
}

ParamVector agg_trimmed_mean(UpdateSet const& u, std::size_t b) {
    require_rows(u, "trimmed_mean");
    std::size_t const n = u.size();
    if (2 * b >= n)
        throw ConfigError("trimmed_mean: need 2b < n (b=" + std::to_string(b) + ", n=" + std::to_string(n) + ")");
    ParamVector out(u.dim());
    for (std::size_t c = 0; c < u.dim(); ++c) {
        auto col = column(u, c);
        std::sort(col.begin(), col.end());
        double sum = 0.0;
        for (std::size_t i = b; i < n - b; ++i)
            sum += col[i];
        out[c] = sum / static_cast<double>(n - 2 * b);
    }
    return out;
}

GeomedResult geomed_weiszfeld(UpdateSet const& u, std::size_t max_iters, double eps) {
    require_rows(u, "geomed");
    if (!(eps > 0.0))
        throw ConfigError("geomed: eps must be positive");
    auto const& k = num::active_kernels();
    std::size_t const n = u.size();
    std::size_t const d = u.dim();

    GeomedResult out;
    out.v = agg_mean(u);
    std::vector<double> dist(n);
    auto objective = [&] {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dist[i] = std::sqrt(k.sq_dist(out.v.data(), u.row(i).data(), d));
            s += dist[i];
        }
        return s;
    };
    out.objective.push_back(objective());

    ParamVector next(d);
    for (std::size_t it = 0; it < max_iters; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        double wsum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            double const w = 1.0 / std::max(eps, dist[i]);
            k.axpy(w, u.row(i).data(), next.data(), d);
            wsum += w;
        }
        k.scale(1.0 / wsum, next.data(), d);
        double const step = std::sqrt(k.sq_dist(next.data(), out.v.data(), d));
        std::swap(out.v, next);
        out.objective.push_back(objective());
        out.iterations = it + 1;
        if (step <= eps)
            break;
    }
    // Weiszfeld creeps toward an optimum that sits on a data point. Test the
    // nearest one directly: x_j is optimal iff |sum_{i != j} unit(x_j - x_i)| <= 1.
    std::size_t const j = static_cast<std::size_t>(std::min_element(dist.begin(), dist.end()) - dist.begin());
    if (dist[j] > 0.0) {
        ParamVector r(d);
        std::vector<double> diff(d);
        for (std::size_t i = 0; i < n; ++i) {
            double const dij = std::sqrt(k.sq_dist(u.row(j).data(), u.row(i).data(), d));
            if (dij == 0.0)
                continue;
            k.sub(u.row(j).data(), u.row(i).data(), diff.data(), d);
            k.axpy(1.0 / dij, diff.data(), r.data(), d);
        }
        if (num::l2_norm(r) <= 1.0) {
            ParamVector const prev = out.v;
            out.v = ParamVector(u.row(j));
            double const obj = objective();
            if (obj <= out.objective.back())
                out.objective.push_back(obj);
            else
                out.v = prev;
        }
    }
    return out;
}

ParamVector agg_geomed(UpdateSet const& u, std::size_t max_iters, double eps) {
    return geomed_weiszfeld(u, max_iters, eps).v;
}

KrumResult krum_scores(UpdateSet const& u, std::size_t f) {
    std::size_t const n = u.size();
    if (n < 2)
        throw ConfigError("krum: needs at least two updates");
    auto const& k = num::active_kernels();
    KrumResult out;
    if (n < f + 3) {
        spdlog::warn("krum: n={} < f+3={}; using {} neighbours", n, f + 3, n - 2);
        out.neighbours = n - 2;
    } else {
        out.neighbours = n - f - 2;
    }
    Matrix sq(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            sq(i, j) = sq(j, i) = k.sq_dist(u.row(i).data(), u.row(j).data(), u.dim());
    out.scores.resize(n);
    std::vector<double> others;
    for (std::size_t i = 0; i < n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i)
                others.push_back(sq(i, j));
        std::sort(others.begin(), others.end());
        double s = 0.0;
        for (std::size_t j = 0; j < out.neighbours; ++j)
            s += others[j];
        out.scores[i] = s;
    }
    // Rows are in ascending client-id order, so the first minimum is the
    // lowest id.
    out.selected = static_cast<std::size_t>(std::min_element(out.scores.begin(), out.scores.end()) -
                                            out.scores.begin());
    return out;
}

ParamVector agg_krum(UpdateSet const& u, std::size_t f) {
    auto const res = krum_scores(u, f);
    return ParamVector(u.row(res.selected));
}

ParamVector agg_cc(UpdateSet const& u, double tau, std::size_t iters, std::span<double const> v0) {
    require_rows(u, "cc");
    if (!(tau > 0.0) || iters == 0)
        throw ConfigError("cc: need tau > 0 and iters >= 1");
    std::size_t const d = u.dim();
    if (!v0.empty() && v0.size() != d)
        throw DimensionError("cc: v0 has wrong length");
    auto const& k = num::active_kernels();
    ParamVector v = v0.empty() ? ParamVector(d) : ParamVector(v0);
    ParamVector diff(d);
    ParamVector acc(d);
    double const inv_n = 1.0 / static_cast<double>(u.size());
    for (std::size_t it = 0; it < iters; ++it) {
        std::fill(acc.begin(), acc.end(), 0.0);
        for (std::size_t i = 0; i < u.size(); ++i) {
            k.sub(u.row(i).data(), v.data(), diff.data(), d);
            double const norm = std::sqrt(k.dot(diff.data(), diff.data(), d));
            double const scale = norm > tau ? tau / norm : 1.0;
            k.axpy(scale, diff.data(), acc.data(), d);
        }
        k.axpy(inv_n, acc.data(), v.data(), d);
    }
    return v;
}

DncResult dnc_select(UpdateSet const& u, std::size_t niters, std::size_t sub_dim, double c, std::size_t f,
                     num::RngStream& rng) {
    std::size_t const n = u.size();
    std::size_t const d = u.dim();
    if (n < 2)
        throw ConfigError("dnc: needs at least two updates");
    if (sub_dim < 1 || sub_dim > d)
        throw ConfigError("dnc: sub_dim must be in [1, d]");
    if (niters < 1 || !(c >= 0.0))
        throw ConfigError("dnc: need niters >= 1 and c >= 0");
    auto const removed = static_cast<std::size_t>(std::floor(c * static_cast<double>(f)));
    if (removed >= n)
        throw ConfigError("dnc: floor(c*f) must be below n");
    if (n < 2 * f + 3)
        spdlog::warn("dnc: n={} < 2f+3={}", n, 2 * f + 3);
    auto const& k = num::active_kernels();

    std::vector<bool> in_all(n, true);
    std::vector<std::size_t> last_good;
    for (std::size_t it = 0; it < niters; ++it) {
        num::RngStream it_rng = rng.derive("iter", it);
        auto const coords = num::sample_without_replacement(d, sub_dim, it_rng);
        Matrix sub(n, sub_dim);
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t j = 0; j < sub_dim; ++j)
                sub(r, j) = u.row(r)[coords[j]];
        ParamVector const mu = num::mean_of_rows(sub);
        for (std::size_t r = 0; r < n; ++r)
            k.axpy(-1.0, mu.data(), sub.row(r).data(), sub_dim);
        num::RngStream sv_rng = it_rng.derive("power");
        auto const sv = num::top_right_singular_vector(sub, kPowerIters, sv_rng);

        std::vector<double> score(n);
        for (std::size_t r = 0; r < n; ++r) {
            double const p = k.dot(sub.row(r).data(), sv.v.data(), sub_dim);
            score[r] = p * p;
        }
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return score[a] < score[b]; });
        order.resize(n - removed);
        std::sort(order.begin(), order.end());
        std::vector<bool> good(n, false);
        for (auto i : order)
            good[i] = true;
        for (std::size_t i = 0; i < n; ++i)
            in_all[i] = in_all[i] && good[i];
        last_good = std::move(order);
    }

    DncResult out;
    for (std::size_t i = 0; i < n; ++i)
        if (in_all[i])
            out.kept.push_back(i);
    if (out.kept.empty())
        out.kept = last_good;
    out.v = mean_of(u, out.kept);
    return out;
}

ParamVector agg_dnc(UpdateSet const& u, std::size_t niters, std::size_t sub_dim, double c, std::size_t f,
                    num::RngStream& rng) {
    return dnc_select(u, niters, sub_dim, c, f, rng).v;
}

std::vector<int> average_linkage_two_clusters(Matrix const& dist) {
    std::size_t const n = dist.rows();
    if (n < 2 || dist.cols() != n)
        throw ParameterError("average_linkage_two_clusters: need a square matrix with n >= 2");
    // Active clusters, each tagged with its lowest member; merges update the
    // linkage with the Lance-Williams rule for average linkage.
    Matrix link = dist;
    std::vector<std::size_t> size(n, 1);
    std::vector<bool> active(n, true);
    std::vector<std::size_t> owner(n);
    std::iota(owner.begin(), owner.end(), std::size_t{0});
    for (std::size_t clusters = n; clusters > 2; --clusters) {
        std::size_t bi = 0;
        std::size_t bj = 0;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (!active[i])
                continue;
            for (std::size_t j = i + 1; j < n; ++j)
                if (active[j] && link(i, j) < best) {
                    best = link(i, j);
                    bi = i;
                    bj = j;
                }
        }
        double const si = static_cast<double>(size[bi]);
        double const sj = static_cast<double>(size[bj]);
        for (std::size_t m = 0; m < n; ++m) {
            if (!active[m] || m == bi || m == bj)
                continue;
            double const v = (si * link(bi, m) + sj * link(bj, m)) / (si + sj);
            link(bi, m) = link(m, bi) = v;
        }
        size[bi] += size[bj];
        active[bj] = false;
        for (auto& o : owner)
            if (o == bj)
                o = bi;
    }
    std::vector<int> label(n);
    std::size_t const first = owner[0];
    for (std::size_t i = 0; i < n; ++i)
        label[i] = owner[i] == first ? 0 : 1;
    return label;
}

ClusterResult clipped_clustering_select(UpdateSet const& u, double tau) {
    std::size_t const n = u.size();
    std::size_t const d = u.dim();
    if (n < 2)
        throw ConfigError("clipped_clustering: needs at least two updates");
    auto const& k = num::active_kernels();
    auto const norms = row_norms(u);
    ClusterResult out;
    out.tau = tau > 0.0 ? tau : median_of(norms);

    Matrix clipped(n, d);
    std::vector<double> cnorm(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto dst = clipped.row(i);
        auto src = u.row(i);
        std::copy(src.begin(), src.end(), dst.begin());
        if (norms[i] > out.tau)
            k.scale(out.tau / norms[i], dst.data(), d);
        cnorm[i] = num::l2_norm(dst);
    }

    Matrix dist(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double cos = 0.0;
            if (cnorm[i] > 0.0 && cnorm[j] > 0.0)
                cos = k.dot(clipped.row(i).data(), clipped.row(j).data(), d) / (cnorm[i] * cnorm[j]);
            dist(i, j) = dist(j, i) = 1.0 - cos;
        }
    auto const label = average_linkage_two_clusters(dist);
    auto const size0 = static_cast<std::size_t>(std::count(label.begin(), label.end(), 0));
    int const winner = size0 >= n - size0 ? 0 : 1;
    for (std::size_t i = 0; i < n; ++i)
        if (label[i] == winner)
            out.selected.push_back(i);
    out.v = num::mean_of_rows(clipped, out.selected);
    return out;
}

ParamVector agg_clipped_clustering(UpdateSet const& u) {
    return clipped_clustering_select(u).v;
}

SignGuardResult signguard_select(UpdateSet const& u, double lower, double upper, double coord_frac,
                                 num::RngStream& rng) {
    require_rows(u, "signguard");
    if (!(lower > 0.0 && lower < upper) || !(coord_frac > 0.0 && coord_frac <= 1.0))
        throw ConfigError("signguard: need 0 < lower < upper and 0 < coord_frac <= 1");
    std::size_t const n = u.size();
    std::size_t const d = u.dim();
    auto const norms = row_norms(u);
    double const mnorm = median_of(norms);

    SignGuardResult out;
    for (std::size_t i = 0; i < n; ++i)
        if (norms[i] >= lower * mnorm && norms[i] <= upper * mnorm)
            out.norm_kept.push_back(i);

    auto const m = std::min(d, static_cast<std::size_t>(std::ceil(coord_frac * static_cast<double>(d))));
    auto const coords = num::sample_without_replacement(d, std::max<std::size_t>(m, 1), rng);
    double const inv_m = 1.0 / static_cast<double>(coords.size());
    std::vector<std::array<double, 3>> feat(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t pos = 0;
        std::size_t zero = 0;
        std::size_t neg = 0;
        for (auto c : coords) {
            double const x = u.row(i)[c];
            if (x > 0.0)
                ++pos;
            else if (x < 0.0)
                ++neg;
            else
                ++zero;
        }
        feat[i] = {static_cast<double>(pos) * inv_m, static_cast<double>(zero) * inv_m,
                   static_cast<double>(neg) * inv_m};
    }
    auto fdist = [](std::array<double, 3> const& a, std::array<double, 3> const& b) {
        double s = 0.0;
        for (int t = 0; t < 3; ++t)
            s += (a[t] - b[t]) * (a[t] - b[t]);
        return s;
    };

    // 2-means seeded with the farthest pair.
    std::size_t sa = 0;
    std::size_t sb = 0;
    double far = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (fdist(feat[i], feat[j]) > far) {
                far = fdist(feat[i], feat[j]);
                sa = i;
                sb = j;
            }
    std::vector<int> label(n, 0);
    if (far > 0.0) {
        std::array<std::array<double, 3>, 2> centre{feat[sa], feat[sb]};
        for (int it = 0; it < 100; ++it) {
            bool changed = false;
            for (std::size_t i = 0; i < n; ++i) {
                int const l = fdist(feat[i], centre[1]) < fdist(feat[i], centre[0]) ? 1 : 0;
                changed = changed || l != label[i] || it == 0;
                label[i] = l;
            }
            if (!changed)
                break;
            for (int c = 0; c < 2; ++c) {
                std::array<double, 3> acc{0.0, 0.0, 0.0};
                std::size_t cnt = 0;
                for (std::size_t i = 0; i < n; ++i)
                    if (label[i] == c) {
                        for (int t = 0; t < 3; ++t)
                            acc[t] += feat[i][t];
                        ++cnt;
                    }
                if (cnt > 0)
                    for (int t = 0; t < 3; ++t)
                        centre[c][t] = acc[t] / static_cast<double>(cnt);
            }
        }
    }
    auto const size0 = static_cast<std::size_t>(std::count(label.begin(), label.end(), 0));
    int winner = size0 > n - size0 ? 0 : (size0 < n - size0 ? 1 : label[0]);
    for (std::size_t i = 0; i < n; ++i)
        if (label[i] == winner)
            out.sign_kept.push_back(i);

    std::set_intersection(out.norm_kept.begin(), out.norm_kept.end(), out.sign_kept.begin(), out.sign_kept.end(),
                          std::back_inserter(out.kept));
    if (out.kept.empty()) {
        out.fell_back = true;
        out.v = agg_median(u);
        return out;
    }
    auto const& k = num::active_kernels();
    out.v = ParamVector(d);
    ParamVector row(d);
    for (auto i : out.kept) {
        std::copy(u.row(i).begin(), u.row(i).end(), row.begin());
        if (norms[i] > mnorm)
            k.scale(mnorm / norms[i], row.data(), d);
        k.add(row.data(), out.v.data(), d);
    }
    k.scale(1.0 / static_cast<double>(out.kept.size()), out.v.data(), d);
    return out;
}

ParamVector agg_signguard(UpdateSet const& u, double lower, double upper, double coord_frac, num::RngStream& rng) {
    return signguard_select(u, lower, upper, coord_frac, rng).v;
}

UpdateSet make_buckets(UpdateSet const& u, std::size_t s, num::RngStream& rng) {
    require_rows(u, "bucketing");
    if (s < 1)
        throw ConfigError("bucketing: s must be at least 1");
    std::size_t const n = u.size();
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    num::shuffle(std::span<std::size_t>(perm), rng);
    std::size_t const nb = (n + s - 1) / s;
    Matrix means(nb, u.dim());
    std::vector<bool> byz(nb, false);
    std::vector<std::size_t> ids(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        std::size_t const lo = b * s;
        std::size_t const hi = std::min(n, lo + s);
        std::span<std::size_t const> members(perm.data() + lo, hi - lo);
        auto const m = num::mean_of_rows(u.matrix(), members);
        std::copy(m.begin(), m.end(), means.row(b).begin());
        for (auto i : members)
            byz[b] = byz[b] || u.is_byzantine(i);
        ids[b] = b;
    }
    return UpdateSet(std::move(means), std::move(byz), std::move(ids));
}

ParamVector bucketing_wrap(UpdateSet const& u, std::size_t s, AggregatorConfig const& base, num::RngStream& rng,
                           AggregateContext const& ctx) {
    num::RngStream bucket_rng = rng.derive("bucketing");
    auto const buckets = make_buckets(u, s, bucket_rng);
    AggregatorConfig inner = base;
    inner.bucketing.reset();
    return aggregate(buckets, inner, rng, ctx);
}

void validate(AggregatorConfig const& cfg) {
    if (cfg.kind == AggKind::geomed && !(cfg.geomed_eps > 0.0))
        throw ConfigError("geomed: eps must be positive");
    if (cfg.kind == AggKind::cc && (!(cfg.cc_tau > 0.0) || cfg.cc_iters == 0))
        throw ConfigError("cc: need tau > 0 and iters >= 1");
    if (cfg.kind == AggKind::dnc && (cfg.dnc_niters == 0 || !(cfg.dnc_c >= 0.0) ||
                                     (cfg.dnc_sub_dim && *cfg.dnc_sub_dim == 0)))
        throw ConfigError("dnc: need niters >= 1, sub_dim >= 1 and c >= 0");
    if (cfg.kind == AggKind::signguard &&
        (!(cfg.sg_lower > 0.0 && cfg.sg_lower < cfg.sg_upper) || !(cfg.sg_coord_frac > 0.0 && cfg.sg_coord_frac <= 1.0)))
        throw ConfigError("signguard: need 0 < lower < upper and 0 < coord_frac <= 1");
    if (cfg.bucketing && *cfg.bucketing == 0)
        throw ConfigError("bucketing: s must be at least 1");
}

ParamVector aggregate(UpdateSet const& u, AggregatorConfig const& cfg, num::RngStream& rng,
                      AggregateContext const& ctx) {
    if (cfg.bucketing)
        return bucketing_wrap(u, *cfg.bucketing, cfg, rng, ctx);
    std::size_t const f = cfg.f.value_or(ctx.default_f);
    switch (cfg.kind) {
    case AggKind::mean: return agg_mean(u);
    case AggKind::median: return agg_median(u);
    case AggKind::trimmed_mean: return agg_trimmed_mean(u, cfg.trim_b);
    case AggKind::geomed: return agg_geomed(u, cfg.geomed_max_iters, cfg.geomed_eps);
    case AggKind::krum: return agg_krum(u, f);
    case AggKind::cc: return agg_cc(u, cfg.cc_tau, cfg.cc_iters, ctx.v0);
    case AggKind::dnc: {
        num::RngStream r = rng.derive("dnc");
        std::size_t const sub = cfg.dnc_sub_dim.value_or(std::min<std::size_t>(u.dim(), 1000));
        return agg_dnc(u, cfg.dnc_niters, std::min(sub, u.dim()), cfg.dnc_c, f, r);
    }
    case AggKind::clipped_clustering: {
        if (!cfg.cluster_historical_norm || ctx.norm_history == nullptr)
            return agg_clipped_clustering(u);
        auto const norms = row_norms(u);
        ctx.norm_history->insert(ctx.norm_history->end(), norms.begin(), norms.end());
        return clipped_clustering_select(u, median_of(*ctx.norm_history)).v;
    }
    case AggKind::signguard: {
        num::RngStream r = rng.derive("signguard");
        return agg_signguard(u, cfg.sg_lower, cfg.sg_upper, cfg.sg_coord_frac, r);
    }
    }
    throw ConfigError("aggregate: unhandled kind");
}

}  // namespace byzfl::agg

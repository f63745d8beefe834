// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace oracle {

Rows to_rows(byzfl::num::Matrix const& m) {
    Rows out(m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r)
        out[r].assign(m.row(r).begin(), m.row(r).end());
    return out;
}

std::vector<double> fd_gradient(byzfl::models::ModelSpec const& spec, std::vector<double> const& w,
                                byzfl::models::Batch const& batch, double h) {
    std::vector<double> g(w.size());
    std::vector<double> x = w;
    for (std::size_t i = 0; i < w.size(); ++i) {
        x[i] = w[i] + h;
        double const up = byzfl::models::loss(spec, x, batch);
        x[i] = w[i] - h;
        double const down = byzfl::models::loss(spec, x, batch);
        x[i] = w[i];
        g[i] = (up - down) / (2.0 * h);
    }
    return g;
}

std::vector<double> sort_median(Rows const& rows) {
    std::size_t const n = rows.size();
    std::vector<double> out(rows[0].size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        std::vector<double> col;
        for (auto const& r : rows)
            col.push_back(r[c]);
        std::sort(col.begin(), col.end());
        out[c] = n % 2 ? col[n / 2] : (col[n / 2 - 1] + col[n / 2]) / 2.0;
    }
    return out;
}

std::vector<double> sort_trimmed_mean(Rows const& rows, std::size_t b) {
    std::vector<double> out(rows[0].size());
    for (std::size_t c = 0; c < out.size(); ++c) {
        std::vector<double> col;
        for (auto const& r : rows)
            col.push_back(r[c]);
        std::sort(col.begin(), col.end());
        std::vector<double> kept(col.begin() + static_cast<long>(b), col.end() - static_cast<long>(b));
        double s = 0.0;
        for (double v : kept)
            s += v;
        out[c] = s / static_cast<double>(kept.size());
    }
    return out;
}

KrumOracle brute_krum(Rows const& rows, std::size_t f) {
    std::size_t const n = rows.size();
    std::size_t const k = n - f - 2;
    KrumOracle out;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> d;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i)
                continue;
            double s = 0.0;
            for (std::size_t c = 0; c < rows[i].size(); ++c)
                s += (rows[i][c] - rows[j][c]) * (rows[i][c] - rows[j][c]);
            d.push_back(s);
        }
        std::sort(d.begin(), d.end());
        out.scores.push_back(std::accumulate(d.begin(), d.begin() + static_cast<long>(k), 0.0));
    }
    for (std::size_t i = 1; i < n; ++i)
        if (out.scores[i] < out.scores[out.selected])
            out.selected = i;
    return out;
}

double geomed_objective(Rows const& rows, std::vector<double> const& v) {
    double s = 0.0;
    for (auto const& r : rows) {
        double d = 0.0;
        for (std::size_t c = 0; c < v.size(); ++c)
            d += (v[c] - r[c]) * (v[c] - r[c]);
        s += std::sqrt(d);
    }
    return s;
}

double grid_geomed_min(Rows const& rows) {
    std::size_t const d = rows[0].size();
    std::vector<double> lo(d, std::numeric_limits<double>::infinity());
    std::vector<double> hi(d, -std::numeric_limits<double>::infinity());
    for (auto const& r : rows)
        for (std::size_t c = 0; c < d; ++c) {
            lo[c] = std::min(lo[c], r[c]);
            hi[c] = std::max(hi[c], r[c]);
        }
    std::vector<double> centre(d);
    std::vector<double> half(d);
    for (std::size_t c = 0; c < d; ++c) {
        centre[c] = 0.5 * (lo[c] + hi[c]);
        half[c] = 0.5 * (hi[c] - lo[c]) + 1e-12;
    }
    constexpr int kSteps = 10;  // grid points per side: 2 * kSteps + 1
    double best = geomed_objective(rows, centre);
    for (int level = 0; level < 80; ++level) {
        std::vector<double> best_point = centre;
        std::vector<int> idx(d, -kSteps);
        std::vector<double> p(d);
        while (true) {
            for (std::size_t c = 0; c < d; ++c)
                p[c] = centre[c] + half[c] * idx[c] / kSteps;
            double const obj = geomed_objective(rows, p);
            if (obj < best) {
                best = obj;
                best_point = p;
            }
            std::size_t c = 0;
            while (c < d && idx[c] == kSteps)
                idx[c++] = -kSteps;
            if (c == d)
                break;
            ++idx[c];
        }
        centre = best_point;
        for (auto& h : half)
            h *= 0.5;
    }
    return best;
}

std::vector<double> jacobi_top_eigenvector(Rows a) {
    std::size_t const n = a.size();
    Rows v(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        v[i][i] = 1.0;
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q)
                off += a[p][q] * a[p][q];
        if (off < 1e-30)
            break;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300)
                    continue;
                double const theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                double const t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double const c = 1.0 / std::sqrt(t * t + 1.0);
                double const s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    double const akp = a[k][p];
                    double const akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double const apk = a[p][k];
                    double const aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    double const vkp = v[k][p];
                    double const vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
    }
    std::size_t top = 0;
    for (std::size_t i = 1; i < n; ++i)
        if (a[i][i] > a[top][top])
            top = i;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k)
        out[k] = v[k][top];
    return out;
}

std::vector<int> brute_average_linkage(Rows const& dist) {
    std::size_t const n = dist.size();
    std::vector<std::vector<std::size_t>> clusters;
    for (std::size_t i = 0; i < n; ++i)
        clusters.push_back({i});
    while (clusters.size() > 2) {
        std::size_t ba = 0;
        std::size_t bb = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < clusters.size(); ++a)
            for (std::size_t b = a + 1; b < clusters.size(); ++b) {
                double s = 0.0;
                for (auto i : clusters[a])
                    for (auto j : clusters[b])
                        s += dist[i][j];
                s /= static_cast<double>(clusters[a].size() * clusters[b].size());
                if (s < best) {
                    best = s;
                    ba = a;
                    bb = b;
                }
            }
        clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
        clusters.erase(clusters.begin() + static_cast<long>(bb));
    }
    std::vector<int> label(n, 1);
    auto const& first = std::find(clusters[0].begin(), clusters[0].end(), 0) != clusters[0].end() ? clusters[0]
                                                                                                    : clusters[1];
    for (auto i : first)
        label[i] = 0;
    return label;
}

double normal_quantile_bisect(double p) {
    double lo = -40.0;
    double hi = 40.0;
    for (int i = 0; i < 200; ++i) {
        double const mid = 0.5 * (lo + hi);
        double const cdf = 0.5 * std::erfc(-mid / std::sqrt(2.0));
        (cdf < p ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Stats column_stats(Rows const& rows) {
    std::size_t const n = rows.size();
    std::size_t const d = rows[0].size();
    Stats s{std::vector<double>(d), std::vector<double>(d)};
    for (std::size_t c = 0; c < d; ++c) {
        long double m = 0.0L;
        for (auto const& r : rows)
            m += r[c];
        m /= static_cast<long double>(n);
        long double v = 0.0L;
        for (auto const& r : rows)
            v += (r[c] - m) * (r[c] - m);
        s.mean[c] = static_cast<double>(m);
        s.std[c] = static_cast<double>(std::sqrt(v / static_cast<long double>(n - 1)));
    }
    return s;
}

long double dp_sigma(long double g_max, long double delta, long double epsilon, long double b) {
    return 2.0L * g_max * std::sqrt(2.0L * std::log(1.25L / delta)) / (b * epsilon);
}

}  // namespace oracle

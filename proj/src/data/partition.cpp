// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/data/partition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "byzfl/error.hpp"

namespace byzfl::data {
namespace {

void check_client_count(Dataset const& data, std::size_t k) {
    if (k == 0)
        throw ParameterError("partition: need at least one client");
    if (k > data.size())
        throw ParameterError("partition: " + std::to_string(k) + " clients but only " + std::to_string(data.size()) +
                             " samples");
}

// Integer counts summing to `total`, proportional to `weights`.
std::vector<std::size_t> largest_remainder(std::vector<double> const& weights, std::size_t total) {
    std::size_t const k = weights.size();
    std::vector<std::size_t> counts(k);
    std::vector<double> frac(k);
    std::size_t assigned = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double const exact = weights[i] * static_cast<double>(total);
        double const whole = std::floor(exact);
        counts[i] = static_cast<std::size_t>(whole);
        frac[i] = exact - whole;
        assigned += counts[i];
    }
    // Floating error can overshoot by a sample; trim from the largest count.
    while (assigned > total) {
        auto it = std::max_element(counts.begin(), counts.end());
        --*it;
        --assigned;
    }
    std::vector<std::size_t> order(k);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return frac[a] > frac[b]; });
    for (std::size_t r = 0; assigned < total; ++r, ++assigned)
        ++counts[order[r % k]];
    return counts;
}

}  // namespace

Partition partition_iid(Dataset const& data, std::size_t num_clients, num::RngStream& rng) {
    check_client_count(data, num_clients);
    std::size_t const n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    num::shuffle(std::span<std::size_t>(order), rng);

    Partition p;
    p.scheme = PartitionScheme::iid;
    p.assignments.resize(num_clients);
    std::size_t const base = n / num_clients;
    std::size_t const extra = n % num_clients;
    std::size_t cursor = 0;
    for (std::size_t k = 0; k < num_clients; ++k) {
        std::size_t const len = base + (k < extra ? 1 : 0);
        auto& list = p.assignments[k];
        list.assign(order.begin() + static_cast<std::ptrdiff_t>(cursor),
                    order.begin() + static_cast<std::ptrdiff_t>(cursor + len));
        std::sort(list.begin(), list.end());
        cursor += len;
    }
    return p;
}

std::vector<double> sample_dirichlet(std::size_t k, double alpha, num::RngStream& rng) {
    if (!(alpha > 0.0))
        throw ParameterError("dirichlet: alpha must be positive");
    std::vector<double> p(k);
    double total = 0.0;
    for (double& v : p) {
        v = rng.gamma(alpha);
        total += v;
    }
    if (total > 0.0) {
        for (double& v : p)
            v /= total;
    } else {
        // Every Gamma draw underflowed (tiny alpha): fall back to uniform.
        std::fill(p.begin(), p.end(), 1.0 / static_cast<double>(k));
    }
    return p;
}

Partition partition_dirichlet(Dataset const& data, std::size_t num_clients, double alpha, num::RngStream& rng) {
    if (!(alpha > 0.0))
        throw ParameterError("partition_dirichlet: alpha must be positive");
    check_client_count(data, num_clients);

    std::vector<std::vector<std::size_t>> by_class(data.num_classes);
    for (std::size_t i = 0; i < data.size(); ++i)
        by_class[static_cast<std::size_t>(data.labels[i])].push_back(i);

    Partition p;
    p.scheme = PartitionScheme::dirichlet;
    p.alpha = alpha;
    p.assignments.resize(num_clients);
    for (std::size_t l = 0; l < by_class.size(); ++l) {
        auto& members = by_class[l];
        num::RngStream cls = rng.derive("class", l);
        num::shuffle(std::span<std::size_t>(members), cls);
        auto const props = sample_dirichlet(num_clients, alpha, cls);
        auto const counts = largest_remainder(props, members.size());
        std::size_t cursor = 0;
        for (std::size_t k = 0; k < num_clients; ++k)
            for (std::size_t c = 0; c < counts[k]; ++c)
                p.assignments[k].push_back(members[cursor++]);
    }

    for (std::size_t k = 0; k < num_clients; ++k) {
        if (!p.assignments[k].empty())
            continue;
        auto donor = std::max_element(p.assignments.begin(), p.assignments.end(),
                                      [](auto const& a, auto const& b) { return a.size() < b.size(); });
        p.assignments[k].push_back(donor->back());
        donor->pop_back();
        ++p.repairs;
    }
    for (auto& list : p.assignments)
        std::sort(list.begin(), list.end());
    return p;
}

}  // namespace byzfl::data

// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/attacks/callbacks.hpp"

#include <algorithm>

#include "byzfl/error.hpp"

namespace byzfl::attacks {

AdversaryView::AdversaryView(num::UpdateSet& updates, std::size_t round, num::RngStream rng)
    : updates_(updates), round_(round), rng_(std::move(rng)) {
    for (std::size_t i = 0; i < updates_.size(); ++i)
        (updates_.is_byzantine(i) ? malicious_ : benign_).push_back(i);
}

num::Matrix AdversaryView::benign_matrix() const {
    num::Matrix m(benign_.size(), dim());
    for (std::size_t j = 0; j < benign_.size(); ++j) {
        auto src = benign(j);
        std::copy(src.begin(), src.end(), m.row(j).begin());
    }
    return m;
}

void AdversaryView::fill_malicious(std::span<double const> value) {
    if (value.size() != dim())
        throw DimensionError("AdversaryView::fill_malicious: wrong length");
    for (std::size_t j = 0; j < malicious_.size(); ++j)
        std::copy(value.begin(), value.end(), malicious(j).begin());
}

}  // namespace byzfl::attacks

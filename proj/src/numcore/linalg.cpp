// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/numcore/linalg.hpp"

#include <cmath>

#include "byzfl/error.hpp"
#include "byzfl/numcore/kernels.hpp"

namespace byzfl::num {
namespace {

SingularVector degenerate_result(std::size_t d) {
    SingularVector out;
    out.v = ParamVector(d);
    out.v[0] = 1.0;
    out.degenerate = true;
    return out;
}

void canonicalize_sign(ParamVector& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (std::abs(v[i]) > std::abs(v[best]))
            best = i;
    if (v[best] < 0.0)
        for (double& x : v)
            x = -x;
}

}  // namespace

SingularVector top_right_singular_vector(Matrix const& m, std::size_t iters, RngStream& rng) {
    std::size_t const n = m.rows();
    std::size_t const d = m.cols();
    if (n == 0 || d == 0 || iters == 0)
        throw ParameterError("top_right_singular_vector: needs n, d, iters >= 1");
    auto const& k = active_kernels();

    double frob = 0.0;
    for (std::size_t r = 0; r < n; ++r)
        frob += k.dot(m.row(r).data(), m.row(r).data(), d);
    if (frob == 0.0)
        return degenerate_result(d);

    SingularVector out;
    out.v = gaussian(rng, 0.0, 1.0, d);
    std::vector<double> mv(n);
    ParamVector next(d);
    for (std::size_t it = 0; it < iters; ++it) {
        double const vnorm = std::sqrt(k.dot(out.v.data(), out.v.data(), d));
        if (vnorm == 0.0)
            return degenerate_result(d);
        k.scale(1.0 / vnorm, out.v.data(), d);

        for (std::size_t r = 0; r < n; ++r)
            mv[r] = k.dot(m.row(r).data(), out.v.data(), d);
        // next = m^T (m v)
        std::fill(next.begin(), next.end(), 0.0);
        for (std::size_t r = 0; r < n; ++r)
            k.axpy(mv[r], m.row(r).data(), next.data(), d);
        out.rayleigh.push_back(k.dot(mv.data(), mv.data(), n));
        std::swap(out.v, next);
    }
    double const vnorm = std::sqrt(k.dot(out.v.data(), out.v.data(), d));
    if (vnorm == 0.0)
        return degenerate_result(d);
    k.scale(1.0 / vnorm, out.v.data(), d);
    canonicalize_sign(out.v);
    return out;
}

}  // namespace byzfl::num

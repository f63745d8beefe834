// Copyright 2026 The byzfl Authors
// SPDX-License-Identifier: Apache-2.0

#include "byzfl/data/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>
#include <string_view>

#include "byzfl/error.hpp"

namespace byzfl::data {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        std::size_t const comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

double parse_real(std::string_view field, std::size_t line_no) {
    double v = 0.0;
    auto const* first = field.data();
    auto const* last = field.data() + field.size();
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || field.empty())
        throw ParseError("non-numeric feature '" + std::string(field) + "'", line_no);
    return v;
}

std::int64_t parse_label(std::string_view field, std::size_t line_no) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size() || field.empty())
        throw ParseError("label '" + std::string(field) + "' is not an integer", line_no);
    return v;
}

void append_real(std::string& out, double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, ptr);
}

}  // namespace

Dataset synth_gaussian_mixture(std::size_t num_classes, std::size_t input_dim, std::size_t per_class, double sep,
                               num::RngStream& rng) {
    if (num_classes < 2)
        throw ParameterError("synth_gaussian_mixture: need at least 2 classes");
    if (per_class == 0)
        throw ParameterError("synth_gaussian_mixture: per_class must be positive");
    if (!(sep > 0.0))
        throw ParameterError("synth_gaussian_mixture: sep must be positive");
    if (input_dim == 0)
        throw ParameterError("synth_gaussian_mixture: input_dim must be positive");

    Dataset out;
    out.num_classes = num_classes;
    out.name = "gaussian_mixture";
    out.features = num::Matrix(num_classes * per_class, input_dim);
    out.labels.resize(num_classes * per_class);
    double const unit = sep / std::sqrt(2.0);
    std::size_t row = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        std::size_t const axis = c % input_dim;
        std::size_t const cycle = c / input_dim;
        double const sign = cycle % 2 == 0 ? 1.0 : -1.0;
        double const magnitude = static_cast<double>(cycle / 2 + 1);
        for (std::size_t s = 0; s < per_class; ++s, ++row) {
            auto x = out.features.row(row);
            for (double& v : x)
                v = rng.normal();
            x[axis] += sign * magnitude * unit;
            out.labels[row] = static_cast<std::int32_t>(c);
        }
    }
    return out;
}

Dataset parse_csv(std::string const& text, std::string name) {
    std::vector<std::vector<double>> rows;
    std::vector<std::int64_t> raw_labels;
    std::size_t width = 0;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos)
            end = text.size();
        std::string_view line(text.data() + pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (line.empty())
            throw ParseError("empty row", line_no);
        auto const fields = split_fields(line);
        if (fields.size() < 2)
            throw ParseError("row needs at least one feature and a label", line_no);
        if (width == 0)
            width = fields.size();
        else if (fields.size() != width)
            throw ParseError("expected " + std::to_string(width) + " fields, found " + std::to_string(fields.size()),
                             line_no);
        std::vector<double> feats(width - 1);
        for (std::size_t j = 0; j + 1 < width; ++j)
            feats[j] = parse_real(fields[j], line_no);
        raw_labels.push_back(parse_label(fields.back(), line_no));
        rows.push_back(std::move(feats));
    }
    if (rows.empty())
        throw ParseError("file has no rows", 1);

    Dataset out;
    out.name = std::move(name);
    out.features = num::Matrix::from_rows(rows);
    std::map<std::int64_t, std::int32_t> remap;
    out.labels.reserve(raw_labels.size());
    for (auto raw : raw_labels) {
        auto [it, inserted] = remap.try_emplace(raw, static_cast<std::int32_t>(remap.size()));
        out.labels.push_back(it->second);
    }
    out.num_classes = remap.size();
    return out;
}

Dataset load_csv(std::filesystem::path const& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ParseError("cannot open " + path.string(), 0);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_csv(buf.str(), path.stem().string());
}

std::string format_csv(Dataset const& data) {
    std::string out;
    for (std::size_t r = 0; r < data.size(); ++r) {
        for (double v : data.features.row(r)) {
            append_real(out, v);
            out += ',';
        }
        out += std::to_string(data.labels[r]);
        out += '\n';
    }
    return out;
}

void save_csv(Dataset const& data, std::filesystem::path const& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw ParameterError("cannot write " + path.string());
    out << format_csv(data);
}

models::Batch gather(Dataset const& data, std::span<std::size_t const> indices) {
    models::Batch b;
    b.features = num::Matrix(indices.size(), data.input_dim());
    b.labels.resize(indices.size());
    for (std::size_t k = 0; k < indices.size(); ++k) {
        auto src = data.features.row(indices[k]);
        std::copy(src.begin(), src.end(), b.features.row(k).begin());
        b.labels[k] = data.labels[indices[k]];
    }
    return b;
}

models::Batch as_batch(Dataset const& data) {
    return {data.features, data.labels};
}

Split split_holdout(Dataset const& data, double test_fraction, num::RngStream& rng) {
    if (!(test_fraction >= 0.0 && test_fraction < 1.0))
        throw ParameterError("split_holdout: test_fraction must lie in [0, 1)");
    std::size_t const n = data.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    num::shuffle(std::span<std::size_t>(order), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(n)));
    if (test_fraction > 0.0 && n >= 2)
        n_test = std::clamp<std::size_t>(n_test, 1, n - 1);

    auto take = [&](std::size_t from, std::size_t to) {
        Dataset d;
        d.name = data.name;
        d.num_classes = data.num_classes;
        std::span<std::size_t const> idx(order.data() + from, to - from);
        auto b = gather(data, idx);
        d.features = std::move(b.features);
        d.labels = std::move(b.labels);
        return d;
    };
    return {take(n_test, n), take(0, n_test)};
}

}  // namespace byzfl::data

#pragma once

#include <charconv>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "adens/core.hpp"

namespace adens {

namespace detail {

inline std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

inline double parse_cell(const std::string& cell, std::size_t line_no) {
    double v;
    auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size())
        throw MalformedCsv("line " + std::to_string(line_no) + ": cannot parse '" + cell + "'");
    return v;
}

/// Shortest text that round-trips the double exactly.
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace detail

/// Reads a comma-separated process log. First row is the header. A column named
/// `label_column` (default "label", values {0,1}) becomes per-sample labels; a
/// column named "scenario" (values 0 = none, 1-7) becomes scenario tags. All
/// remaining cells must parse as real numbers.
inline LabeledSet load_csv(const std::string& path, const std::string& label_column = "label") {
    std::ifstream in(path);
    if (!in) throw EmptyFile("cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw EmptyFile(path + " is empty");

    auto header = detail::split_line(line);
    std::ptrdiff_t label_idx = -1, scenario_idx = -1;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == label_column)
            label_idx = static_cast<std::ptrdiff_t>(i);
        else if (header[i] == "scenario")
            scenario_idx = static_cast<std::ptrdiff_t>(i);
        else
            names.push_back(header[i]);
    }
    if (names.empty()) throw MalformedCsv(path + ": no feature columns");

    LabeledSet set;
    set.features.feature_names = names;
    set.features.n_features = names.size();
    bool any_tags = false;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = detail::split_line(line);
        if (cells.size() != header.size())
            throw MalformedCsv("line " + std::to_string(line_no) + ": expected " +
                               std::to_string(header.size()) + " cells, got " +
                               std::to_string(cells.size()));
        Label label = Label::normal;
        std::optional<int> tag;
        for (std::size_t i = 0; i < cells.size(); ++i) {
            double v = detail::parse_cell(cells[i], line_no);
            if (static_cast<std::ptrdiff_t>(i) == label_idx) {
                if (v != 0.0 && v != 1.0)
                    throw MalformedCsv("line " + std::to_string(line_no) + ": label must be 0 or 1");
                label = v == 1.0 ? Label::anomaly : Label::normal;
            } else if (static_cast<std::ptrdiff_t>(i) == scenario_idx) {
                int s = static_cast<int>(v);
                if (s != v || s < 0 || s > 7)
                    throw MalformedCsv("line " + std::to_string(line_no) + ": scenario must be 0-7");
                if (s > 0) {
                    tag = s;
                    any_tags = true;
                }
            } else {
                set.features.values.push_back(v);
            }
        }
        set.labels.push_back(label);
        set.scenario_tags.push_back(tag);
        ++set.features.n_samples;
    }
    if (set.features.n_samples == 0) throw EmptyFile(path + " has a header but no rows");
    if (!any_tags) set.scenario_tags.clear();
    set.validate();
    return set;
}

/// Writes the set back out; inverse of load_csv up to float-text round-trip.
/// The label column is written only when `with_labels`, the scenario column
/// only when tags are present.
inline void write_csv(const LabeledSet& set, const std::string& path, bool with_labels = true) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    const auto& fm = set.features;
    for (std::size_t j = 0; j < fm.n_features; ++j) {
        if (j) out << ',';
        out << fm.feature_names[j];
    }
    bool with_tags = !set.scenario_tags.empty();
    if (with_labels) out << ",label";
    if (with_tags) out << ",scenario";
    out << '\n';
    for (std::size_t i = 0; i < fm.n_samples; ++i) {
        for (std::size_t j = 0; j < fm.n_features; ++j) {
            if (j) out << ',';
            out << detail::format_double(fm.at(i, j));
        }
        if (with_labels) out << ',' << (set.labels[i] == Label::anomaly ? '1' : '0');
        if (with_tags) out << ',' << set.scenario_tags[i].value_or(0);
        out << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace adens

// SPDX-License-Identifier: Apache-2.0
#pragma once

// Line and word splitting shared by the text formats.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mlproc::detail {

struct Word {
    std::string_view text;
    std::size_t column; // 1-based
};

/// Calls fn(line_number, line) for every line; a trailing '\r' is dropped.
template <typename Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t line_no = 1;
    while (!text.empty()) {
        const auto end = text.find('\n');
        auto line = text.substr(0, end);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        fn(line_no++, line);
        if (end == std::string_view::npos) {
            break;
        }
        text.remove_prefix(end + 1);
    }
}

inline std::string_view strip_comment(std::string_view line) {
    return line.substr(0, line.find('#'));
}

inline std::vector<Word> split_words(std::string_view line) {
    std::vector<Word> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) {
            ++i;
        }
        const auto start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t') {
            ++i;
        }
        if (i > start) {
            out.push_back({line.substr(start, i - start), start + 1});
        }
    }
    return out;
}

template <typename Range>
std::string join(const Range& items, std::string_view separator) {
    std::string out;
    bool first = true;
    for (const auto& item : items) {
        if (!first) {
            out += separator;
        }
        out += item;
        first = false;
    }
    return out;
}

} // namespace mlproc::detail

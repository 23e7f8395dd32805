// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace mlproc {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// 1-based location of a diagnostic inside a text input.
struct SourceSpan {
    std::size_t line = 1;
    std::size_t column_begin = 1;
    std::size_t column_end = 1;

    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

class ParseError : public Error {
public:
    ParseError(SourceSpan span, const std::string& message)
        : Error(std::to_string(span.line) + ":" + std::to_string(span.column_begin) + ": " + message),
          _span(span), _message(message) {}

    [[nodiscard]] const SourceSpan& span() const { return _span; }
    [[nodiscard]] const std::string& bare_message() const { return _message; }

private:
    SourceSpan _span;
    std::string _message;
};

} // namespace mlproc

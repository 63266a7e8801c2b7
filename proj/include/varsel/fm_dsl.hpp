#pragma once

#include <string>

#include "varsel/fm.hpp"

namespace varsel::fm_dsl {

struct SourceSpan {
    int line = 1;    // 1-based
    int column = 1;  // 1-based
};

// Thrown on the first failure; `code` is one of SYNTAX, DUPLICATE_ID,
// UNKNOWN_REF, BAD_GROUP.
class ParseError : public Error {
public:
    ParseError(std::string code, SourceSpan span, const std::string& message)
        : Error(std::move(code), "line " + std::to_string(span.line) + ":" +
                                     std::to_string(span.column) + ": " + message),
          span_(span) {}

    SourceSpan span() const { return span_; }

private:
    SourceSpan span_;
};

// Indentation-based grammar (2-space indents):
//   feature <id> [mandatory|optional]
//   or { ... }   alt { ... }        group blocks under a parent feature
//   constraint <expr>               with !, &, |, =>, parentheses
//   # comment
fm::FeatureModel parse(const std::string& text);

fm::FeatureModel parse_file(const std::string& path);

// Canonical text form; parse(serialize(m)) is structurally equal to m.
std::string serialize(const fm::FeatureModel& model);

// Order-insensitive comparison of features and groups, plus constraint
// formulas by canonical text.
bool structurally_equal(const fm::FeatureModel& a, const fm::FeatureModel& b);

}  // namespace varsel::fm_dsl

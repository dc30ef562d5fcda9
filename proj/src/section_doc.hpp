#pragma once

// Shared lexer and brace-section reader for the textual model and rule
// formats. Both formats are trees of `Name { ... }` sections holding
// `key value` pairs; the consumers decide which section names are legal.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bdg/errors.hpp"

namespace bdg::detail {

struct KeyValue {
    std::string key;
    std::string value;
    bool quoted = false;
    SourceSpan span;
};

struct SectionNode;

/// Either a key/value pair or a nested section, in document order.
struct SectionItem {
    std::optional<KeyValue> pair;
    std::vector<SectionNode> section;

    bool is_pair() const { return pair.has_value(); }
};

struct SectionNode {
    std::string name;
    SourceSpan span;
    std::vector<SectionItem> items;
};

/// Parses the whole text into an unnamed root section. Throws ParseError
/// on lexical problems, non-identifier keys, or unbalanced braces.
SectionNode parse_document(std::string_view text);

/// True if `s` can be written without quotes: non-empty and free of
/// whitespace, braces, quotes, and comment starts.
bool is_bare_token(std::string_view s);

/// Wraps `s` in quotes, escaping backslashes and embedded quotes.
std::string quoted(std::string_view s);

} // namespace bdg::detail

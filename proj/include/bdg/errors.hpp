#pragma once

#include <stdexcept>
#include <string>

namespace bdg {

/// 1-based position of a token in the source text.
struct SourceSpan {
    int line = 1;
    int column = 1;

    bool operator==(const SourceSpan&) const = default;
};

/// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& message) : std::runtime_error(message) {}
};

/// Malformed model text. Carries the position the parser choked on.
class ParseError : public Error {
public:
    ParseError(const std::string& message, SourceSpan where)
        : Error(message + " (line " + std::to_string(where.line) + ", column " +
                std::to_string(where.column) + ")"),
          span_(where) {}

    SourceSpan span() const { return span_; }

private:
    SourceSpan span_;
};

/// A model violates a structural invariant (validate() lists the violations).
class InvalidModelError : public Error {
public:
    using Error::Error;
};

/// A graph's adjacency structure disagrees with its edge list.
class InconsistentGraphError : public Error {
public:
    using Error::Error;
};

/// An operation that requires an acyclic level was handed a cyclic one.
class CycleError : public Error {
public:
    using Error::Error;
};

/// A subsystem's declared port counts disagree with its boundary blocks.
class PortMismatchError : public Error {
public:
    using Error::Error;
};

/// A substitution rewires an edge through a port the rule does not map.
class PortMappingError : public Error {
public:
    using Error::Error;
};

/// A block's weight annotation could not be parsed.
class WeightParseError : public Error {
public:
    using Error::Error;
};

/// The evaluator met a block type it has no semantics for.
class UnsupportedBlockError : public Error {
public:
    using Error::Error;
};

/// Evaluation order cannot be established: a cycle has no delay in it.
class UnresolvableCycleError : public Error {
public:
    using Error::Error;
};

/// A numeric block parameter failed to parse.
class BadParameterError : public Error {
public:
    using Error::Error;
};

/// A substitution rule is self-inconsistent.
class RuleError : public Error {
public:
    using Error::Error;
};

} // namespace bdg

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace clustag {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input file. Line numbers are 1-based.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& what)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

// A cluster that would make original-tag restoration ambiguous.
class ConstraintError : public Error {
public:
    using Error::Error;
};

// Restoration was asked about a word the lexicon has never seen.
class UnknownWordError : public Error {
public:
    using Error::Error;
};

// The tagger assigned a cluster containing none of the word's lexicon tags.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

}  // namespace clustag

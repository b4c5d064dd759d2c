#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace gridimage {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// A malformed argument or violated precondition.
class ValueError : public Error {
public:
    explicit ValueError(const std::string& what) : Error(what) {}
};

/// The covering criterion requires the first n-1 sizes to coincide.
class NonUniformSizesError : public ValueError {
public:
    explicit NonUniformSizesError(const std::string& what) : ValueError(what) {}
};

/// The instance is outside the scope of any theorem (e.g. rank-deficient maps).
class ScopeError : public Error {
public:
    explicit ScopeError(const std::string& what) : Error(what) {}
};

/// A configured resource cap (image cells, search families) would be exceeded.
class CapError : public Error {
public:
    explicit CapError(const std::string& what) : Error(what) {}
};

/// Text input could not be parsed; carries the byte offset of the failure.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t position)
        : Error("parse error at position " + std::to_string(position) + ": " + what),
          position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

} // namespace gridimage

#pragma once

#include <stdexcept>
#include <string>

namespace cvxseg {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid parameter combination or inputs inconsistent with the chosen model.
class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(what) {}
};

/// Malformed file contents (image headers, landmark lists, phi dumps, ...).
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// A mask without any background pixel has no interface to measure from.
class AllForegroundError : public Error {
public:
    explicit AllForegroundError(const std::string& what) : Error(what) {}
};

/// A mask without any object pixel has no interface to measure from.
class AllBackgroundError : public Error {
public:
    explicit AllBackgroundError(const std::string& what) : Error(what) {}
};

/// Convexity queries require a nonempty object.
class EmptyObjectError : public Error {
public:
    explicit EmptyObjectError(const std::string& what) : Error(what) {}
};

/// A model that needs landmarks or scribbles received none.
class EmptyLabelsError : public Error {
public:
    explicit EmptyLabelsError(const std::string& what) : Error(what) {}
};

/// One mixture component lost all soft mass during re-estimation.
class DegenerateClassError : public Error {
public:
    explicit DegenerateClassError(const std::string& what) : Error(what) {}
};

/// NaN or infinity appeared in an iterate; carries the iteration index.
class NonFiniteStateError : public Error {
public:
    NonFiniteStateError(const std::string& what, int iteration)
        : Error(what), iteration_(iteration) {}
    int iteration() const noexcept { return iteration_; }

private:
    int iteration_;
};

}  // namespace cvxseg

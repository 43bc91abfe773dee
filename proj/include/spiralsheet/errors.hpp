#pragma once

#include <stdexcept>
#include <string>

namespace spiralsheet {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The query point lies on a spiral sheet (or inside the evaluation exclusion zone).
class OnSpiralError : public Error {
public:
    explicit OnSpiralError(const std::string& what, int spiral_index = 0)
        : Error(what), spiral_index_(spiral_index) {}

    int spiral_index() const noexcept { return spiral_index_; }

private:
    int spiral_index_;
};

/// Fields are undefined at the spiral center.
class OriginError : public Error {
public:
    using Error::Error;
};

/// sin(4 pi a^2 / (1 + a^2)) vanishes, so the C_a closed forms degenerate.
class ResonantParameterError : public Error {
public:
    using Error::Error;
};

class SingularSystemError : public Error {
public:
    using Error::Error;
};

/// A strip-frame point sits on one of the cut lines l_m.
class OnCutLineError : public Error {
public:
    explicit OnCutLineError(const std::string& what, int line_index)
        : Error(what), line_index_(line_index) {}

    int line_index() const noexcept { return line_index_; }

private:
    int line_index_;
};

class ProbeTooCloseError : public Error {
public:
    using Error::Error;
};

class InvalidArgumentError : public Error {
public:
    using Error::Error;
};

}  // namespace spiralsheet

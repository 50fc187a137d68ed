#pragma once

#include <stdexcept>
#include <string>

namespace dimersim {

// Error categories map one-to-one onto CLI exit codes:
//   config_error -> 2, numeric_error -> 3, secular_error -> 4.
class error : public std::runtime_error {
public:
    explicit error(const std::string& msg) : std::runtime_error(msg) {}
};

// Invalid or inconsistent user input (bad config keys, violated invariants).
class config_error : public error {
public:
    explicit config_error(const std::string& msg) : error(msg) {}
};

// Numerical failure: non-convergent quadrature, eigensolver failure.
class numeric_error : public error {
public:
    explicit numeric_error(const std::string& msg) : error(msg) {}
};

// Degenerate transition frequencies invalidate the secular rate picture.
class secular_error : public error {
public:
    explicit secular_error(const std::string& msg) : error(msg) {}
};

} // namespace dimersim

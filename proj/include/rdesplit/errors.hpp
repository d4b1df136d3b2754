#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rdesplit {

// Precondition violations. The CLI maps these to exit code 2.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A state left the finite range. The CLI maps these to exit code 3.
class NumericFailure : public std::runtime_error {
public:
    NumericFailure(const std::string& what, std::size_t step)
        : std::runtime_error(what + " (step " + std::to_string(step) + ")"), step_(step) {}

    std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw InvalidArgument(msg);
}

}  // namespace rdesplit

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace htnc {

// A queue whose long-run input rate reaches or exceeds its service rate.
class InstabilityError : public std::runtime_error {
public:
    InstabilityError(const std::string& what, std::ptrdiff_t node = -1)
        : std::runtime_error(what), node_(node) {}

    // Zero-based node index, or -1 when the error is not tied to a node.
    std::ptrdiff_t node() const { return node_; }

private:
    std::ptrdiff_t node_;
};

// An input outside the regime where a bound is guaranteed to hold.
class PreconditionError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace htnc

#pragma once

#include <stdexcept>
#include <string>

namespace sqz {

// Parameter or state outside the physical/numerical domain of an operation.
struct domain_error : std::runtime_error {
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// File access or format problem.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace sqz

#pragma once

#include <stdexcept>
#include <string>

namespace treeprob {

// Raised when an exact computation would exceed a configured budget
// (permutation counts, tree counts, iteration caps). Maps to CLI exit code 2.
struct resource_cap_error : std::runtime_error {
    explicit resource_cap_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace treeprob

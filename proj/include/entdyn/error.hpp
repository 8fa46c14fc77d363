#pragma once

#include <stdexcept>
#include <string>

namespace entdyn {

// Bad user input or configuration. The CLI maps this to exit status 2.
class validation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Numerical failure at run time: divergence, lost positivity, a broken
// cross-check. The CLI maps this to exit status 1.
class simulation_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace entdyn

#pragma once

#include <stdexcept>
#include <string>

namespace gdmd {

/// Violated shape contract or precondition on a public operation.
class contract_error : public std::runtime_error {
public:
    explicit contract_error(const std::string& what) : std::runtime_error(what) {}
};

/// Non-finite values or diverging numerics detected mid-computation.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid experiment configuration; the CLI maps this to exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace gdmd

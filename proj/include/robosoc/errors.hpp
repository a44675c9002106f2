#pragma once

#include <stdexcept>
#include <string>

namespace robosoc {

/// Invalid scenario/controller configuration. The CLI maps this to exit code 1.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// A caller violated an operation's precondition. CLI exit code 2.
class contract_error : public std::logic_error {
public:
    explicit contract_error(const std::string& what) : std::logic_error(what) {}
};

/// Calibration data cannot be fitted (rank deficiency, excessive residual).
class calibration_error : public std::runtime_error {
public:
    explicit calibration_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace robosoc

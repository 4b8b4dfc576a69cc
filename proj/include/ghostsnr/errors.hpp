#pragma once

#include <stdexcept>
#include <string>

namespace ghostsnr {

// Bad or inconsistent input. `field` names the offending parameter, e.g. "detector.eta".
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

class UnsupportedRegime : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class UnsupportedState : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NonConvergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace ghostsnr

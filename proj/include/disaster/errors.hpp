#pragma once

#include <stdexcept>
#include <string>

namespace disaster {

// Raised when a ModelSpec or call argument breaks a documented invariant.
// `invariant()` names the violated condition, e.g. "0 < alpha < nu + 1".
class InvalidParameter : public std::invalid_argument {
public:
    InvalidParameter(std::string invariant, const std::string& detail)
        : std::invalid_argument(detail.empty() ? invariant : invariant + ": " + detail),
          invariant_(std::move(invariant)) {}
    const std::string& invariant() const noexcept { return invariant_; }

private:
    std::string invariant_;
};

class MissingCtLayer : public InvalidParameter {
public:
    MissingCtLayer() : InvalidParameter("ct layer present", "operation needs jump rates") {}
};

class NoInvariantMeasure : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class DivergentSeries : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class NotApplicable : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

class Unsupported : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

}  // namespace disaster

#pragma once

#include <stdexcept>
#include <string>

namespace stefanlab {

/// Requested derivative order exceeds what a jet or region can provide.
struct DepthError : std::runtime_error {
    explicit DepthError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A configured resource cap (term count, node count) was exceeded.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

/// A build step could not satisfy its invariants (root bracket, collar
/// shrink, blend positivity, ...). Carries the diagnostic the step printed.
struct ConstructionError : std::runtime_error {
    explicit ConstructionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Point lies outside the region where the requested evaluation is defined.
struct RegionError : std::runtime_error {
    explicit RegionError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Bad user-facing input (config keys, CLI values).
struct ValidationError : std::runtime_error {
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace stefanlab

#ifndef CANAL_ERRORS_HPP
#define CANAL_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace canal {

/// Invalid parameter sets, malformed config files, mismatched dimensions.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Violations of the per-tick message protocol (missing history, horizon exceeded).
class protocol_error : public std::runtime_error {
public:
    explicit protocol_error(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver failed to reach its tolerance.
class solver_error : public std::runtime_error {
public:
    explicit solver_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace canal

#endif

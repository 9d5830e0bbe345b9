#ifndef NFV_ERRORS_HPP
#define NFV_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace nfv {

/// Malformed or inconsistent topology input (files or generator parameters).
class TopologyError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Run configuration or catalog that fails schema or range validation.
class ConfigError : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A ledger charge larger than the available amount of some resource.
class InsufficientCapacity : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// A runtime invariant (conservation, replay check) was found broken.
class InvariantViolation : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

} // namespace nfv

#endif // NFV_ERRORS_HPP

#pragma once

#include <stdexcept>
#include <string>

namespace mdimlab {

// Error categories; every throwing path in the library uses one of these
// codes so callers can branch on the failure kind.
enum class errc {
    point_space_mismatch,
    invalid_mesh,
    depth_insufficient,
    not_a_product,
    cap_exceeded,
    iteration_cap,
    non_hyperbolic,
    invalid_schedule,
    insufficient_samples,
    invalid_config,
    budget_exceeded,
    no_periodic_point,
    unknown_construction,
    invalid_argument,
};

class error : public std::runtime_error {
public:
    error(errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    errc code() const noexcept { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw error(code, what); }

} // namespace mdimlab

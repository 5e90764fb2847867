// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace feec {

inline constexpr const char* version() { return "0.1.0"; }

/// Invalid user input: unknown case names, bad parameters, malformed files.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Mapping problems: non-invertible Jacobians, points outside the reference patch.
struct GeometryError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Patch interfaces that overlap geometrically but are not conforming.
struct ConformityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Assembly failures: non-SPD mass blocks, factorization breakdowns.
struct AssemblyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Solver failures: divergence, singular systems, missing spectral gaps.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace feec

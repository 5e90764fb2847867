// SPDX-License-Identifier: Apache-2.0
#pragma once

#include "feec/solvers/solvers.hpp"

namespace feec::solvers {

using derham::Vec2;

/// current source approximation used in the discrete Ampere equation
enum class SourceMode {
    primal_pi1,    ///< geometric interpolation Pi1 J (does not commute with the dual divergence)
    l2_projection, ///< L2 projection onto the broken space
    dual_tilde_pi1 ///< dual commuting projection (P1)^T moments
};

/// Separable time-dependent source sum_k g_k(t) * F_k(x), with the matching
/// charge density terms for the Gauss-law diagnostics.
struct TimeDependentSource {
    struct CurrentTerm {
        VectorField spatial;
        std::function<double(double)> time_factor;
    };
    struct ChargeTerm {
        ScalarField spatial;
        std::function<double(double)> time_factor;
    };
    std::vector<CurrentTerm> current;
    std::vector<ChargeTerm> charge;
    bool empty() const { return current.empty(); }
};

struct TimeDomainState {
    FemField e; ///< electric field in V1
    FemField b; ///< magnetic field in V2
    double time = 0.0;
    int step = 0;
};

struct ConservationTrace {
    std::vector<double> time;             ///< t^n per recorded step
    std::vector<double> energy;           ///< (||E^n||^2 + ||B^n||^2)/2
    std::vector<double> pseudo_energy;    ///< leap-frog invariant with the staggered B
    std::vector<double> gauss_broken;     ///< G(E^n)
    std::vector<double> gauss_conforming; ///< G(P1 E^n)
};

struct LeapfrogOptions {
    double t_end = 1.0;
    double cfl_factor = 0.8; ///< dt = cfl_factor * 2 / ||curl_h||
    SourceMode source_mode = SourceMode::dual_tilde_pi1;
    int n_steps = 0;         ///< when > 0, overrides t_end-based step count
};

std::pair<TimeDomainState, ConservationTrace> maxwell_leapfrog(const Discretization& d, const FemField& e0,
                                                               const FemField& b0, const TimeDependentSource& source,
                                                               const LeapfrogOptions& opt);

/// Discrete weak (dual) curl of a V2 coefficient vector into V1. Fields built
/// this way carry a machine-zero discrete divergence.
Eigen::VectorXd weak_curl(const Discretization& d, const Eigen::VectorXd& b2_coeffs);

} // namespace feec::solvers

// SPDX-License-Identifier: Apache-2.0
#include "feec/solvers/time_domain.hpp"

#include "feec/core.hpp"

#include <cmath>

namespace feec::solvers {

using linalg::SparseMatrix;

Eigen::VectorXd weak_curl(const Discretization& d, const Eigen::VectorXd& b2_coeffs) {
    const SparseMatrix cp = d.ops.curl * d.ops.p1_hom.bspline;
    return d.m1.apply_inverse(cp.transpose() * (d.m2.matrix() * b2_coeffs));
}

namespace {

// average of g over [t, t+dt] by 4-point Gauss quadrature
double time_average(const std::function<double(double)>& g, double t, double dt) {
    const auto& rule = bspline::gauss_legendre(4);
    double s = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k)
        s += 0.5 * rule.weights[k] * g(t + 0.5 * dt * (1.0 + rule.nodes[k]));
    return s;
}

} // namespace

std::pair<TimeDomainState, ConservationTrace> maxwell_leapfrog(const Discretization& d, const FemField& e0,
                                                               const FemField& b0, const TimeDependentSource& source,
                                                               const LeapfrogOptions& opt) {
    if (opt.cfl_factor >= 1.0) throw ConfigError("maxwell_leapfrog: cfl_factor must be below 1");
    const auto norm2 = curl_operator_norm_squared(d, derham::BoundaryCondition::homogeneous);
    if (!norm2.converged) throw NumericalError("maxwell_leapfrog: power method for the CFL bound did not converge");
    const double curl_norm = std::sqrt(std::max(norm2.value, 0.0));
    const double dt = curl_norm > 0.0 ? opt.cfl_factor * 2.0 / curl_norm : opt.t_end;
    const int n_steps = opt.n_steps > 0 ? opt.n_steps : std::max(1, static_cast<int>(std::ceil(opt.t_end / dt)));

    const SparseMatrix& p1 = d.ops.p1_hom.bspline;
    const SparseMatrix cp = d.ops.curl * p1;
    const SparseMatrix cpt_m2 = cp.transpose() * d.m2.matrix();
    const SparseMatrix gp0t_m1 = (d.ops.grad * d.ops.p0_hom.bspline).transpose() * d.m1.matrix();
    const SparseMatrix p0_t = d.ops.p0_hom.bspline.transpose();

    // precompute the spatial moment (and primal coefficient) vectors of the source terms
    std::vector<Eigen::VectorXd> current_moments, current_primal;
    for (const auto& term : source.current) {
        current_moments.push_back(assembly::moments(*d.spaces.v1, term.spatial));
        if (opt.source_mode == SourceMode::primal_pi1)
            current_primal.push_back(
                d.ops.collocation_solve(*d.spaces.v1, derham::geometric_dofs(*d.spaces.v1, term.spatial)));
    }
    std::vector<Eigen::VectorXd> charge_moments;
    for (const auto& term : source.charge) charge_moments.push_back(assembly::moments(*d.spaces.v0, term.spatial));

    TimeDomainState state{e0, b0, 0.0, 0};
    ConservationTrace trace;
    trace.time.reserve(n_steps);

    auto gauss_error = [&](const Eigen::VectorXd& e, double t) {
        Eigen::VectorXd g = -(gp0t_m1 * e);
        for (std::size_t k = 0; k < charge_moments.size(); ++k)
            g -= p0_t * (source.charge[k].time_factor(t) * charge_moments[k]);
        return std::sqrt(std::max(0.0, g.dot(d.m0.apply_inverse(g))));
    };

    double initial_energy = -1.0;
    for (int n = 0; n < n_steps; ++n) {
        const double t = state.time;
        const double energy =
            0.5 * (d.m1.inner(state.e.coeffs, state.e.coeffs) + d.m2.inner(state.b.coeffs, state.b.coeffs));
        if (initial_energy < 0.0) initial_energy = energy;
        if (source.empty() && initial_energy > 0.0 && energy > 10.0 * initial_energy)
            throw NumericalError("maxwell_leapfrog: energy grew by more than 10x without a source (instability)");

        // half step for B
        Eigen::VectorXd b_half = state.b.coeffs - 0.5 * dt * (cp * state.e.coeffs);

        // diagnostics at time t^n (pseudo-energy uses the staggered B)
        const double pseudo = 0.5 * (d.m1.inner(state.e.coeffs, state.e.coeffs) + d.m2.inner(b_half, b_half)) +
                              0.5 * dt * (cp * state.e.coeffs).dot(d.m2.matrix() * b_half);
        trace.time.push_back(t);
        trace.energy.push_back(energy);
        trace.pseudo_energy.push_back(pseudo);
        trace.gauss_broken.push_back(gauss_error(state.e.coeffs, t));
        trace.gauss_conforming.push_back(gauss_error(p1 * state.e.coeffs, t));

        // full step for E with the time-averaged current
        Eigen::VectorXd dual_rhs = cpt_m2 * b_half;
        Eigen::VectorXd primal_source = Eigen::VectorXd::Zero(state.e.coeffs.size());
        for (std::size_t k = 0; k < source.current.size(); ++k) {
            const double avg = time_average(source.current[k].time_factor, t, dt);
            switch (opt.source_mode) {
                case SourceMode::primal_pi1: primal_source += avg * current_primal[k]; break;
                case SourceMode::l2_projection: dual_rhs -= avg * current_moments[k]; break;
                case SourceMode::dual_tilde_pi1: dual_rhs -= avg * (p1.transpose() * current_moments[k]); break;
            }
        }
        state.e.coeffs += dt * d.m1.apply_inverse(dual_rhs) - dt * primal_source;

        // second half step for B
        state.b.coeffs = b_half - 0.5 * dt * (cp * state.e.coeffs);
        state.time = (n + 1) * dt;
        state.step = n + 1;
        if (!state.e.coeffs.allFinite() || !state.b.coeffs.allFinite())
            throw NumericalError("maxwell_leapfrog: non-finite field coefficients");
    }
    return {state, trace};
}

} // namespace feec::solvers

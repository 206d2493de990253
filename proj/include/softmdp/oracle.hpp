#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "softmdp/mdp.hpp"
#include "softmdp/solvers.hpp"

namespace softmdp {

// Thrown when a check is requested on an instance outside its size limits.
struct GuardViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// First-order stationarity residuals of the regularized per-state
// optimization at (v, policy), together with the simplex multiplier. With
// x_a = r(s,a) + gamma*E[v(s')]:
//   Entropy:   lambda(s) = eta*log sum_a exp(x_a/eta) - eta
//              residual(s,a) = x_a - eta*log pi(a|s) - eta - lambda(s)
//   KlToPrior: the prior-weighted analogues with log(pi/prior).
// All residuals vanish exactly at the optimal (v, policy) pair.
struct KktReport {
    QFn residuals;
    std::vector<double> multiplier;  // lambda per state
    double max_abs_residual = 0.0;
};

KktReport kkt_residual(const TabularMdp& mdp, const RegularizerSpec& reg, const ValueFn& v,
                       const Policy& policy);

// Monotonicity check: draws `trials` random V dominated by v_star (subtracts
// strictly positive noise), maps each through q_from_v, and verifies
// Q(s,a) <= Q_star(s,a) + 1e-12 elementwise.
struct DominanceReport {
    bool pass = true;
    int trials = 0;
    int violations = 0;
    double worst_excess = 0.0;  // most positive Q - Q_star seen
    int worst_trial = -1;
    int worst_state = -1;
    int worst_action = -1;
};

DominanceReport proposition1_check(const TabularMdp& mdp, const RegularizerSpec& reg,
                                   const ValueFn& v_star, int trials, uint64_t seed);

// Brute-force optimality check on tiny instances (|S| <= 3, |A| <= 3): sweeps
// the product over states of a per-state simplex grid of strictly positive
// policies (all coordinates >= 1/(2*grid_resolution)), evaluates each with
// ExactLinear policy evaluation, and verifies Q^pi <= q_star + 1e-8
// elementwise. For kind=None it enumerates all deterministic policies
// instead. closest_gap records how nearly the best grid policy attains
// q_star.
struct ExhaustiveReport {
    bool pass = true;
    long policies_checked = 0;
    double max_excess = 0.0;   // most positive Q^pi - q_star over the sweep
    double closest_gap = 0.0;  // min over policies of sup|Q^pi - q_star|
};

ExhaustiveReport exhaustive_policy_check(const TabularMdp& mdp, const RegularizerSpec& reg,
                                         const QFn& q_star, int grid_resolution);

// Ground-truth fixed point: soft value iteration rerun at tolerance 1e-13
// with 10x the default iteration budget. Throws on non-convergence.
ValueFn long_run_reference(const TabularMdp& mdp, const RegularizerSpec& reg);

}  // namespace softmdp

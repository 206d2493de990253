#pragma once

#include <span>

#include "softmdp/mdp.hpp"

namespace softmdp {

// One application of the optimal backup: the new value table and its
// sup-norm distance to the input.
struct BackupResult {
    ValueFn value;
    double residual = 0.0;
};

// eta * log(sum_a w_a * exp(values[a] / eta)), with w_a = 1 when `weights`
// is empty. Computed with max-subtraction: no intermediate can overflow for
// |values| up to 1e300 and eta down to 1e-8, and a single unweighted element
// is returned exactly. Weights, when given, must be a strictly positive
// probability vector of the same length.
double log_sum_exp(std::span<const double> values, double eta,
                   std::span<const double> weights = {});

// Policy-evaluation backup T^pi applied once to q. The state value is
//   Entropy:   V(s) = sum_a pi(a|s) (q(s,a) - eta*log pi(a|s))
//   KlToPrior: V(s) = sum_a pi(a|s) (q(s,a) - eta*log(pi(a|s)/prior(a|s)))
//   None:      V(s) = sum_a pi(a|s) q(s,a)
// with 0*log 0 = 0, followed by (T^pi q)(s,a) = r(s,a) + gamma * E[V(s')].
QFn soft_bellman_backup(const TabularMdp& mdp, const RegularizerSpec& reg,
                        const Policy& policy, const QFn& q);

// Optimality backup applied once to v. Per state, with
// x_a = r(s,a) + gamma * E[v(s')]:
//   Entropy:   log_sum_exp(x, eta)
//   KlToPrior: log_sum_exp(x, eta, prior row)
//   None:      max_a x_a
BackupResult optimal_backup(const TabularMdp& mdp, const RegularizerSpec& reg,
                            const ValueFn& v);

// Q(s,a) = r(s,a) + gamma * sum_{s'} p(s'|s,a) v(s').
QFn q_from_v(const TabularMdp& mdp, const ValueFn& v);

// Row-wise softmax: pi(a|s) proportional to exp(q(s,a)/eta), weighted by the
// prior row for KlToPrior. Max-subtracted and renormalized, so rows sum to 1
// within 1e-12. Rejects kind = None (no softmax policy is defined there).
Policy softmax_policy(const QFn& q, const RegularizerSpec& reg);

// H(s) = -sum_a pi(a|s) log pi(a|s), with 0*log 0 = 0.
double policy_entropy(const Policy& policy, int state);

// KL(pi(.|s) || prior(.|s)) = sum_a pi log(pi/prior); prior must be strictly
// positive at the given state.
double policy_kl(const Policy& policy, const Policy& prior, int state);

}  // namespace softmdp

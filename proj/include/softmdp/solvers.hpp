#pragma once

#include <optional>
#include <vector>

#include "softmdp/mdp.hpp"
#include "softmdp/operators.hpp"

namespace softmdp {

enum class EvalMode { Iterative, ExactLinear };

struct SolveConfig {
    double tolerance = 1e-10;      // sup-norm stopping threshold
    int max_iterations = 100000;
    EvalMode evaluation_mode = EvalMode::ExactLinear;
    bool record_trace = false;
};

// Solver output: the fixed point reached, the policy extracted from it, and
// the iterate bookkeeping. converged implies final_residual < tolerance;
// non-convergence is reported here, never thrown.
struct SolveReport {
    ValueFn fixed_point_v;
    QFn fixed_point_q;
    Policy policy;
    int iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    std::vector<double> trace;  // per-iteration residuals when record_trace
};

// Iterates the optimal backup from v0 (zeros by default) until the sup-norm
// residual drops below config.tolerance, then extracts Q = q_from_v and the
// softmax policy (or the lowest-index argmax policy for kind=None).
SolveReport soft_value_iteration(const TabularMdp& mdp, const RegularizerSpec& reg,
                                 const SolveConfig& config,
                                 const std::optional<ValueFn>& v0 = std::nullopt);

// Fixed point Q^pi of the policy-evaluation backup. Iterative mode applies
// soft_bellman_backup repeatedly; ExactLinear solves
//   (I - gamma*P_pi) V = r_pi + eta*reg_pi
// by partial-pivoting Gaussian elimination, then sets Q = q_from_v(V), where
// reg_pi is the per-state entropy (Entropy), minus the KL to the prior
// (KlToPrior), or zero (None). Throws on non-convergence in Iterative mode.
QFn soft_policy_evaluation(const TabularMdp& mdp, const RegularizerSpec& reg,
                           const Policy& policy, const SolveConfig& config);

// The SPI improvement step: the softmax policy of q. Same contract as
// softmax_policy (rejects kind=None).
Policy soft_policy_improvement(const QFn& q, const RegularizerSpec& reg);

// Alternates policy evaluation and improvement from pi0 (uniform by default)
// until consecutive Q fixed points agree within config.tolerance. The
// reported policy is the improvement of the final Q, the reported V the
// policy expectation of (Q - eta*log pi) adapted per regularizer. For
// kind=None the improvement step is the lowest-index argmax policy.
SolveReport soft_policy_iteration(const TabularMdp& mdp, const RegularizerSpec& reg,
                                  const SolveConfig& config,
                                  const std::optional<Policy>& pi0 = std::nullopt);

// Lowest-index argmax policy of q; the kind=None improvement/extraction step.
Policy argmax_policy(const QFn& q);

// sup-norm distance helpers used by solvers and the certification suites.
double sup_norm_diff(const ValueFn& a, const ValueFn& b);
double sup_norm_diff(const QFn& a, const QFn& b);

}  // namespace softmdp

#include "softmdp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace softmdp {

namespace {

void check_config(const SolveConfig& config) {
    if (!(config.tolerance > 0.0)) {
        throw std::invalid_argument("solver: tolerance must be strictly positive");
    }
    if (config.max_iterations < 1) {
        throw std::invalid_argument("solver: max_iterations must be >= 1");
    }
}

// Dense linear solve by Gaussian elimination with partial pivoting. The
// systems here are I - gamma*P_pi with stochastic P_pi and gamma < 1, so a
// vanishing pivot means a broken caller, not an ill-conditioned instance.
std::vector<double> solve_dense(std::vector<std::vector<double>> a, std::vector<double> b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int pivot = col;
        for (int r = col + 1; r < n; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
        }
        if (std::abs(a[pivot][col]) < 1e-14) {
            throw std::runtime_error("solve_dense: singular system");
        }
        std::swap(a[col], a[pivot]);
        std::swap(b[col], b[pivot]);
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r][col] / a[col][col];
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
            b[r] -= f * b[col];
        }
    }
    std::vector<double> x(n, 0.0);
    for (int r = n - 1; r >= 0; --r) {
        double acc = b[r];
        for (int c = r + 1; c < n; ++c) acc -= a[r][c] * x[c];
        x[r] = acc / a[r][r];
    }
    return x;
}

// Per-state regularizer value of a policy row: +entropy, -KL, or 0.
double regularizer_of_row(const RegularizerSpec& reg, const Policy& policy, int s) {
    switch (reg.kind) {
        case RegKind::Entropy:
            return policy_entropy(policy, s);
        case RegKind::KlToPrior:
            return -policy_kl(policy, reg.prior, s);
        case RegKind::None:
            return 0.0;
    }
    return 0.0;
}

// V(s) = sum_a pi(a|s)(Q(s,a) - eta*log pi(a|s)), adapted per regularizer.
ValueFn value_of_policy_q(const TabularMdp& mdp, const RegularizerSpec& reg,
                          const Policy& policy, const QFn& q) {
    ValueFn v;
    v.v.assign(mdp.num_states, 0.0);
    for (int s = 0; s < mdp.num_states; ++s) {
        double acc = 0.0;
        for (int a = 0; a < mdp.num_actions; ++a) {
            const double p = policy.probs[s][a];
            if (p == 0.0) continue;
            acc += p * q.q[s][a];
        }
        v.v[s] = acc;
        if (reg.kind != RegKind::None) {
            v.v[s] += reg.eta * regularizer_of_row(reg, policy, s);
        }
    }
    return v;
}

}  // namespace

double sup_norm_diff(const ValueFn& a, const ValueFn& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
    return m;
}

double sup_norm_diff(const QFn& a, const QFn& b) {
    double m = 0.0;
    for (size_t s = 0; s < a.q.size(); ++s) {
        for (size_t i = 0; i < a.q[s].size(); ++i) {
            m = std::max(m, std::abs(a.q[s][i] - b.q[s][i]));
        }
    }
    return m;
}

Policy argmax_policy(const QFn& q) {
    Policy pi;
    pi.probs.assign(q.q.size(), {});
    for (size_t s = 0; s < q.q.size(); ++s) {
        const auto& row = q.q[s];
        int best = 0;
        for (int a = 1; a < static_cast<int>(row.size()); ++a) {
            if (row[a] > row[best]) best = a;  // ties break to the lowest index
        }
        pi.probs[s].assign(row.size(), 0.0);
        pi.probs[s][best] = 1.0;
    }
    return pi;
}

SolveReport soft_value_iteration(const TabularMdp& mdp, const RegularizerSpec& reg,
                                 const SolveConfig& config, const std::optional<ValueFn>& v0) {
    require_valid(mdp);
    require_valid_regularizer(reg, mdp.num_states, mdp.num_actions);
    check_config(config);

    ValueFn v;
    if (v0.has_value()) {
        if (static_cast<int>(v0->v.size()) != mdp.num_states) {
            throw std::invalid_argument("soft_value_iteration: v0 shape mismatch");
        }
        v = *v0;
    } else {
        v.v.assign(mdp.num_states, 0.0);
    }

    SolveReport report;
    for (int k = 0; k < config.max_iterations; ++k) {
        BackupResult step = optimal_backup(mdp, reg, v);
        v = std::move(step.value);
        report.iterations = k + 1;
        report.final_residual = step.residual;
        if (config.record_trace) report.trace.push_back(step.residual);
        if (step.residual < config.tolerance) {
            report.converged = true;
            break;
        }
    }

    report.fixed_point_v = std::move(v);
    report.fixed_point_q = q_from_v(mdp, report.fixed_point_v);
    report.policy = (reg.kind == RegKind::None) ? argmax_policy(report.fixed_point_q)
                                                : softmax_policy(report.fixed_point_q, reg);
    return report;
}

QFn soft_policy_evaluation(const TabularMdp& mdp, const RegularizerSpec& reg,
                           const Policy& policy, const SolveConfig& config) {
    require_valid(mdp);
    require_valid_regularizer(reg, mdp.num_states, mdp.num_actions);
    require_valid_policy(policy, mdp.num_states, mdp.num_actions);
    check_config(config);

    if (config.evaluation_mode == EvalMode::Iterative) {
        QFn q;
        q.q.assign(mdp.num_states, std::vector<double>(mdp.num_actions, 0.0));
        for (int k = 0; k < config.max_iterations; ++k) {
            QFn next = soft_bellman_backup(mdp, reg, policy, q);
            const double residual = sup_norm_diff(next, q);
            q = std::move(next);
            if (residual < config.tolerance) return q;
        }
        throw std::runtime_error("soft_policy_evaluation: no convergence within max_iterations");
    }

    // ExactLinear: (I - gamma*P_pi) V = r_pi + eta*reg_pi.
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    std::vector<std::vector<double>> lhs(S, std::vector<double>(S, 0.0));
    std::vector<double> rhs(S, 0.0);
    for (int s = 0; s < S; ++s) {
        lhs[s][s] = 1.0;
        double r_pi = 0.0;
        for (int a = 0; a < A; ++a) {
            const double p = policy.probs[s][a];
            if (p == 0.0) continue;
            r_pi += p * mdp.rewards[s][a];
            const auto& row = mdp.transitions[s][a];
            for (int t = 0; t < S; ++t) lhs[s][t] -= mdp.gamma * p * row[t];
        }
        rhs[s] = r_pi;
        if (reg.kind != RegKind::None) {
            rhs[s] += reg.eta * regularizer_of_row(reg, policy, s);
        }
    }
    ValueFn v;
    v.v = solve_dense(std::move(lhs), std::move(rhs));
    return q_from_v(mdp, v);
}

Policy soft_policy_improvement(const QFn& q, const RegularizerSpec& reg) {
    return softmax_policy(q, reg);
}

SolveReport soft_policy_iteration(const TabularMdp& mdp, const RegularizerSpec& reg,
                                  const SolveConfig& config, const std::optional<Policy>& pi0) {
    require_valid(mdp);
    require_valid_regularizer(reg, mdp.num_states, mdp.num_actions);
    check_config(config);

    const bool regularized = reg.kind != RegKind::None;
    Policy pi = pi0.value_or(uniform_policy(mdp));
    // log pi is unbounded at the simplex boundary, so a regularized run must
    // start inside the softmax class.
    require_valid_policy(pi, mdp.num_states, mdp.num_actions, regularized, "pi0");

    SolveReport report;
    QFn q_prev = soft_policy_evaluation(mdp, reg, pi, config);
    for (int k = 0; k < config.max_iterations; ++k) {
        pi = regularized ? soft_policy_improvement(q_prev, reg) : argmax_policy(q_prev);
        QFn q = soft_policy_evaluation(mdp, reg, pi, config);
        const double residual = sup_norm_diff(q, q_prev);
        q_prev = std::move(q);
        report.iterations = k + 1;
        report.final_residual = residual;
        if (config.record_trace) report.trace.push_back(residual);
        if (residual < config.tolerance) {
            report.converged = true;
            break;
        }
    }

    report.fixed_point_q = std::move(q_prev);
    report.policy = regularized ? soft_policy_improvement(report.fixed_point_q, reg)
                                : argmax_policy(report.fixed_point_q);
    report.fixed_point_v = value_of_policy_q(mdp, reg, report.policy, report.fixed_point_q);
    return report;
}

}  // namespace softmdp

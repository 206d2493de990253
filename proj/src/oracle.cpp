#include "softmdp/oracle.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "softmdp/operators.hpp"
#include "softmdp/rng.hpp"

namespace softmdp {

KktReport kkt_residual(const TabularMdp& mdp, const RegularizerSpec& reg, const ValueFn& v,
                       const Policy& policy) {
    if (reg.kind == RegKind::None) {
        throw std::invalid_argument("kkt_residual: requires an Entropy or KlToPrior regularizer");
    }
    require_valid_regularizer(reg, mdp.num_states, mdp.num_actions);
    require_valid_policy(policy, mdp.num_states, mdp.num_actions, true);

    const QFn x = q_from_v(mdp, v);
    const double eta = reg.eta;

    KktReport report;
    report.residuals.q.assign(mdp.num_states, std::vector<double>(mdp.num_actions, 0.0));
    report.multiplier.assign(mdp.num_states, 0.0);
    for (int s = 0; s < mdp.num_states; ++s) {
        const auto& row = x.q[s];
        double lambda;
        if (reg.kind == RegKind::Entropy) {
            lambda = log_sum_exp(row, eta) - eta;
        } else {
            lambda = log_sum_exp(row, eta, reg.prior.probs[s]) - eta;
        }
        report.multiplier[s] = lambda;
        for (int a = 0; a < mdp.num_actions; ++a) {
            double log_term = std::log(policy.probs[s][a]);
            if (reg.kind == RegKind::KlToPrior) {
                log_term -= std::log(reg.prior.probs[s][a]);
            }
            const double res = row[a] - eta * log_term - eta - lambda;
            report.residuals.q[s][a] = res;
            report.max_abs_residual = std::max(report.max_abs_residual, std::abs(res));
        }
    }
    return report;
}

DominanceReport proposition1_check(const TabularMdp& mdp, const RegularizerSpec& reg,
                                   const ValueFn& v_star, int trials, uint64_t seed) {
    (void)reg;  // the comparison Q <= Q_star holds for any regularizer
    if (trials < 1) throw std::invalid_argument("proposition1_check: trials must be >= 1");

    const QFn q_star = q_from_v(mdp, v_star);
    DominanceReport report;
    report.trials = trials;

    ValueFn v;
    v.v.assign(mdp.num_states, 0.0);
    for (int trial = 0; trial < trials; ++trial) {
        Xoshiro256pp rng(derive_seed(seed, static_cast<uint64_t>(trial)));
        // Noise scale varies across ten decades so both near-boundary and
        // far-dominated value functions get exercised.
        const double scale = std::pow(10.0, rng.uniform(-6.0, 1.0));
        for (int s = 0; s < mdp.num_states; ++s) {
            v.v[s] = v_star.v[s] - rng.uniform_open01() * scale;
        }
        const QFn q = q_from_v(mdp, v);
        for (int s = 0; s < mdp.num_states; ++s) {
            for (int a = 0; a < mdp.num_actions; ++a) {
                const double excess = q.q[s][a] - q_star.q[s][a];
                if (excess > report.worst_excess) {
                    report.worst_excess = excess;
                    report.worst_trial = trial;
                    report.worst_state = s;
                    report.worst_action = a;
                }
                if (excess > 1e-12) {
                    ++report.violations;
                    report.pass = false;
                }
            }
        }
    }
    return report;
}

namespace {

// Per-state grid of strictly positive rows: the standard simplex lattice with
// grid_resolution points per edge, pulled toward uniform just enough that
// every coordinate is >= 1/(2*grid_resolution).
std::vector<std::vector<double>> interior_simplex_grid(int num_actions, int resolution) {
    std::vector<std::vector<double>> points;
    const double blend = static_cast<double>(num_actions) / (2.0 * resolution);
    const int ticks = resolution - 1;
    std::vector<int> k(num_actions, 0);
    // Enumerate nonnegative integer vectors summing to `ticks`, ascending
    // lexicographic order.
    std::vector<double> p(num_actions);
    auto emit = [&]() {
        for (int a = 0; a < num_actions; ++a) {
            const double bary = static_cast<double>(k[a]) / ticks;
            p[a] = (1.0 - blend) * bary + blend / num_actions;
        }
        points.push_back(p);
    };
    if (num_actions == 1) {
        points.push_back({1.0});
        return points;
    }
    // k[0..A-2] free, last coordinate absorbs the remainder.
    while (true) {
        int used = 0;
        for (int a = 0; a < num_actions - 1; ++a) used += k[a];
        if (used <= ticks) {
            k[num_actions - 1] = ticks - used;
            emit();
        }
        // odometer step over the first A-1 coordinates
        int pos = num_actions - 2;
        while (pos >= 0) {
            ++k[pos];
            int total = 0;
            for (int a = 0; a <= pos; ++a) total += k[a];
            if (total <= ticks) break;
            k[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    return points;
}

}  // namespace

ExhaustiveReport exhaustive_policy_check(const TabularMdp& mdp, const RegularizerSpec& reg,
                                         const QFn& q_star, int grid_resolution) {
    if (mdp.num_states > 3 || mdp.num_actions > 3) {
        throw GuardViolation("exhaustive_policy_check: instance exceeds the tiny-size limit (|S| <= 3, |A| <= 3)");
    }
    if (grid_resolution < 5) {
        throw std::invalid_argument("exhaustive_policy_check: grid_resolution must be >= 5");
    }

    const int S = mdp.num_states;
    const int A = mdp.num_actions;

    std::vector<std::vector<double>> rows;
    if (reg.kind == RegKind::None) {
        // The optimum is deterministic; enumerate point-mass rows.
        for (int a = 0; a < A; ++a) {
            std::vector<double> row(A, 0.0);
            row[a] = 1.0;
            rows.push_back(row);
        }
    } else {
        rows = interior_simplex_grid(A, grid_resolution);
    }

    SolveConfig eval_config;
    eval_config.evaluation_mode = EvalMode::ExactLinear;

    ExhaustiveReport report;
    report.closest_gap = std::numeric_limits<double>::infinity();
    Policy pi;
    pi.probs.assign(S, rows[0]);
    std::vector<size_t> choice(S, 0);
    while (true) {
        for (int s = 0; s < S; ++s) pi.probs[s] = rows[choice[s]];
        const QFn q_pi = soft_policy_evaluation(mdp, reg, pi, eval_config);
        ++report.policies_checked;
        double gap = 0.0;
        for (int s = 0; s < S; ++s) {
            for (int a = 0; a < A; ++a) {
                const double excess = q_pi.q[s][a] - q_star.q[s][a];
                report.max_excess = std::max(report.max_excess, excess);
                gap = std::max(gap, std::abs(excess));
            }
        }
        report.closest_gap = std::min(report.closest_gap, gap);

        int pos = S - 1;
        while (pos >= 0 && ++choice[pos] == rows.size()) {
            choice[pos] = 0;
            --pos;
        }
        if (pos < 0) break;
    }
    report.pass = report.max_excess <= 1e-8;
    return report;
}

ValueFn long_run_reference(const TabularMdp& mdp, const RegularizerSpec& reg) {
    SolveConfig config;
    config.tolerance = 1e-13;
    config.max_iterations = 1000000;
    SolveReport report = soft_value_iteration(mdp, reg, config);
    if (!report.converged) {
        throw std::runtime_error("long_run_reference: no convergence at reference tolerance");
    }
    return report.fixed_point_v;
}

}  // namespace softmdp

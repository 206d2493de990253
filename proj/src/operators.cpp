#include "softmdp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace softmdp {

namespace {

// Shape checks shared by the backup operators. Full stochastic-row validation
// is validate_mdp's job; operators only guard against mismatched tables.
void check_shapes(const TabularMdp& mdp, const QFn* q, const ValueFn* v, const Policy* pi) {
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    if (static_cast<int>(mdp.rewards.size()) != S ||
        static_cast<int>(mdp.transitions.size()) != S) {
        throw std::invalid_argument("operators: MDP tables do not match num_states");
    }
    if (q) {
        if (static_cast<int>(q->q.size()) != S) {
            throw std::invalid_argument("operators: Q table has wrong number of states");
        }
        for (const auto& row : q->q) {
            if (static_cast<int>(row.size()) != A) {
                throw std::invalid_argument("operators: Q table has wrong number of actions");
            }
        }
    }
    if (v && static_cast<int>(v->v.size()) != S) {
        throw std::invalid_argument("operators: value table has wrong number of states");
    }
    if (pi) {
        if (static_cast<int>(pi->probs.size()) != S) {
            throw std::invalid_argument("operators: policy has wrong number of states");
        }
        for (const auto& row : pi->probs) {
            if (static_cast<int>(row.size()) != A) {
                throw std::invalid_argument("operators: policy has wrong number of actions");
            }
        }
    }
}

double expected_next_value(const std::vector<double>& row, const std::vector<double>& v) {
    double acc = 0.0;
    for (size_t t = 0; t < row.size(); ++t) acc += row[t] * v[t];
    return acc;
}

}  // namespace

double log_sum_exp(std::span<const double> values, double eta, std::span<const double> weights) {
    if (values.empty()) throw std::invalid_argument("log_sum_exp: empty input");
    if (!(eta > 0.0) || !std::isfinite(eta)) {
        throw std::invalid_argument("log_sum_exp: eta must be strictly positive");
    }
    for (double x : values) {
        if (!std::isfinite(x)) throw std::invalid_argument("log_sum_exp: non-finite input");
    }
    if (!weights.empty()) {
        if (weights.size() != values.size()) {
            throw std::invalid_argument("log_sum_exp: weights length mismatch");
        }
        double sum = 0.0;
        for (double w : weights) {
            if (!(w > 0.0) || !std::isfinite(w)) {
                throw std::invalid_argument("log_sum_exp: weights must be strictly positive");
            }
            sum += w;
        }
        if (std::abs(sum - 1.0) > kRowSumTol) {
            throw std::invalid_argument("log_sum_exp: weights must sum to 1");
        }
    }

    const double m = *std::max_element(values.begin(), values.end());
    if (weights.empty() && values.size() == 1) return m;

    double sum = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
        const double w = weights.empty() ? 1.0 : weights[i];
        sum += w * std::exp((values[i] - m) / eta);
    }
    return m + eta * std::log(sum);
}

QFn soft_bellman_backup(const TabularMdp& mdp, const RegularizerSpec& reg,
                        const Policy& policy, const QFn& q) {
    check_shapes(mdp, &q, nullptr, &policy);
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    if (reg.kind == RegKind::KlToPrior) {
        require_valid_policy(reg.prior, S, A, true, "prior");
    }

    // State values under the policy, regularizer included. 0*log 0 = 0.
    std::vector<double> v(S, 0.0);
    for (int s = 0; s < S; ++s) {
        double acc = 0.0;
        for (int a = 0; a < A; ++a) {
            const double p = policy.probs[s][a];
            if (p == 0.0) continue;
            double term = q.q[s][a];
            switch (reg.kind) {
                case RegKind::Entropy:
                    term -= reg.eta * std::log(p);
                    break;
                case RegKind::KlToPrior:
                    term -= reg.eta * std::log(p / reg.prior.probs[s][a]);
                    break;
                case RegKind::None:
                    break;
            }
            acc += p * term;
        }
        v[s] = acc;
    }

    QFn out;
    out.q.assign(S, std::vector<double>(A, 0.0));
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            out.q[s][a] = mdp.rewards[s][a] + mdp.gamma * expected_next_value(mdp.transitions[s][a], v);
        }
    }
    return out;
}

BackupResult optimal_backup(const TabularMdp& mdp, const RegularizerSpec& reg, const ValueFn& v) {
    check_shapes(mdp, nullptr, &v, nullptr);
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    if (reg.kind == RegKind::KlToPrior) {
        require_valid_policy(reg.prior, S, A, true, "prior");
    }

    BackupResult out;
    out.value.v.assign(S, 0.0);
    std::vector<double> x(A);
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            x[a] = mdp.rewards[s][a] + mdp.gamma * expected_next_value(mdp.transitions[s][a], v.v);
        }
        double value = 0.0;
        switch (reg.kind) {
            case RegKind::Entropy:
                value = log_sum_exp(x, reg.eta);
                break;
            case RegKind::KlToPrior:
                value = log_sum_exp(x, reg.eta, reg.prior.probs[s]);
                break;
            case RegKind::None:
                value = *std::max_element(x.begin(), x.end());
                break;
        }
        out.value.v[s] = value;
        out.residual = std::max(out.residual, std::abs(value - v.v[s]));
    }
    return out;
}

QFn q_from_v(const TabularMdp& mdp, const ValueFn& v) {
    check_shapes(mdp, nullptr, &v, nullptr);
    const int S = mdp.num_states;
    const int A = mdp.num_actions;
    QFn out;
    out.q.assign(S, std::vector<double>(A, 0.0));
    for (int s = 0; s < S; ++s) {
        for (int a = 0; a < A; ++a) {
            out.q[s][a] = mdp.rewards[s][a] + mdp.gamma * expected_next_value(mdp.transitions[s][a], v.v);
        }
    }
    return out;
}

Policy softmax_policy(const QFn& q, const RegularizerSpec& reg) {
    if (reg.kind == RegKind::None) {
        throw std::invalid_argument("softmax_policy: no softmax policy defined for kind=None");
    }
    if (!(reg.eta > 0.0) || !std::isfinite(reg.eta)) {
        throw std::invalid_argument("softmax_policy: eta must be strictly positive");
    }
    const int S = static_cast<int>(q.q.size());
    Policy pi;
    pi.probs.assign(S, {});
    for (int s = 0; s < S; ++s) {
        const auto& row = q.q[s];
        const int A = static_cast<int>(row.size());
        if (A == 0) throw std::invalid_argument("softmax_policy: empty Q row");
        if (reg.kind == RegKind::KlToPrior) {
            if (static_cast<int>(reg.prior.probs.size()) != S ||
                static_cast<int>(reg.prior.probs[s].size()) != A) {
                throw std::invalid_argument("softmax_policy: prior shape mismatch");
            }
        }
        const double m = *std::max_element(row.begin(), row.end());
        auto& out = pi.probs[s];
        out.assign(A, 0.0);
        double sum = 0.0;
        for (int a = 0; a < A; ++a) {
            double w = std::exp((row[a] - m) / reg.eta);
            if (reg.kind == RegKind::KlToPrior) {
                const double prior = reg.prior.probs[s][a];
                if (!(prior > 0.0)) {
                    throw std::invalid_argument("softmax_policy: prior entry must be positive");
                }
                w *= prior;
            }
            out[a] = w;
            sum += w;
        }
        // Renormalize so the row sums to 1 regardless of rounding. The
        // maximizing entry is exp(0) > 0, so sum > 0 always.
        for (int a = 0; a < A; ++a) out[a] /= sum;
    }
    return pi;
}

double policy_entropy(const Policy& policy, int state) {
    const auto& row = policy.probs.at(state);
    double h = 0.0;
    for (double p : row) {
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

double policy_kl(const Policy& policy, const Policy& prior, int state) {
    const auto& row = policy.probs.at(state);
    const auto& prow = prior.probs.at(state);
    if (prow.size() != row.size()) throw std::invalid_argument("policy_kl: shape mismatch");
    double kl = 0.0;
    for (size_t a = 0; a < row.size(); ++a) {
        if (!(prow[a] > 0.0)) throw std::invalid_argument("policy_kl: zero prior entry");
        if (row[a] > 0.0) kl += row[a] * std::log(row[a] / prow[a]);
    }
    return kl;
}

}  // namespace softmdp

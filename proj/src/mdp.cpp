#include "softmdp/mdp.hpp"

#include <cmath>
#include <stdexcept>

#include "softmdp/rng.hpp"

namespace softmdp {

namespace {

std::string idx(const std::string& name, int i) { return name + "[" + std::to_string(i) + "]"; }

std::string idx(const std::string& name, int i, int j) {
    return name + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
}

void check_row_stochastic(const std::string& where, const std::vector<double>& row,
                          bool require_positive, ValidationResult& out) {
    double sum = 0.0;
    for (int k = 0; k < static_cast<int>(row.size()); ++k) {
        const double p = row[k];
        if (!std::isfinite(p)) {
            out.violations.push_back({idx(where, k), "entry is not finite", 0.0});
            return;
        }
        if (p < 0.0 || p > 1.0) {
            out.violations.push_back(
                {idx(where, k), "entry " + std::to_string(p) + " outside [0, 1]",
                 p < 0.0 ? -p : p - 1.0});
        }
        if (require_positive && p == 0.0) {
            out.violations.push_back({idx(where, k), "entry must be strictly positive", 0.0});
        }
        sum += p;
    }
    const double dev = std::abs(sum - 1.0);
    if (dev > kRowSumTol) {
        out.violations.push_back(
            {where, "row sum " + std::to_string(sum) + " != 1 (deviation " +
                        std::to_string(dev) + ")",
             dev});
    }
}

}  // namespace

ValidationResult validate_mdp(const TabularMdp& mdp) {
    ValidationResult out;
    if (mdp.num_states < 1) {
        out.violations.push_back({"num_states", "must be >= 1", 0.0});
    }
    if (mdp.num_actions < 1) {
        out.violations.push_back({"num_actions", "must be >= 1", 0.0});
    }
    if (!(mdp.gamma >= 0.0 && mdp.gamma < 1.0)) {
        out.violations.push_back({"gamma", "gamma not in [0,1)", 0.0});
    }
    if (!out.ok()) return out;

    const int S = mdp.num_states;
    const int A = mdp.num_actions;

    if (static_cast<int>(mdp.rewards.size()) != S) {
        out.violations.push_back(
            {"rewards", "expected " + std::to_string(S) + " rows, got " +
                            std::to_string(mdp.rewards.size()),
             0.0});
    } else {
        for (int s = 0; s < S; ++s) {
            if (static_cast<int>(mdp.rewards[s].size()) != A) {
                out.violations.push_back(
                    {idx("rewards", s), "expected " + std::to_string(A) + " entries, got " +
                                            std::to_string(mdp.rewards[s].size()),
                     0.0});
                continue;
            }
            for (int a = 0; a < A; ++a) {
                if (!std::isfinite(mdp.rewards[s][a])) {
                    out.violations.push_back({idx("rewards", s, a), "reward is not finite", 0.0});
                }
            }
        }
    }

    if (static_cast<int>(mdp.transitions.size()) != S) {
        out.violations.push_back(
            {"transitions", "expected " + std::to_string(S) + " rows, got " +
                                std::to_string(mdp.transitions.size()),
             0.0});
    } else {
        for (int s = 0; s < S; ++s) {
            if (static_cast<int>(mdp.transitions[s].size()) != A) {
                out.violations.push_back(
                    {idx("transitions", s), "expected " + std::to_string(A) + " rows, got " +
                                                std::to_string(mdp.transitions[s].size()),
                     0.0});
                continue;
            }
            for (int a = 0; a < A; ++a) {
                const auto& row = mdp.transitions[s][a];
                if (static_cast<int>(row.size()) != S) {
                    out.violations.push_back(
                        {idx("transitions", s, a), "expected " + std::to_string(S) +
                                                       " entries, got " +
                                                       std::to_string(row.size()),
                         0.0});
                    continue;
                }
                check_row_stochastic(idx("transitions", s, a), row, false, out);
            }
        }
    }
    return out;
}

ValidationResult validate_policy(const Policy& policy, int num_states, int num_actions,
                                 bool require_positive, const std::string& name) {
    ValidationResult out;
    if (static_cast<int>(policy.probs.size()) != num_states) {
        out.violations.push_back({name, "expected " + std::to_string(num_states) +
                                            " rows, got " + std::to_string(policy.probs.size()),
                                  0.0});
        return out;
    }
    for (int s = 0; s < num_states; ++s) {
        const auto& row = policy.probs[s];
        if (static_cast<int>(row.size()) != num_actions) {
            out.violations.push_back(
                {idx(name, s), "expected " + std::to_string(num_actions) + " entries, got " +
                                   std::to_string(row.size()),
                 0.0});
            continue;
        }
        check_row_stochastic(idx(name, s), row, require_positive, out);
    }
    return out;
}

ValidationResult validate_regularizer(const RegularizerSpec& reg, int num_states,
                                      int num_actions) {
    ValidationResult out;
    if (reg.kind != RegKind::None && !(reg.eta > 0.0 && std::isfinite(reg.eta))) {
        out.violations.push_back({"eta", "temperature must be strictly positive", 0.0});
    }
    if (reg.kind == RegKind::KlToPrior) {
        auto prior = validate_policy(reg.prior, num_states, num_actions, true, "prior");
        out.violations.insert(out.violations.end(), prior.violations.begin(),
                              prior.violations.end());
    }
    return out;
}

TabularMdp random_mdp(uint64_t seed, int num_states, int num_actions, double gamma,
                      double reward_lo, double reward_hi) {
    if (num_states < 1 || num_actions < 1) {
        throw std::invalid_argument("random_mdp: state and action spaces must be non-empty");
    }
    if (!(gamma >= 0.0 && gamma < 1.0)) {
        throw std::invalid_argument("random_mdp: gamma not in [0,1)");
    }
    if (!(reward_lo <= reward_hi) || !std::isfinite(reward_lo) || !std::isfinite(reward_hi)) {
        throw std::invalid_argument("random_mdp: bad reward range");
    }

    Xoshiro256pp rng(seed);
    TabularMdp mdp;
    mdp.num_states = num_states;
    mdp.num_actions = num_actions;
    mdp.gamma = gamma;

    mdp.transitions.assign(num_states, std::vector<std::vector<double>>(
                                           num_actions, std::vector<double>(num_states)));
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            auto& row = mdp.transitions[s][a];
            double sum = 0.0;
            for (int t = 0; t < num_states; ++t) {
                row[t] = rng.exponential();
                sum += row[t];
            }
            for (int t = 0; t < num_states; ++t) row[t] /= sum;
        }
    }

    mdp.rewards.assign(num_states, std::vector<double>(num_actions));
    for (int s = 0; s < num_states; ++s) {
        for (int a = 0; a < num_actions; ++a) {
            mdp.rewards[s][a] = rng.uniform(reward_lo, reward_hi);
        }
    }
    return mdp;
}

Policy uniform_policy(int num_states, int num_actions) {
    Policy pi;
    pi.probs.assign(num_states, std::vector<double>(num_actions, 1.0 / num_actions));
    return pi;
}

Policy uniform_policy(const TabularMdp& mdp) {
    return uniform_policy(mdp.num_states, mdp.num_actions);
}

Policy random_positive_policy(uint64_t seed, int num_states, int num_actions) {
    Xoshiro256pp rng(seed);
    Policy pi;
    pi.probs.assign(num_states, std::vector<double>(num_actions));
    for (int s = 0; s < num_states; ++s) {
        auto& row = pi.probs[s];
        double sum = 0.0;
        for (int a = 0; a < num_actions; ++a) {
            row[a] = rng.exponential();
            sum += row[a];
        }
        for (int a = 0; a < num_actions; ++a) row[a] /= sum;
    }
    return pi;
}

void require_valid(const TabularMdp& mdp) {
    auto result = validate_mdp(mdp);
    if (!result.ok()) {
        throw std::invalid_argument("invalid MDP: " + result.violations.front().str());
    }
}

void require_valid_policy(const Policy& policy, int num_states, int num_actions,
                          bool require_positive, const std::string& name) {
    auto result = validate_policy(policy, num_states, num_actions, require_positive, name);
    if (!result.ok()) {
        throw std::invalid_argument("invalid " + name + ": " + result.violations.front().str());
    }
}

void require_valid_regularizer(const RegularizerSpec& reg, int num_states, int num_actions) {
    auto result = validate_regularizer(reg, num_states, num_actions);
    if (!result.ok()) {
        throw std::invalid_argument("invalid regularizer: " + result.violations.front().str());
    }
}

}  // namespace softmdp

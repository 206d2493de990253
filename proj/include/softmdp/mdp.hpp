#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace softmdp {

// Row-sum tolerance for stochastic tables. Rows outside this tolerance are
// rejected, never silently renormalized.
inline constexpr double kRowSumTol = 1e-9;

// Finite discounted MDP with dense reward and transition tables.
// rewards[s][a]; transitions[s][a][s'] with each [s][a] row stochastic.
struct TabularMdp {
    int num_states = 0;
    int num_actions = 0;
    double gamma = 0.0;
    std::vector<std::vector<double>> rewards;
    std::vector<std::vector<std::vector<double>>> transitions;
};

// Row-stochastic state-conditioned action distribution. probs[s][a].
struct Policy {
    std::vector<std::vector<double>> probs;

    int num_states() const { return static_cast<int>(probs.size()); }
};

// Per-state value table.
struct ValueFn {
    std::vector<double> v;
};

// Per-state-action value table. q[s][a].
struct QFn {
    std::vector<std::vector<double>> q;
};

enum class RegKind { None, Entropy, KlToPrior };

// Per-step regularizer: entropy bonus, KL penalty against a strictly positive
// prior, or none. eta is the temperature (ignored for None).
struct RegularizerSpec {
    RegKind kind = RegKind::None;
    double eta = 1.0;
    Policy prior;  // only meaningful for KlToPrior

    static RegularizerSpec none() { return {RegKind::None, 1.0, {}}; }
    static RegularizerSpec entropy(double eta) { return {RegKind::Entropy, eta, {}}; }
    static RegularizerSpec kl_to_prior(double eta, Policy prior) {
        return {RegKind::KlToPrior, eta, std::move(prior)};
    }
};

// One failed invariant: index path into the offending table, a human-readable
// description, and the measured deviation.
struct Violation {
    std::string where;
    std::string detail;
    double deviation = 0.0;

    std::string str() const { return where + ": " + detail; }
};

struct ValidationResult {
    std::vector<Violation> violations;

    bool ok() const { return violations.empty(); }
};

// Checks every TabularMdp invariant: table shapes, finite rewards, transition
// rows stochastic within kRowSumTol, gamma in [0, 1). Violations are data,
// not failures; all of them are reported.
ValidationResult validate_mdp(const TabularMdp& mdp);

// Checks Policy invariants against the given shape: rows sum to 1 within
// kRowSumTol, entries nonnegative (strictly positive if required_positive).
ValidationResult validate_policy(const Policy& policy, int num_states, int num_actions,
                                 bool require_positive = false,
                                 const std::string& name = "policy");

// Checks RegularizerSpec invariants: eta > 0 for Entropy/KlToPrior, and a
// strictly positive valid prior for KlToPrior.
ValidationResult validate_regularizer(const RegularizerSpec& reg, int num_states,
                                      int num_actions);

// Deterministic random instance: transition rows are flat-Dirichlet draws
// (normalized exponentials) and rewards are uniform in [reward_lo, reward_hi),
// all from one Xoshiro256pp stream seeded with `seed`. The draw order is
// fixed: every transition row in ascending (s, a, s'), then every reward in
// ascending (s, a). Output always passes validate_mdp.
TabularMdp random_mdp(uint64_t seed, int num_states, int num_actions, double gamma,
                      double reward_lo, double reward_hi);

// Policy with every entry exactly 1/num_actions.
Policy uniform_policy(const TabularMdp& mdp);
Policy uniform_policy(int num_states, int num_actions);

// Strictly positive random policy (flat-Dirichlet rows); used for priors and
// test fixtures. Deterministic in its arguments.
Policy random_positive_policy(uint64_t seed, int num_states, int num_actions);

// Throws std::invalid_argument with the first violation if the value is
// invalid; used by operations whose preconditions require valid inputs.
void require_valid(const TabularMdp& mdp);
void require_valid_policy(const Policy& policy, int num_states, int num_actions,
                          bool require_positive = false, const std::string& name = "policy");
void require_valid_regularizer(const RegularizerSpec& reg, int num_states, int num_actions);

}  // namespace softmdp

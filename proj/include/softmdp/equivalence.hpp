#pragma once

#include <span>
#include <string>
#include <vector>

#include "softmdp/mdp.hpp"
#include "softmdp/solvers.hpp"

namespace softmdp {

// Outcome of running both solver routes on one instance. Gaps compare the
// value-iteration fixed point against the policy-iteration fixed point;
// equality of the two routes is certified up to the caller's threshold
// (c * tolerance with c <= 100 for every converged pair at suite scale).
struct EquivalenceReport {
    double q_gap = 0.0;       // sup-norm distance between the two Q fixed points
    double v_gap = 0.0;       // sup-norm distance between the two value functions
    double policy_gap = 0.0;  // max over states of total-variation distance
    int vi_iterations = 0;
    int spi_iterations = 0;
    bool vi_converged = false;
    bool spi_converged = false;
    // Largest positive excess of the SPI value over the VI optimum; observes
    // V^pi <= V* (zero or rounding-level on every converged instance).
    double v_dominance_excess = 0.0;
    bool pass = false;
    std::string failure_reason;
};

// Runs soft value iteration and soft policy iteration independently from
// their default initializations and compares the fixed points. Requires an
// Entropy or KlToPrior regularizer.
EquivalenceReport check_equivalence(const TabularMdp& mdp, const RegularizerSpec& reg,
                                    const SolveConfig& config, double threshold);

struct SweepInstance {
    TabularMdp mdp;
    RegularizerSpec reg;
};

struct SweepSummary {
    int total = 0;
    int passed = 0;
    double max_q_gap = 0.0;
    double max_v_gap = 0.0;
    double max_policy_gap = 0.0;
    int max_vi_iterations = 0;
    int max_spi_iterations = 0;
    long total_vi_iterations = 0;
    long total_spi_iterations = 0;
};

struct SweepResult {
    std::vector<EquivalenceReport> reports;  // one per instance, input order
    SweepSummary summary;
};

// check_equivalence over a list; per-instance failures (including thrown
// precondition errors) land in that instance's report without aborting the
// rest.
SweepResult sweep(std::span<const SweepInstance> instances, const SolveConfig& config,
                  double threshold);

// Max over states of the total-variation distance 0.5*sum_a |a_row - b_row|.
double max_total_variation(const Policy& a, const Policy& b);

// Seeded construction of the standard comparison suite: `count` random MDPs
// with shapes and discounts drawn uniformly from the given ranges, crossed
// with every requested temperature and regularizer (KL uses a random
// strictly positive prior drawn per base instance). Deterministic in its
// parameters; ordering is base instance, then eta, then entropy before kl.
struct SuiteParams {
    int count = 100;
    uint64_t seed = 1;
    int states_lo = 2, states_hi = 20;
    int actions_lo = 2, actions_hi = 8;
    double gamma_lo = 0.5, gamma_hi = 0.95;
    double reward_lo = -1.0, reward_hi = 1.0;
    std::vector<double> etas = {0.01, 0.1, 1.0, 10.0};
    bool entropy = true;
    bool kl = true;
};

struct SuiteEntry {
    SweepInstance instance;
    std::string id;
    int base_index = 0;
    double eta = 0.0;
    std::string reg_name;
};

std::vector<SuiteEntry> build_random_suite(const SuiteParams& params);

}  // namespace softmdp

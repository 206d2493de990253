#include "softmdp/equivalence.hpp"

#include <cmath>

#include "doctest.h"
#include "softmdp/rng.hpp"
#include "test_helpers.hpp"

using namespace softmdp;

TEST_CASE("check_equivalence on the degenerate single-policy instance") {
    const auto report = check_equivalence(test::single_action_mdp(), RegularizerSpec::entropy(1.0),
                                          SolveConfig{}, 1e-6);
    CHECK(report.pass);
    CHECK(report.policy_gap == 0.0);
    CHECK(report.q_gap <= 1e-9);
    CHECK(report.v_gap <= 1e-9);
}

TEST_CASE("check_equivalence on the symmetric fixture") {
    const auto report = check_equivalence(test::symmetric_mdp(), RegularizerSpec::entropy(1.0),
                                          SolveConfig{}, 1e-6);
    CHECK(report.pass);
    CHECK(report.q_gap <= 1e-9);
    CHECK(report.policy_gap <= 1e-9);
    CHECK(report.v_dominance_excess <= 1e-9);
}

TEST_CASE("check_equivalence requires a regularizer") {
    CHECK_THROWS_AS(
        check_equivalence(test::symmetric_mdp(), RegularizerSpec::none(), SolveConfig{}, 1e-6),
        std::invalid_argument);
}

TEST_CASE("equivalence gaps obey the softmax sensitivity bound") {
    SuiteParams params;
    params.count = 8;
    params.seed = 42;
    params.states_hi = 8;
    params.actions_hi = 4;
    params.etas = {0.1, 1.0};
    const auto entries = build_random_suite(params);
    for (const auto& entry : entries) {
        const auto report =
            check_equivalence(entry.instance.mdp, entry.instance.reg, SolveConfig{}, 1e-6);
        REQUIRE(report.pass);
        const double bound =
            (2.0 * entry.instance.mdp.num_actions / entry.eta) * report.q_gap + 1e-12;
        CHECK(report.policy_gap <= bound);
        CHECK(report.v_dominance_excess <= 100.0 * SolveConfig{}.tolerance);
    }
}

TEST_CASE("sweep isolates per-instance failures") {
    SweepInstance good{test::symmetric_mdp(), RegularizerSpec::entropy(1.0)};
    SweepInstance bad = good;  // valid instance, failing config applies to all...
    // ...so break this one structurally instead: an invalid regularizer
    bad.reg = RegularizerSpec::entropy(-1.0);
    const std::vector<SweepInstance> instances{good, bad, good};
    const auto result = sweep(instances, SolveConfig{}, 1e-6);
    REQUIRE(result.reports.size() == 3);
    CHECK(result.reports[0].pass);
    CHECK_FALSE(result.reports[1].pass);
    CHECK_FALSE(result.reports[1].failure_reason.empty());
    CHECK(result.reports[2].pass);
    CHECK(result.summary.passed == 2);
    CHECK(result.summary.total == 3);
}

TEST_CASE("sweep reports non-convergence per instance without aborting") {
    SolveConfig tiny_budget;
    tiny_budget.max_iterations = 1;
    const std::vector<SweepInstance> instances{
        {test::symmetric_mdp(), RegularizerSpec::entropy(1.0)},
        {random_mdp(55, 6, 3, 0.9, -1.0, 1.0), RegularizerSpec::entropy(1.0)},
    };
    const auto result = sweep(instances, tiny_budget, 1e-6);
    // the symmetric instance reaches its fixed point slowly too; with one
    // iteration neither converges, but both reports exist
    REQUIRE(result.reports.size() == 2);
    for (const auto& r : result.reports) {
        CHECK_FALSE(r.pass);
        CHECK_FALSE(r.failure_reason.empty());
    }
}

TEST_CASE("duplicate instances produce identical reports") {
    SweepInstance instance{random_mdp(66, 4, 2, 0.8, -1.0, 1.0), RegularizerSpec::entropy(0.5)};
    const std::vector<SweepInstance> instances{instance, instance};
    const auto result = sweep(instances, SolveConfig{}, 1e-6);
    CHECK(result.reports[0].q_gap == result.reports[1].q_gap);
    CHECK(result.reports[0].policy_gap == result.reports[1].policy_gap);
    CHECK(result.reports[0].vi_iterations == result.reports[1].vi_iterations);
    CHECK(result.reports[0].spi_iterations == result.reports[1].spi_iterations);
}

TEST_CASE("sweep rejects an empty list") {
    CHECK_THROWS_AS(sweep({}, SolveConfig{}, 1e-6), std::invalid_argument);
}

TEST_CASE("max_total_variation is symmetric and bounded by 1") {
    Xoshiro256pp rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        const int A = 2 + static_cast<int>(rng.uniform01() * 4);
        const Policy a = random_positive_policy(rng.next(), 3, A);
        const Policy b = random_positive_policy(rng.next(), 3, A);
        const double tv = max_total_variation(a, b);
        CHECK(tv == max_total_variation(b, a));
        CHECK(tv >= 0.0);
        CHECK(tv <= 1.0 + 1e-15);
    }
    const Policy p = random_positive_policy(1, 2, 3);
    CHECK(max_total_variation(p, p) == 0.0);
}

TEST_CASE("build_random_suite is deterministic and respects its ranges") {
    SuiteParams params;
    params.count = 10;
    params.seed = 7;
    const auto a = build_random_suite(params);
    const auto b = build_random_suite(params);
    REQUIRE(a.size() == b.size());
    CHECK(a.size() == 10u * 4u * 2u);  // count x etas x {entropy, kl}
    for (size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].id == b[i].id);
        CHECK(a[i].instance.mdp.transitions == b[i].instance.mdp.transitions);
        CHECK(a[i].instance.mdp.num_states >= params.states_lo);
        CHECK(a[i].instance.mdp.num_states <= params.states_hi);
        CHECK(a[i].instance.mdp.num_actions >= params.actions_lo);
        CHECK(a[i].instance.mdp.num_actions <= params.actions_hi);
        CHECK(a[i].instance.mdp.gamma >= params.gamma_lo);
        CHECK(a[i].instance.mdp.gamma < params.gamma_hi);
        if (a[i].reg_name == "kl") {
            CHECK(validate_policy(a[i].instance.reg.prior, a[i].instance.mdp.num_states,
                                  a[i].instance.mdp.num_actions, true)
                      .ok());
        }
    }
}

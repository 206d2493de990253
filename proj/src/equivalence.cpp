#include "softmdp/equivalence.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <stdexcept>

#include "softmdp/rng.hpp"

namespace softmdp {

double max_total_variation(const Policy& a, const Policy& b) {
    double worst = 0.0;
    for (size_t s = 0; s < a.probs.size(); ++s) {
        double l1 = 0.0;
        for (size_t i = 0; i < a.probs[s].size(); ++i) {
            l1 += std::abs(a.probs[s][i] - b.probs[s][i]);
        }
        worst = std::max(worst, 0.5 * l1);
    }
    return worst;
}

EquivalenceReport check_equivalence(const TabularMdp& mdp, const RegularizerSpec& reg,
                                    const SolveConfig& config, double threshold) {
    if (reg.kind == RegKind::None) {
        throw std::invalid_argument("check_equivalence: requires an Entropy or KlToPrior regularizer");
    }
    if (!(threshold >= 0.0)) {
        throw std::invalid_argument("check_equivalence: threshold must be nonnegative");
    }

    const SolveReport vi = soft_value_iteration(mdp, reg, config);
    const SolveReport spi = soft_policy_iteration(mdp, reg, config);

    EquivalenceReport report;
    report.vi_iterations = vi.iterations;
    report.spi_iterations = spi.iterations;
    report.vi_converged = vi.converged;
    report.spi_converged = spi.converged;
    report.q_gap = sup_norm_diff(spi.fixed_point_q, vi.fixed_point_q);
    report.v_gap = sup_norm_diff(spi.fixed_point_v, vi.fixed_point_v);
    report.policy_gap = max_total_variation(spi.policy, vi.policy);
    for (int s = 0; s < mdp.num_states; ++s) {
        report.v_dominance_excess =
            std::max(report.v_dominance_excess, spi.fixed_point_v.v[s] - vi.fixed_point_v.v[s]);
    }

    if (!vi.converged || !spi.converged) {
        report.pass = false;
        report.failure_reason = !vi.converged ? "value iteration did not converge"
                                              : "policy iteration did not converge";
    } else {
        report.pass = report.q_gap <= threshold && report.policy_gap <= threshold;
        if (!report.pass) report.failure_reason = "gap above threshold";
    }
    return report;
}

std::vector<SuiteEntry> build_random_suite(const SuiteParams& params) {
    if (params.count < 1) throw std::invalid_argument("build_random_suite: count must be >= 1");
    if (params.states_lo < 1 || params.states_hi < params.states_lo || params.actions_lo < 1 ||
        params.actions_hi < params.actions_lo) {
        throw std::invalid_argument("build_random_suite: bad shape ranges");
    }
    if (!params.entropy && !params.kl) {
        throw std::invalid_argument("build_random_suite: no regularizer selected");
    }

    auto draw_int = [](Xoshiro256pp& rng, int lo, int hi) {
        const int span = hi - lo + 1;
        const int k = lo + static_cast<int>(rng.uniform01() * span);
        return std::min(k, hi);
    };
    auto eta_str = [](double eta) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", eta);
        return std::string(buf);
    };

    std::vector<SuiteEntry> out;
    for (int i = 0; i < params.count; ++i) {
        const uint64_t base_seed = derive_seed(params.seed, static_cast<uint64_t>(i));
        Xoshiro256pp shape_rng(base_seed);
        const int S = draw_int(shape_rng, params.states_lo, params.states_hi);
        const int A = draw_int(shape_rng, params.actions_lo, params.actions_hi);
        const double gamma = shape_rng.uniform(params.gamma_lo, params.gamma_hi);

        const TabularMdp mdp =
            random_mdp(derive_seed(base_seed, 1), S, A, gamma, params.reward_lo, params.reward_hi);
        const Policy prior = random_positive_policy(derive_seed(base_seed, 2), S, A);

        for (double eta : params.etas) {
            if (params.entropy) {
                SuiteEntry entry;
                entry.instance = {mdp, RegularizerSpec::entropy(eta)};
                entry.base_index = i;
                entry.eta = eta;
                entry.reg_name = "entropy";
                entry.id = "i" + std::to_string(i) + "-entropy-eta" + eta_str(eta);
                out.push_back(std::move(entry));
            }
            if (params.kl) {
                SuiteEntry entry;
                entry.instance = {mdp, RegularizerSpec::kl_to_prior(eta, prior)};
                entry.base_index = i;
                entry.eta = eta;
                entry.reg_name = "kl";
                entry.id = "i" + std::to_string(i) + "-kl-eta" + eta_str(eta);
                out.push_back(std::move(entry));
            }
        }
    }
    return out;
}

SweepResult sweep(std::span<const SweepInstance> instances, const SolveConfig& config,
                  double threshold) {
    if (instances.empty()) throw std::invalid_argument("sweep: empty instance list");

    SweepResult result;
    result.reports.reserve(instances.size());
    for (const auto& instance : instances) {
        EquivalenceReport report;
        try {
            report = check_equivalence(instance.mdp, instance.reg, config, threshold);
        } catch (const std::exception& e) {
            report.pass = false;
            report.failure_reason = e.what();
        }
        result.reports.push_back(std::move(report));
    }

    auto& s = result.summary;
    s.total = static_cast<int>(result.reports.size());
    for (const auto& r : result.reports) {
        if (r.pass) ++s.passed;
        s.max_q_gap = std::max(s.max_q_gap, r.q_gap);
        s.max_v_gap = std::max(s.max_v_gap, r.v_gap);
        s.max_policy_gap = std::max(s.max_policy_gap, r.policy_gap);
        s.max_vi_iterations = std::max(s.max_vi_iterations, r.vi_iterations);
        s.max_spi_iterations = std::max(s.max_spi_iterations, r.spi_iterations);
        s.total_vi_iterations += r.vi_iterations;
        s.total_spi_iterations += r.spi_iterations;
    }
    return result;
}

}  // namespace softmdp

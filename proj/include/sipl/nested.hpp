#pragma once

#include "sipl/model.hpp"

#include <span>
#include <vector>

namespace sipl {

/// Per-state distribution over one agent's own actions.
struct MixedStrategy {
    Agent agent = Agent::J;
    std::size_t num_states = 0;
    std::vector<double> probs;  // num_states x kNumActions

    double operator()(std::size_t s, int action) const { return probs[s * kNumActions + action]; }
    std::span<const double> row(std::size_t s) const { return {probs.data() + s * kNumActions, kNumActions}; }
};

/// Joint-action values, always laid out as (state, a_i * 6 + a_j).
struct QFunction {
    int horizon = 0;
    std::size_t num_states = 0;
    std::vector<double> values;

    double operator()(std::size_t s, int joint) const { return values[s * kNumJointActions + joint]; }
};

struct UtilityTable {
    std::vector<double> values;
};

struct ValueIterationResult {
    QFunction q;
    UtilityTable utility;
};

/// Nested reasoning setup: top level, level distribution, horizon, temperature.
struct NestedSpec {
    int top_level = 1;
    std::vector<double> level_dist{0.5, 0.5};
    int horizon = 1;
    double temperature = 1.0;

    /// Top level 1 with equal level weights and horizon 2N.
    static NestedSpec defaults_for(const TaskParameter& task);
};

void validate_nested_spec(const NestedSpec& spec);

MixedStrategy uniform_strategy(Agent agent, std::size_t num_states);
MixedStrategy level0_strategy(const FactoredModel& model, Agent agent = Agent::J);

/// Throws unless the strategy belongs to `agent`, covers the model's states
/// and every row is a distribution within 1e-9.
void check_strategy(const MixedStrategy& strategy, const FactoredModel& model, Agent agent);

/// max over own action of the opponent-weighted joint values.
UtilityTable marginal_utility(const QFunction& q, Agent self, const MixedStrategy& opponent);

/// One factorized Bellman backup from `utility` (the k-step values) to the
/// (k+1)-step Q and utility tables. Non-interactive pairs take the expectation
/// through the opponent's single-agent factor first, then through the
/// agent's own; interactive pairs through the joint table.
ValueIterationResult bellman_backup(const FactoredModel& model, const InteractionIndicator& x, Agent self,
                                    const MixedStrategy& opponent, const UtilityTable& utility, double gamma);

/// K backups from a zero utility table.
ValueIterationResult value_iteration(const FactoredModel& model, const InteractionIndicator& x, Agent self,
                                     const MixedStrategy& opponent, int horizon, double gamma);

/// Softmax over the opponent-marginalized Q of `self`.
MixedStrategy softmax_policy(const QFunction& q, Agent self, const MixedStrategy& opponent, double temperature);

/// Mixed strategy that agent i attributes to `modeled`: the level-weighted
/// mixture of level policies, where level 0 is uniform and level l solves the
/// modeled agent's MDP against the other agent's level l-1 policy.
MixedStrategy solve_nested(const FactoredModel& model, const NestedSpec& spec, Agent modeled = Agent::J);

}  // namespace sipl

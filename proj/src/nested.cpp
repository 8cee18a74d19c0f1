#include "sipl/nested.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace sipl {

NestedSpec NestedSpec::defaults_for(const TaskParameter& task) {
    NestedSpec spec;
    spec.horizon = 2 * task.n;
    return spec;
}

void validate_nested_spec(const NestedSpec& spec) {
    if (spec.top_level < 0) throw std::invalid_argument("nested top level must be nonnegative");
    if (spec.level_dist.size() != static_cast<std::size_t>(spec.top_level) + 1)
        throw std::invalid_argument("level distribution must have top_level + 1 entries");
    double total = 0.0;
    for (double p : spec.level_dist) {
        if (!(p >= 0.0)) throw std::invalid_argument("level probabilities must be nonnegative");
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("level distribution must sum to 1");
    if (spec.horizon < 1) throw std::invalid_argument("horizon K must be at least 1");
    if (!(spec.temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
}

MixedStrategy uniform_strategy(Agent agent, std::size_t num_states) {
    return {agent, num_states, std::vector<double>(num_states * kNumActions, 1.0 / kNumActions)};
}

MixedStrategy level0_strategy(const FactoredModel& model, Agent agent) {
    return uniform_strategy(agent, model.num_states());
}

void check_strategy(const MixedStrategy& strategy, const FactoredModel& model, Agent agent) {
    if (strategy.agent != agent) throw std::invalid_argument("strategy belongs to the wrong agent");
    if (strategy.num_states != model.num_states() || strategy.probs.size() != model.num_states() * kNumActions)
        throw std::invalid_argument("strategy shape does not match the model");
    for (std::size_t s = 0; s < strategy.num_states; ++s) {
        const auto row = strategy.row(s);
        const double sum = std::accumulate(row.begin(), row.end(), 0.0);
        if (std::abs(sum - 1.0) > 1e-9 || std::any_of(row.begin(), row.end(), [](double p) { return p < 0.0; }))
            throw std::invalid_argument("strategy row " + std::to_string(s) + " is not a distribution");
    }
}

namespace {

// Q(s, own action) with the opponent's action marginalized out.
void marginal_row(const QFunction& q, std::size_t s, Agent self, const MixedStrategy& opponent,
                  std::array<double, kNumActions>& out) {
    for (int own = 0; own < kNumActions; ++own) {
        double v = 0.0;
        for (int opp = 0; opp < kNumActions; ++opp) v += opponent(s, opp) * q(s, joint_index(self, own, opp));
        out[own] = v;
    }
}

}  // namespace

UtilityTable marginal_utility(const QFunction& q, Agent self, const MixedStrategy& opponent) {
    UtilityTable u;
    u.values.resize(q.num_states);
    std::array<double, kNumActions> row{};
    for (std::size_t s = 0; s < q.num_states; ++s) {
        marginal_row(q, s, self, opponent, row);
        u.values[s] = *std::max_element(row.begin(), row.end());
    }
    return u;
}

ValueIterationResult bellman_backup(const FactoredModel& model, const InteractionIndicator& x, Agent self,
                                    const MixedStrategy& opponent, const UtilityTable& utility, double gamma) {
    check_strategy(opponent, model, other(self));
    const std::size_t num_states = model.num_states();
    if (utility.values.size() != num_states) throw std::invalid_argument("utility table shape mismatch");
    const auto cells = static_cast<std::size_t>(model.space.num_cells());
    const auto& U = utility.values;

    // after_j[(s_i, s_j) * 6 + a_j] = sum_{s_j'} t_j(s_j, a_j, s_j') U(s_i, s_j')
    std::vector<double> after_j(num_states * kNumActions, 0.0);
    for (std::size_t ci = 0; ci < cells; ++ci) {
        for (std::size_t cj = 0; cj < cells; ++cj) {
            for (int aj = 0; aj < kNumActions; ++aj) {
                double v = 0.0;
                for (const auto& e : model.t_j.row(cj * kNumActions + aj)) v += e.prob * U[ci * cells + e.target];
                after_j[(ci * cells + cj) * kNumActions + aj] = v;
            }
        }
    }

    QFunction q{0, num_states, std::vector<double>(num_states * kNumJointActions)};
    const auto& t_int = model.interactive_transition(self);
    for (std::size_t s = 0; s < num_states; ++s) {
        const JointState js = model.space.decode(s);
        const std::size_t cj = static_cast<std::size_t>(js.pos_j);
        for (int joint = 0; joint < kNumJointActions; ++joint) {
            const JointAction a = JointAction::from_index(joint);
            const double reward = compose_reward(model, x, js, a, self);
            double future = 0.0;
            if (x.transition_active(model.space, js, a)) {
                for (const auto& e : t_int.row(s * kNumJointActions + joint)) future += e.prob * U[e.target];
            } else {
                for (const auto& e : model.t_i.row(static_cast<std::size_t>(js.pos_i) * kNumActions + a.a_i))
                    future += e.prob * after_j[(e.target * cells + cj) * kNumActions + a.a_j];
            }
            q.values[s * kNumJointActions + joint] = reward + gamma * future;
        }
    }
    UtilityTable next = marginal_utility(q, self, opponent);
    return {std::move(q), std::move(next)};
}

ValueIterationResult value_iteration(const FactoredModel& model, const InteractionIndicator& x, Agent self,
                                     const MixedStrategy& opponent, int horizon, double gamma) {
    if (horizon <= 0) throw std::invalid_argument("value iteration horizon must be at least 1");
    check_strategy(opponent, model, other(self));
    ValueIterationResult result;
    result.utility.values.assign(model.num_states(), 0.0);
    for (int k = 0; k < horizon; ++k) result = bellman_backup(model, x, self, opponent, result.utility, gamma);
    result.q.horizon = horizon;
    return result;
}

MixedStrategy softmax_policy(const QFunction& q, Agent self, const MixedStrategy& opponent, double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
    if (opponent.num_states != q.num_states) throw std::invalid_argument("strategy shape does not match Q");
    MixedStrategy out{self, q.num_states, std::vector<double>(q.num_states * kNumActions)};
    std::array<double, kNumActions> row{};
    for (std::size_t s = 0; s < q.num_states; ++s) {
        marginal_row(q, s, self, opponent, row);
        const double top = *std::max_element(row.begin(), row.end());
        double total = 0.0;
        for (double& v : row) {
            v = std::exp((v - top) / temperature);
            total += v;
        }
        for (int a = 0; a < kNumActions; ++a) out.probs[s * kNumActions + a] = row[a] / total;
    }
    return out;
}

namespace {

class LevelSolver {
public:
    LevelSolver(const FactoredModel& model, const NestedSpec& spec) : model_(model), spec_(spec) {}

    const MixedStrategy& policy(Agent agent, int level) {
        const auto key = std::make_pair(agent == Agent::I ? 0 : 1, level);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        MixedStrategy strategy;
        if (level == 0) {
            strategy = level0_strategy(model_, agent);
        } else {
            const MixedStrategy& lower = policy(other(agent), level - 1);
            const auto solved =
                value_iteration(model_, model_.indicator, agent, lower, spec_.horizon, model_.task.gamma);
            strategy = softmax_policy(solved.q, agent, lower, spec_.temperature);
        }
        return cache_.emplace(key, std::move(strategy)).first->second;
    }

private:
    const FactoredModel& model_;
    const NestedSpec& spec_;
    std::map<std::pair<int, int>, MixedStrategy> cache_;
};

}  // namespace

MixedStrategy solve_nested(const FactoredModel& model, const NestedSpec& spec, Agent modeled) {
    validate_nested_spec(spec);
    LevelSolver solver(model, spec);
    MixedStrategy mixture{modeled, model.num_states(), std::vector<double>(model.num_states() * kNumActions, 0.0)};
    for (int level = 0; level <= spec.top_level; ++level) {
        const double weight = spec.level_dist[level];
        if (weight == 0.0) continue;
        const MixedStrategy& pi = solver.policy(modeled, level);
        for (std::size_t k = 0; k < mixture.probs.size(); ++k) mixture.probs[k] += weight * pi.probs[k];
    }
    return mixture;
}

}  // namespace sipl

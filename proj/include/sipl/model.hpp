#pragma once

#include "sipl/task.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sipl {

/// Joint physical state: free-cell indices of both agents.
struct JointState {
    int pos_i = 0;
    int pos_j = 0;

    constexpr int own(Agent a) const { return a == Agent::I ? pos_i : pos_j; }
    auto operator<=>(const JointState&) const = default;
};

/// Enumerates free cells row-major and joint states as pos_i * F + pos_j.
class StateSpace {
public:
    StateSpace() = default;
    explicit StateSpace(const TaskParameter& task);

    int num_cells() const { return static_cast<int>(cells_.size()); }
    std::size_t num_states() const { return cells_.size() * cells_.size(); }

    Cell cell(int idx) const { return cells_[idx]; }
    /// Free-cell index of `c`, or -1 for obstacles and out-of-grid coordinates.
    int index_of(Cell c) const;

    std::size_t encode(JointState s) const {
        return static_cast<std::size_t>(s.pos_i) * cells_.size() + static_cast<std::size_t>(s.pos_j);
    }
    JointState decode(std::size_t s) const {
        return {static_cast<int>(s / cells_.size()), static_cast<int>(s % cells_.size())};
    }

    int grid_size() const { return n_; }

private:
    int n_ = 0;
    std::vector<Cell> cells_;
    std::vector<int> index_;
};

struct Successor {
    std::uint32_t target = 0;
    double prob = 0.0;
};

/// Row-compressed sparse distributions.
class SparseRows {
public:
    void push_row(std::span<const Successor> row);
    std::size_t num_rows() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }

    std::span<const Successor> row(std::size_t r) const {
        return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }
    std::span<Successor> row(std::size_t r) {
        return {entries_.data() + offsets_[r], offsets_[r + 1] - offsets_[r]};
    }
    /// Probability of `target` in row `r` (0 when absent).
    double prob(std::size_t r, std::uint32_t target) const;

private:
    std::vector<std::size_t> offsets_{0};
    std::vector<Successor> entries_;
};

enum class IndicatorMode { Radius, Never, Always };

struct IndicatorRule {
    IndicatorMode mode = IndicatorMode::Radius;
    int radius = 0;

    bool active(int distance) const {
        switch (mode) {
        case IndicatorMode::Never: return false;
        case IndicatorMode::Always: return true;
        default: return distance <= radius;
        }
    }
    bool operator==(const IndicatorRule&) const = default;
};

/// Membership test for the interactive set of joint state-action pairs.
/// Transition and reward rules are kept separately but every factory below
/// sets them equal.
struct InteractionIndicator {
    IndicatorRule transition;
    IndicatorRule reward;

    static InteractionIndicator with_radius(int radius);
    static InteractionIndicator never();
    static InteractionIndicator always();

    bool transition_active(const StateSpace& space, JointState s, JointAction a) const;
    bool reward_active(const StateSpace& space, JointState s, JointAction a) const;
};

/// Single-agent factors plus the interactive joint tables of one task.
///
/// Single-agent rows are indexed cell * kNumActions + own action; joint rows
/// by state * kNumJointActions + joint action index; observation rows by
/// (cell * kNumActions + a_i) * kNumObservations + code.
struct FactoredModel {
    TaskParameter task;
    StateSpace space;
    InteractionIndicator indicator;

    SparseRows t_i, t_j;
    std::vector<double> r_i, r_j;
    SparseRows t_int_i, t_int_j;
    std::vector<double> r_int_i, r_int_j;
    std::vector<double> o_i;

    std::size_t num_states() const { return space.num_states(); }

    const SparseRows& single_transition(Agent a) const { return a == Agent::I ? t_i : t_j; }
    const SparseRows& interactive_transition(Agent a) const { return a == Agent::I ? t_int_i : t_int_j; }
    double single_reward(Agent a, int cell, int action) const {
        return (a == Agent::I ? r_i : r_j)[cell * kNumActions + action];
    }
    double interactive_reward(Agent a, std::size_t s, int joint) const {
        return (a == Agent::I ? r_int_i : r_int_j)[s * kNumJointActions + joint];
    }
    double observation_prob(int cell, int a_i, int code) const {
        return o_i[(static_cast<std::size_t>(cell) * kNumActions + a_i) * kNumObservations + code];
    }
};

/// Noise-free observation code seen from `cell`.
int true_observation(const TaskParameter& task, Cell cell);

/// Materializes all tables. Throws InvalidTask for malformed tasks, including
/// a gold cell that no init-support cell of agent i can reach.
FactoredModel build_model(const TaskParameter& task);

/// Composed transition probability from the single-agent factors and the
/// interactive table of `perspective`, gated by the transition indicator.
double compose_transition(const FactoredModel& model, const InteractionIndicator& x, JointState s,
                          JointAction a, JointState next, Agent perspective = Agent::I);

/// Composed reward of `agent`, gated by the reward indicator.
double compose_reward(const FactoredModel& model, const InteractionIndicator& x, JointState s,
                      JointAction a, Agent agent);

struct ValidationReport {
    std::vector<std::string> issues;
    bool ok() const { return issues.empty(); }
};

/// Lists row-sum violations, negative entries, an unreachable gold cell and
/// indicator asymmetry. Uses the model's own indicator unless one is given.
ValidationReport validate_model(const FactoredModel& model);
ValidationReport validate_model(const FactoredModel& model, const InteractionIndicator& x);

}  // namespace sipl

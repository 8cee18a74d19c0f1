#include "sipl/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sipl {

StateSpace::StateSpace(const TaskParameter& task) : n_(task.n), index_(static_cast<std::size_t>(task.n) * task.n, -1) {
    for (int r = 0; r < task.n; ++r) {
        for (int c = 0; c < task.n; ++c) {
            if (!task.is_free({r, c})) continue;
            index_[r * task.n + c] = static_cast<int>(cells_.size());
            cells_.push_back({r, c});
        }
    }
}

int StateSpace::index_of(Cell c) const {
    if (c.row < 0 || c.col < 0 || c.row >= n_ || c.col >= n_) return -1;
    return index_[c.row * n_ + c.col];
}

void SparseRows::push_row(std::span<const Successor> row) {
    entries_.insert(entries_.end(), row.begin(), row.end());
    offsets_.push_back(entries_.size());
}

double SparseRows::prob(std::size_t r, std::uint32_t target) const {
    for (const auto& e : row(r)) {
        if (e.target == target) return e.prob;
    }
    return 0.0;
}

InteractionIndicator InteractionIndicator::with_radius(int radius) {
    IndicatorRule rule{IndicatorMode::Radius, radius};
    return {rule, rule};
}

InteractionIndicator InteractionIndicator::never() {
    IndicatorRule rule{IndicatorMode::Never, 0};
    return {rule, rule};
}

InteractionIndicator InteractionIndicator::always() {
    IndicatorRule rule{IndicatorMode::Always, 0};
    return {rule, rule};
}

bool InteractionIndicator::transition_active(const StateSpace& space, JointState s, JointAction) const {
    return transition.active(manhattan(space.cell(s.pos_i), space.cell(s.pos_j)));
}

bool InteractionIndicator::reward_active(const StateSpace& space, JointState s, JointAction) const {
    return reward.active(manhattan(space.cell(s.pos_i), space.cell(s.pos_j)));
}

int true_observation(const TaskParameter& task, Cell cell) {
    int code = 0;
    for (int a = North; a <= West; ++a) {
        if (task.blocked(cell, a)) code |= 1 << a;
    }
    if (cell == task.gold) code |= 1 << 4;
    return code;
}

namespace {

void add_mass(std::vector<Successor>& row, std::uint32_t target, double p) {
    for (auto& e : row) {
        if (e.target == target) {
            e.prob += p;
            return;
        }
    }
    row.push_back({target, p});
}

SparseRows single_agent_transitions(const TaskParameter& task, const StateSpace& space) {
    SparseRows rows;
    std::vector<Successor> row;
    for (int c = 0; c < space.num_cells(); ++c) {
        const Cell cell = space.cell(c);
        for (int a = 0; a < kNumActions; ++a) {
            row.clear();
            const auto here = static_cast<std::uint32_t>(c);
            if (is_move(a) && !task.blocked(cell, a)) {
                const auto target = static_cast<std::uint32_t>(space.index_of(shifted(cell, a)));
                if (task.move_success_prob > 0.0) add_mass(row, target, task.move_success_prob);
                if (task.move_success_prob < 1.0) add_mass(row, here, 1.0 - task.move_success_prob);
            } else {
                row.push_back({here, 1.0});
            }
            std::sort(row.begin(), row.end(), [](auto& x, auto& y) { return x.target < y.target; });
            rows.push_row(row);
        }
    }
    return rows;
}

std::vector<double> single_agent_rewards(const TaskParameter& task, const StateSpace& space) {
    std::vector<double> r(static_cast<std::size_t>(space.num_cells()) * kNumActions);
    for (int c = 0; c < space.num_cells(); ++c) {
        for (int a = 0; a < kNumActions; ++a) {
            double v = task.rewards.step;
            if (a == Open) v = space.cell(c) == task.gold ? task.rewards.open_gold : task.rewards.open_wrong;
            r[c * kNumActions + a] = v;
        }
    }
    return r;
}

std::vector<double> observation_table(const TaskParameter& task, const StateSpace& space) {
    std::vector<double> o(static_cast<std::size_t>(space.num_cells()) * kNumActions * kNumObservations);
    for (int c = 0; c < space.num_cells(); ++c) {
        const int truth = true_observation(task, space.cell(c));
        for (int a = 0; a < kNumActions; ++a) {
            const double noise = a == Listen ? task.obs_noise_listen : task.obs_noise_move;
            for (int code = 0; code < kNumObservations; ++code) {
                double p = 1.0;
                for (int bit = 0; bit < kNumObservationBits; ++bit) {
                    const bool flipped = ((code ^ truth) >> bit) & 1;
                    p *= flipped ? noise : 1.0 - noise;
                }
                o[(static_cast<std::size_t>(c) * kNumActions + a) * kNumObservations + code] = p;
            }
        }
    }
    return o;
}

}  // namespace

FactoredModel build_model(const TaskParameter& task) {
    validate_task(task);
    {
        const auto seen = reachable_from(task, task.gold);
        const bool any = std::any_of(task.init_i.begin(), task.init_i.end(),
                                     [&](Cell c) { return seen[c.row * task.n + c.col] != 0; });
        if (!any) throw InvalidTask("gold cell is unreachable from every init-support cell of agent i");
    }

    FactoredModel m;
    m.task = task;
    m.space = StateSpace(task);
    m.indicator = InteractionIndicator::with_radius(task.interaction_radius);
    m.t_i = single_agent_transitions(task, m.space);
    m.t_j = m.t_i;
    m.r_i = single_agent_rewards(task, m.space);
    m.r_j = m.r_i;
    m.o_i = observation_table(task, m.space);

    const int gold = m.space.index_of(task.gold);
    const std::size_t num_states = m.space.num_states();
    m.r_int_i.resize(num_states * kNumJointActions);
    m.r_int_j.resize(num_states * kNumJointActions);
    std::vector<Successor> row;
    for (std::size_t s = 0; s < num_states; ++s) {
        const JointState js = m.space.decode(s);
        for (int joint = 0; joint < kNumJointActions; ++joint) {
            const JointAction a = JointAction::from_index(joint);
            row.clear();
            for (const auto& mi : m.t_i.row(js.pos_i * kNumActions + a.a_i)) {
                for (const auto& mj : m.t_j.row(js.pos_j * kNumActions + a.a_j)) {
                    JointState next{static_cast<int>(mi.target), static_cast<int>(mj.target)};
                    // Both agents moving into the same cell: both moves fail.
                    if (next.pos_i == next.pos_j && next.pos_i != js.pos_i && next.pos_j != js.pos_j)
                        next = js;
                    add_mass(row, static_cast<std::uint32_t>(m.space.encode(next)), mi.prob * mj.prob);
                }
            }
            std::sort(row.begin(), row.end(), [](auto& x, auto& y) { return x.target < y.target; });
            m.t_int_i.push_row(row);

            double collision_prob = 0.0;
            for (const auto& e : row) {
                const JointState next = m.space.decode(e.target);
                if (next.pos_i == next.pos_j && next != js) collision_prob += e.prob;
            }
            const bool shared = a.a_i == Open && a.a_j == Open && js.pos_i == gold && js.pos_j == gold;
            const double base_i = shared ? task.rewards.shared_gold : m.r_i[js.pos_i * kNumActions + a.a_i];
            const double base_j = shared ? task.rewards.shared_gold : m.r_j[js.pos_j * kNumActions + a.a_j];
            m.r_int_i[s * kNumJointActions + joint] = base_i + task.rewards.collision * collision_prob;
            m.r_int_j[s * kNumJointActions + joint] = base_j + task.rewards.collision * collision_prob;
        }
    }
    m.t_int_j = m.t_int_i;
    return m;
}

double compose_transition(const FactoredModel& model, const InteractionIndicator& x, JointState s,
                          JointAction a, JointState next, Agent perspective) {
    if (x.transition_active(model.space, s, a)) {
        return model.interactive_transition(perspective)
            .prob(model.space.encode(s) * kNumJointActions + a.index(),
                  static_cast<std::uint32_t>(model.space.encode(next)));
    }
    const double pi = model.t_i.prob(s.pos_i * kNumActions + a.a_i, static_cast<std::uint32_t>(next.pos_i));
    const double pj = model.t_j.prob(s.pos_j * kNumActions + a.a_j, static_cast<std::uint32_t>(next.pos_j));
    return pi * pj;
}

double compose_reward(const FactoredModel& model, const InteractionIndicator& x, JointState s,
                      JointAction a, Agent agent) {
    if (x.reward_active(model.space, s, a)) {
        return model.interactive_reward(agent, model.space.encode(s), a.index());
    }
    return model.single_reward(agent, s.own(agent), a.own(agent));
}

namespace {

constexpr double kRowTolerance = 1e-12;

void check_rows(const SparseRows& rows, std::size_t expected_rows, const char* name,
                std::vector<std::string>& issues) {
    if (rows.num_rows() != expected_rows) {
        std::ostringstream os;
        os << name << ": expected " << expected_rows << " rows, found " << rows.num_rows();
        issues.push_back(os.str());
        return;
    }
    for (std::size_t r = 0; r < rows.num_rows(); ++r) {
        double sum = 0.0;
        for (const auto& e : rows.row(r)) {
            if (e.prob < 0.0) {
                std::ostringstream os;
                os << name << " row " << r << ": negative entry " << e.prob;
                issues.push_back(os.str());
            }
            sum += e.prob;
        }
        if (std::abs(sum - 1.0) > kRowTolerance) {
            std::ostringstream os;
            os.precision(17);
            os << name << " row " << r << ": sums to " << sum;
            issues.push_back(os.str());
        }
    }
}

}  // namespace

ValidationReport validate_model(const FactoredModel& model) { return validate_model(model, model.indicator); }

ValidationReport validate_model(const FactoredModel& model, const InteractionIndicator& x) {
    ValidationReport report;
    auto& issues = report.issues;
    const std::size_t cells = static_cast<std::size_t>(model.space.num_cells());
    const std::size_t states = model.num_states();

    check_rows(model.t_i, cells * kNumActions, "t_i", issues);
    check_rows(model.t_j, cells * kNumActions, "t_j", issues);
    check_rows(model.t_int_i, states * kNumJointActions, "t_int_i", issues);
    check_rows(model.t_int_j, states * kNumJointActions, "t_int_j", issues);

    if (model.o_i.size() != cells * kNumActions * kNumObservations) {
        issues.push_back("o_i: table has wrong size");
    } else {
        for (std::size_t r = 0; r < cells * kNumActions; ++r) {
            double sum = 0.0;
            bool negative = false;
            for (int code = 0; code < kNumObservations; ++code) {
                const double p = model.o_i[r * kNumObservations + code];
                negative = negative || p < 0.0;
                sum += p;
            }
            if (negative) issues.push_back("o_i row " + std::to_string(r) + ": negative entry");
            if (std::abs(sum - 1.0) > kRowTolerance) {
                std::ostringstream os;
                os.precision(17);
                os << "o_i row " << r << ": sums to " << sum;
                issues.push_back(os.str());
            }
        }
    }

    const auto& task = model.task;
    if (task.is_free(task.gold)) {
        const auto seen = reachable_from(task, task.gold);
        const bool any = std::any_of(task.init_i.begin(), task.init_i.end(), [&](Cell c) {
            return task.in_bounds(c) && seen[c.row * task.n + c.col] != 0;
        });
        if (!any) issues.push_back("gold cell unreachable from every init-support cell of agent i");
    } else {
        issues.push_back("gold cell is not free");
    }

    std::size_t asymmetric = 0;
    for (std::size_t s = 0; s < states; ++s) {
        const JointState js = model.space.decode(s);
        for (int joint = 0; joint < kNumJointActions; ++joint) {
            const JointAction a = JointAction::from_index(joint);
            if (x.transition_active(model.space, js, a) != x.reward_active(model.space, js, a)) ++asymmetric;
        }
    }
    if (asymmetric > 0) {
        issues.push_back("indicator asymmetry: transition and reward indicators differ on " +
                         std::to_string(asymmetric) + " state-action pairs");
    }
    return report;
}

}  // namespace sipl

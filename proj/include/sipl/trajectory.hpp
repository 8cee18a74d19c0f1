#pragma once

#include "sipl/array_io.hpp"
#include "sipl/belief.hpp"
#include "sipl/env.hpp"
#include "sipl/nested.hpp"
#include "sipl/planner.hpp"

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace sipl {

/// Everything the expert needs for one task, computed once and shared by
/// all episodes of that task.
struct TaskSolution {
    FactoredModel model;
    NestedSpec spec;
    MixedStrategy pi_hat_j;
    QFunction q_i;
};

TaskSolution solve_task(const TaskParameter& task, const NestedSpec& spec);
TaskSolution solve_task(const TaskParameter& task);

/// Writes Q_i (f64 [S, 36]), pi_hat_j (f64 [S, 6]) and a metadata vector
/// (i32: n, free cells, horizon, top level) as consecutive arrays.
void save_policy_dump(const std::filesystem::path& path, const TaskSolution& solution);

struct PolicyDump {
    NdArray q_i;
    NdArray pi_hat_j;
    NdArray meta;
};
PolicyDump load_policy_dump(const std::filesystem::path& path);

/// Agent i's decision rule inside a simulated episode.
class EpisodePolicy {
public:
    virtual ~EpisodePolicy() = default;
    virtual std::string name() const = 0;
    virtual void begin(const TaskSolution& solution) = 0;
    virtual int act(Rng& rng) = 0;
    virtual void observe(JointAction a, int observation) = 0;
};

/// Belief filter (joint action given) + argmax over belief-weighted Q values.
class ExpertPolicy : public EpisodePolicy {
public:
    explicit ExpertPolicy(ZeroLikelihoodPolicy on_zero = ZeroLikelihoodPolicy::Raise) : on_zero_(on_zero) {}

    std::string name() const override { return "expert"; }
    void begin(const TaskSolution& solution) override;
    int act(Rng& rng) override;
    void observe(JointAction a, int observation) override;

    const Belief& belief() const { return belief_; }
    /// Expert action for the current belief.
    int recommended() const;

private:
    ZeroLikelihoodPolicy on_zero_;
    const TaskSolution* solution_ = nullptr;
    Belief belief_;
};

class RandomPolicy : public EpisodePolicy {
public:
    std::string name() const override { return "random"; }
    void begin(const TaskSolution&) override {}
    int act(Rng& rng) override { return static_cast<int>(rng.below(kNumActions)); }
    void observe(JointAction, int) override {}
};

using PolicyFactory = std::function<std::unique_ptr<EpisodePolicy>()>;

/// "expert" or "random"; throws std::invalid_argument otherwise.
PolicyFactory policy_factory(const std::string& name);

struct StepRecord {
    int a_i = 0;
    int a_j = 0;
    int o_i = 0;
    int expert_next_a_i = 0;
};

struct TrajectoryRecord {
    int task_id = 0;
    std::vector<StepRecord> steps;
    bool success = false;
    double return_i = 0.0;
    int expert_agreement = 0;  // steps where a_i equalled the expert's choice

    int length() const { return static_cast<int>(steps.size()); }
};

/// One episode: i follows `policy`, j samples from the solution's pi_hat_j,
/// and an expert filter replays the joint actions to label every step.
TrajectoryRecord simulate_episode(const TaskSolution& solution, EpisodePolicy& policy, Rng& rng, int max_steps,
                                  int task_id = 0);

struct TaskMetrics {
    int task_id = 0;
    int episodes = 0;
    double success_rate = 0.0;
    double mean_return = 0.0;
    double mean_length = 0.0;
};

struct Metrics {
    std::string policy;
    int episodes = 0;
    double success_rate = 0.0;
    double success_rate_se = 0.0;
    double mean_return = 0.0;
    double return_se = 0.0;
    double mean_length = 0.0;
    double length_se = 0.0;
    std::optional<double> action_accuracy;
    std::vector<TaskMetrics> per_task;
};

Metrics summarize(const std::vector<TrajectoryRecord>& records, const std::string& policy_name);
nlohmann::json metrics_to_json(const Metrics& metrics);

/// Runs `episodes` seeded episodes per task. Episode (t, e) uses the stream
/// derived from (seed, t, e). max_steps <= 0 selects 4N per task.
Metrics evaluate_policy(const std::vector<TaskSolution>& tasks, const PolicyFactory& policy, int episodes,
                        std::uint64_t seed, int max_steps = 0);

/// Same episodes, but returns every record in (task, episode) order.
std::vector<TrajectoryRecord> run_episodes(const std::vector<TaskSolution>& tasks, const PolicyFactory& policy,
                                           int episodes, std::uint64_t seed, int max_steps = 0);

}  // namespace sipl

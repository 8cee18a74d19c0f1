#include "sipl/trajectory.hpp"

#include "sipl/parallel.hpp"

#include <cmath>
#include <fstream>
#include <map>

namespace sipl {

TaskSolution solve_task(const TaskParameter& task, const NestedSpec& spec) {
    TaskSolution sol;
    sol.model = build_model(task);
    sol.spec = spec;
    sol.pi_hat_j = solve_nested(sol.model, spec, Agent::J);
    sol.q_i = plan(sol.model, sol.pi_hat_j, spec.horizon);
    return sol;
}

TaskSolution solve_task(const TaskParameter& task) { return solve_task(task, NestedSpec::defaults_for(task)); }

void save_policy_dump(const std::filesystem::path& path, const TaskSolution& solution) {
    const auto states = static_cast<std::uint32_t>(solution.model.num_states());
    const std::vector<std::int32_t> meta{solution.model.task.n, solution.model.space.num_cells(),
                                         solution.q_i.horizon, solution.spec.top_level};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open " + path.string() + " for writing");
    write_array(out, NdArray::from<double>({states, kNumJointActions}, solution.q_i.values));
    write_array(out, NdArray::from<double>({states, kNumActions}, solution.pi_hat_j.probs));
    write_array(out, NdArray::from<std::int32_t>({static_cast<std::uint32_t>(meta.size())}, meta));
}

PolicyDump load_policy_dump(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open " + path.string());
    PolicyDump dump;
    dump.q_i = read_array(in);
    dump.pi_hat_j = read_array(in);
    dump.meta = read_array(in);
    return dump;
}

void ExpertPolicy::begin(const TaskSolution& solution) {
    solution_ = &solution;
    belief_ = initial_belief(solution.model);
}

int ExpertPolicy::recommended() const {
    Rng unused(0);
    return select_action(action_values(solution_->q_i, belief_, solution_->pi_hat_j), Selection::argmax(), unused);
}

int ExpertPolicy::act(Rng&) { return recommended(); }

void ExpertPolicy::observe(JointAction a, int observation) {
    belief_ = update(belief_, solution_->model, solution_->model.indicator, a, observation, on_zero_);
}

PolicyFactory policy_factory(const std::string& name) {
    if (name == "expert") return [] { return std::make_unique<ExpertPolicy>(); };
    if (name == "random") return [] { return std::make_unique<RandomPolicy>(); };
    throw std::invalid_argument("unknown policy '" + name + "' (expected expert or random)");
}

TrajectoryRecord simulate_episode(const TaskSolution& solution, EpisodePolicy& policy, Rng& rng, int max_steps,
                                  int task_id) {
    const auto& model = solution.model;
    ExpertPolicy labeler;
    labeler.begin(solution);
    policy.begin(solution);

    TrajectoryRecord rec;
    rec.task_id = task_id;
    EpisodeState es = start_episode(model, rng, max_steps);
    while (!es.done) {
        const int expert_choice = labeler.recommended();
        const int a_i = policy.act(rng);
        if (a_i == expert_choice) ++rec.expert_agreement;
        const int a_j = static_cast<int>(rng.categorical(solution.pi_hat_j.row(model.space.encode(es.state))));
        const JointAction a{a_i, a_j};
        es = step(es, model, a, rng);
        const int o = observe(model, es.state, a_i, rng);
        labeler.observe(a, o);
        policy.observe(a, o);
        rec.steps.push_back({a_i, a_j, o, labeler.recommended()});
    }
    rec.success = es.success;
    rec.return_i = es.return_i;
    return rec;
}

namespace {

struct MeanSe {
    double mean = 0.0;
    double se = 0.0;
};

MeanSe mean_se(const std::vector<double>& xs) {
    MeanSe out;
    if (xs.empty()) return out;
    for (double x : xs) out.mean += x;
    out.mean /= static_cast<double>(xs.size());
    if (xs.size() > 1) {
        double ss = 0.0;
        for (double x : xs) ss += (x - out.mean) * (x - out.mean);
        out.se = std::sqrt(ss / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
    }
    return out;
}

}  // namespace

Metrics summarize(const std::vector<TrajectoryRecord>& records, const std::string& policy_name) {
    Metrics m;
    m.policy = policy_name;
    m.episodes = static_cast<int>(records.size());
    std::vector<double> success, returns, lengths;
    long agree = 0, steps = 0;
    std::map<int, std::vector<const TrajectoryRecord*>> by_task;
    for (const auto& r : records) {
        success.push_back(r.success ? 1.0 : 0.0);
        returns.push_back(r.return_i);
        lengths.push_back(r.length());
        agree += r.expert_agreement;
        steps += r.length();
        by_task[r.task_id].push_back(&r);
    }
    const auto s = mean_se(success), ret = mean_se(returns), len = mean_se(lengths);
    m.success_rate = s.mean;
    m.success_rate_se = s.se;
    m.mean_return = ret.mean;
    m.return_se = ret.se;
    m.mean_length = len.mean;
    m.length_se = len.se;
    if (steps > 0) m.action_accuracy = static_cast<double>(agree) / static_cast<double>(steps);
    for (const auto& [task_id, recs] : by_task) {
        TaskMetrics t;
        t.task_id = task_id;
        t.episodes = static_cast<int>(recs.size());
        for (const auto* r : recs) {
            t.success_rate += r->success ? 1.0 : 0.0;
            t.mean_return += r->return_i;
            t.mean_length += r->length();
        }
        t.success_rate /= t.episodes;
        t.mean_return /= t.episodes;
        t.mean_length /= t.episodes;
        m.per_task.push_back(t);
    }
    return m;
}

nlohmann::json metrics_to_json(const Metrics& m) {
    nlohmann::json per_task = nlohmann::json::array();
    for (const auto& t : m.per_task) {
        per_task.push_back({{"task_id", t.task_id},
                            {"episodes", t.episodes},
                            {"success_rate", t.success_rate},
                            {"mean_return", t.mean_return},
                            {"mean_length", t.mean_length}});
    }
    nlohmann::json j{{"policy", m.policy},
                     {"episodes", m.episodes},
                     {"success_rate", m.success_rate},
                     {"success_rate_se", m.success_rate_se},
                     {"mean_return", m.mean_return},
                     {"return_se", m.return_se},
                     {"mean_length", m.mean_length},
                     {"length_se", m.length_se},
                     {"per_task", std::move(per_task)}};
    j["action_accuracy"] = m.action_accuracy ? nlohmann::json(*m.action_accuracy) : nlohmann::json(nullptr);
    return j;
}

std::vector<TrajectoryRecord> run_episodes(const std::vector<TaskSolution>& tasks, const PolicyFactory& policy,
                                           int episodes, std::uint64_t seed, int max_steps) {
    if (episodes <= 0) throw std::invalid_argument("episode count must be positive");
    if (tasks.empty()) throw std::invalid_argument("no tasks to evaluate");
    const std::size_t per_task = static_cast<std::size_t>(episodes);
    std::vector<TrajectoryRecord> records(tasks.size() * per_task);
    parallel_for(records.size(), [&](std::size_t k) {
        const std::size_t t = k / per_task, e = k % per_task;
        const auto& sol = tasks[t];
        Rng rng = Rng::derive(seed, t, e);
        auto p = policy();
        const int cap = max_steps > 0 ? max_steps : default_max_steps(sol.model.task);
        records[k] = simulate_episode(sol, *p, rng, cap, static_cast<int>(t));
    });
    return records;
}

Metrics evaluate_policy(const std::vector<TaskSolution>& tasks, const PolicyFactory& policy, int episodes,
                        std::uint64_t seed, int max_steps) {
    const auto records = run_episodes(tasks, policy, episodes, seed, max_steps);
    return summarize(records, policy()->name());
}

}  // namespace sipl

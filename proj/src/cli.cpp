#include "sipl/cli.hpp"

#include "sipl/dataset.hpp"
#include "sipl/parallel.hpp"
#include "sipl/trajectory.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

namespace sipl::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public Error {
public:
    using Error::Error;
};

void write_json(const std::string& path, const json& j) {
    if (path.empty()) return;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw Error("failed writing " + path);
}

/// Task files of a directory in filename order, skipping index.json.
std::vector<fs::path> task_files(const fs::path& dir) {
    if (!fs::is_directory(dir)) throw Error(dir.string() + " is not a directory");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".json" && entry.path().filename() != "index.json")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Error("no task files in " + dir.string());
    return files;
}

std::vector<TaskSolution> solve_all(const std::vector<TaskParameter>& tasks) {
    std::vector<TaskSolution> out(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t k) { out[k] = solve_task(tasks[k]); });
    return out;
}

SplitFractions parse_split(const std::string& text) {
    std::vector<double> parts;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            parts.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw UsageError("--split expects three comma-separated fractions, got '" + text + "'");
        }
    }
    if (parts.size() != 3) throw UsageError("--split expects train,valid,test fractions");
    SplitFractions f{parts[0], parts[1], parts[2]};
    if (f.train < 0 || f.valid < 0 || f.test < 0 || std::abs(f.train + f.valid + f.test - 1.0) > 1e-9)
        throw UsageError("--split fractions must be nonnegative and sum to 1");
    return f;
}

std::string fmt_metrics(const Metrics& m) {
    std::ostringstream os;
    os << std::fixed << std::setprecision(4);
    os << "policy " << m.policy << ": " << m.episodes << " episodes, success " << m.success_rate << " ± "
       << m.success_rate_se << ", return " << m.mean_return << " ± " << m.return_se << ", length " << m.mean_length;
    if (m.action_accuracy) os << ", expert agreement " << *m.action_accuracy;
    return os.str();
}

json record_json(const TrajectoryRecord& rec) {
    json steps = json::array();
    for (const auto& s : rec.steps) {
        steps.push_back({{"a_i", s.a_i}, {"a_j", s.a_j}, {"o_i", s.o_i}, {"expert_next_a_i", s.expert_next_a_i}});
    }
    return {{"task_id", rec.task_id},
            {"length", rec.length()},
            {"success", rec.success},
            {"return_i", rec.return_i},
            {"steps", std::move(steps)}};
}

struct GenTasksArgs {
    int n = 0;
    int count = 0;
    double density = 0.25;
    std::uint64_t seed = 0;
    std::string out;
};

struct SolveArgs {
    std::string task;
    int level = 1;
    int horizon = 0;
    std::string out;
};

struct SimulateArgs {
    std::string task;
    std::string policy = "expert";
    std::uint64_t seed = 0;
    int max_steps = 0;
};

struct DatasetArgs {
    std::string tasks;
    int episodes = 0;
    std::uint64_t seed = 0;
    std::string out;
    std::string split = "0.8,0.1,0.1";
};

struct EvaluateArgs {
    std::string tasks;
    std::string policy = "expert";
    int episodes = 0;
    std::uint64_t seed = 0;
};

constexpr int kDefaultBeliefSupport = 3;

int gen_tasks(const GenTasksArgs& a, const std::string& json_out, std::ostream& out) {
    const auto specs = generate(a.seed, a.n, a.count, a.density, kDefaultBeliefSupport);
    fs::create_directories(a.out);
    json index_tasks = json::array();
    for (std::size_t k = 0; k < specs.size(); ++k) {
        std::ostringstream name;
        name << std::setw(3) << std::setfill('0') << k << ".json";
        save_task(specs[k].task, fs::path(a.out) / name.str());
        index_tasks.push_back({{"file", name.str()}, {"seed", specs[k].seed}});
    }
    const json index{{"seed", a.seed},
                     {"n", a.n},
                     {"count", a.count},
                     {"obstacle_density", a.density},
                     {"belief_support_size", kDefaultBeliefSupport},
                     {"tasks", std::move(index_tasks)}};
    std::ofstream idx(fs::path(a.out) / "index.json", std::ios::binary);
    idx << index.dump(2) << '\n';
    if (!idx) throw Error("failed writing index.json");
    out << "wrote " << specs.size() << " tasks to " << a.out << "\n";
    write_json(json_out, index);
    return kExitOk;
}

int solve(const SolveArgs& a, const std::string& json_out, std::ostream& out) {
    const TaskParameter task = load_task(a.task);
    NestedSpec spec = NestedSpec::defaults_for(task);
    spec.top_level = a.level;
    spec.level_dist.assign(static_cast<std::size_t>(a.level) + 1, 1.0 / (a.level + 1));
    if (a.horizon > 0) spec.horizon = a.horizon;
    const TaskSolution sol = solve_task(task, spec);
    save_policy_dump(a.out, sol);

    ExpertPolicy expert;
    expert.begin(sol);
    const int first = expert.recommended();
    const auto values = action_values(sol.q_i, expert.belief(), sol.pi_hat_j);
    double q_max = 0.0;
    for (double v : sol.q_i.values) q_max = std::max(q_max, std::abs(v));

    out << "solved " << a.task << ": " << sol.model.num_states() << " joint states, level " << spec.top_level
        << ", horizon " << spec.horizon << "\n";
    out << "first expert action: " << action_name(first) << "\n";
    out << "policy written to " << a.out << "\n";
    write_json(json_out, {{"task", a.task},
                          {"states", sol.model.num_states()},
                          {"level", spec.top_level},
                          {"horizon", spec.horizon},
                          {"max_abs_q", q_max},
                          {"initial_action_values", values.q},
                          {"first_action", first},
                          {"policy", a.out}});
    return kExitOk;
}

int simulate(const SimulateArgs& a, const std::string& json_out, std::ostream& out) {
    const TaskParameter task = load_task(a.task);
    const TaskSolution sol = solve_task(task);
    auto policy = policy_factory(a.policy)();
    Rng rng = Rng::derive(a.seed, 0, 0);
    const int cap = a.max_steps > 0 ? a.max_steps : default_max_steps(task);
    const auto rec = simulate_episode(sol, *policy, rng, cap);
    for (std::size_t t = 0; t < rec.steps.size(); ++t) {
        const auto& s = rec.steps[t];
        out << "t=" << t << " a_i=" << action_name(s.a_i) << " a_j=" << action_name(s.a_j) << " o_i=" << s.o_i
            << " expert_next=" << action_name(s.expert_next_a_i) << "\n";
    }
    out << (rec.success ? "success" : "failure") << ", discounted return " << rec.return_i << "\n";
    write_json(json_out, record_json(rec));
    return kExitOk;
}

int gen_dataset(const DatasetArgs& a, const std::string& json_out, std::ostream& out) {
    const SplitFractions fractions = parse_split(a.split);
    std::vector<TaskParameter> tasks;
    for (const auto& f : task_files(a.tasks)) tasks.push_back(load_task(f));
    const auto manifest = build_dataset(tasks, a.episodes, a.seed, a.out, fractions);
    out << "wrote " << manifest.records << " records from " << tasks.size() << " tasks to " << a.out << "\n";
    for (const auto& [name, ids] : manifest.splits) out << "  " << name << ": " << ids.size() << " tasks\n";
    write_json(json_out, manifest.to_json());
    return kExitOk;
}

int evaluate(const EvaluateArgs& a, const std::string& json_out, std::ostream& out) {
    const auto factory = policy_factory(a.policy);
    std::vector<TaskParameter> tasks;
    for (const auto& f : task_files(a.tasks)) tasks.push_back(load_task(f));
    const auto metrics = evaluate_policy(solve_all(tasks), factory, a.episodes, a.seed);
    out << fmt_metrics(metrics) << "\n";
    write_json(json_out, metrics_to_json(metrics));
    return kExitOk;
}

int check(const std::string& path, const std::string& json_out, std::ostream& out) {
    const TaskParameter task = load_task(path);
    const FactoredModel model = build_model(task);
    const auto report = validate_model(model);
    if (report.ok()) {
        out << path << ": model valid (" << model.num_states() << " joint states)\n";
    } else {
        out << path << ": " << report.issues.size() << " issue(s)\n";
        for (const auto& issue : report.issues) out << "  " << issue << "\n";
    }
    write_json(json_out, {{"task", path}, {"valid", report.ok()}, {"issues", report.issues}});
    return report.ok() ? kExitOk : kExitRuntime;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Two-agent I-POMDP Lite toolkit for sparse-interaction Tiger-grids", "sipl"};
    app.require_subcommand(1);
    std::string json_out;

    GenTasksArgs gt;
    auto* gen_cmd = app.add_subcommand("gen-tasks", "Generate random Tiger-grid tasks");
    gen_cmd->add_option("--n", gt.n, "Grid size N")->required()->check(CLI::Range(3, 64));
    gen_cmd->add_option("--count", gt.count, "Number of tasks")->required()->check(CLI::NonNegativeNumber);
    gen_cmd->add_option("--obstacle-density", gt.density, "Obstacle fraction in [0, 0.35]")
        ->check(CLI::Range(0.0, kMaxObstacleDensity))
        ->capture_default_str();
    gen_cmd->add_option("--seed", gt.seed, "Master seed")->required();
    gen_cmd->add_option("--out", gt.out, "Output directory")->required();
    gen_cmd->add_option("--json-out", json_out, "Write the task index as JSON");

    SolveArgs sv;
    auto* solve_cmd = app.add_subcommand("solve", "Solve a task and dump the expert policy");
    solve_cmd->add_option("--task", sv.task, "Task JSON file")->required()->check(CLI::ExistingFile);
    solve_cmd->add_option("--level", sv.level, "Top nested reasoning level")
        ->check(CLI::Range(0, 16))
        ->capture_default_str();
    solve_cmd->add_option("--horizon", sv.horizon, "Value-iteration horizon K (default 2N)")
        ->check(CLI::PositiveNumber);
    solve_cmd->add_option("--out", sv.out, "Policy dump path")->required();
    solve_cmd->add_option("--json-out", json_out, "Write a solve summary as JSON");

    SimulateArgs sm;
    auto* sim_cmd = app.add_subcommand("simulate", "Simulate one episode on a task");
    sim_cmd->add_option("--task", sm.task, "Task JSON file")->required()->check(CLI::ExistingFile);
    sim_cmd->add_option("--policy", sm.policy, "Agent i policy")
        ->check(CLI::IsMember({"expert", "random"}))
        ->capture_default_str();
    sim_cmd->add_option("--seed", sm.seed, "Episode seed")->capture_default_str();
    sim_cmd->add_option("--max-steps", sm.max_steps, "Step cap (default 4N)")->check(CLI::PositiveNumber);
    sim_cmd->add_option("--json-out", json_out, "Write the trajectory as JSON");

    DatasetArgs ds;
    auto* ds_cmd = app.add_subcommand("gen-dataset", "Write an expert trajectory dataset");
    ds_cmd->add_option("--tasks", ds.tasks, "Directory of task JSON files")->required()->check(CLI::ExistingDirectory);
    ds_cmd->add_option("--episodes-per-task", ds.episodes, "Episodes per task")->required()->check(CLI::PositiveNumber);
    ds_cmd->add_option("--seed", ds.seed, "Master seed")->required();
    ds_cmd->add_option("--out", ds.out, "Output dataset directory")->required();
    ds_cmd->add_option("--split", ds.split, "train,valid,test fractions over tasks")->capture_default_str();
    ds_cmd->add_option("--json-out", json_out, "Write the manifest as JSON");

    EvaluateArgs ev;
    auto* ev_cmd = app.add_subcommand("evaluate", "Evaluate a policy over a task set");
    ev_cmd->add_option("--tasks", ev.tasks, "Directory of task JSON files")->required()->check(CLI::ExistingDirectory);
    ev_cmd->add_option("--policy", ev.policy, "Agent i policy")
        ->check(CLI::IsMember({"expert", "random"}))
        ->capture_default_str();
    ev_cmd->add_option("--episodes", ev.episodes, "Episodes per task")->required()->check(CLI::PositiveNumber);
    ev_cmd->add_option("--seed", ev.seed, "Master seed")->required();
    ev_cmd->add_option("--json-out", json_out, "Write metrics as JSON");

    std::string check_task;
    auto* check_cmd = app.add_subcommand("check", "Validate the model built from a task");
    check_cmd->add_option("--task", check_task, "Task JSON file")->required()->check(CLI::ExistingFile);
    check_cmd->add_option("--json-out", json_out, "Write the validation report as JSON");

    std::vector<const char*> argv;
    argv.reserve(args.size());
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitUsage;
    }

    try {
        if (gen_cmd->parsed()) return gen_tasks(gt, json_out, out);
        if (solve_cmd->parsed()) return solve(sv, json_out, out);
        if (sim_cmd->parsed()) return simulate(sm, json_out, out);
        if (ds_cmd->parsed()) return gen_dataset(ds, json_out, out);
        if (ev_cmd->parsed()) return evaluate(ev, json_out, out);
        if (check_cmd->parsed()) return check(check_task, json_out, out);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

}  // namespace sipl::cli

#include "sipl/dataset.hpp"

#include "sipl/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>

namespace sipl {

namespace fs = std::filesystem;
using nlohmann::json;

nlohmann::json DatasetManifest::to_json() const {
    json arrays_json = json::array();
    for (const auto& a : arrays) {
        arrays_json.push_back({{"name", a.name}, {"file", a.file}, {"dtype", dtype_name(a.dtype)}, {"shape", a.shape}});
    }
    return json{{"version", version},
                {"tasks", tasks},
                {"splits", splits},
                {"arrays", std::move(arrays_json)},
                {"seeds", {{"master", master_seed}, {"episodes_per_task", episodes_per_task}}},
                {"env_defaults", env_defaults},
                {"records", records}};
}

DatasetManifest DatasetManifest::from_json(const nlohmann::json& j) {
    DatasetManifest m;
    try {
        m.version = j.at("version").get<int>();
        m.tasks = j.at("tasks").get<std::vector<std::string>>();
        m.splits = j.at("splits").get<std::map<std::string, std::vector<int>>>();
        for (const auto& a : j.at("arrays")) {
            ArrayEntry e;
            e.name = a.at("name").get<std::string>();
            e.file = a.at("file").get<std::string>();
            const auto dtype = a.at("dtype").get<std::string>();
            bool known = false;
            for (auto d : {DType::F64, DType::F32, DType::I32, DType::U8}) {
                if (dtype_name(d) == dtype) {
                    e.dtype = d;
                    known = true;
                }
            }
            if (!known) throw FormatError("unknown dtype '" + dtype + "' in manifest");
            e.shape = a.at("shape").get<std::vector<std::uint32_t>>();
            m.arrays.push_back(std::move(e));
        }
        m.master_seed = j.at("seeds").at("master").get<std::uint64_t>();
        m.episodes_per_task = j.at("seeds").at("episodes_per_task").get<int>();
        m.env_defaults = j.at("env_defaults");
        m.records = j.value("records", 0);
    } catch (const json::exception& e) {
        throw FormatError(std::string("malformed manifest: ") + e.what());
    }
    return m;
}

std::map<std::string, std::vector<int>> split_tasks(int num_tasks, const SplitFractions& f, std::uint64_t seed) {
    if (f.train < 0 || f.valid < 0 || f.test < 0 || std::abs(f.train + f.valid + f.test - 1.0) > 1e-9)
        throw std::invalid_argument("split fractions must be nonnegative and sum to 1");
    std::vector<int> ids(num_tasks);
    std::iota(ids.begin(), ids.end(), 0);
    Rng rng = Rng::derive(seed, 0x53504c4954ULL);  // "SPLIT"
    for (int k = num_tasks - 1; k > 0; --k) std::swap(ids[k], ids[rng.below(static_cast<std::size_t>(k) + 1)]);
    const int n_test = static_cast<int>(std::lround(f.test * num_tasks));
    const int n_valid = std::min(num_tasks - n_test, static_cast<int>(std::lround(f.valid * num_tasks)));
    std::map<std::string, std::vector<int>> out;
    out["test"].assign(ids.begin(), ids.begin() + n_test);
    out["valid"].assign(ids.begin() + n_test, ids.begin() + n_test + n_valid);
    out["train"].assign(ids.begin() + n_test + n_valid, ids.end());
    for (auto& [_, v] : out) std::sort(v.begin(), v.end());
    return out;
}

namespace {

std::string task_file_name(int id, int count) {
    const int width = std::max<int>(3, static_cast<int>(std::to_string(std::max(count - 1, 0)).size()));
    std::string digits = std::to_string(id);
    return std::string(static_cast<std::size_t>(std::max<int>(0, width - static_cast<int>(digits.size()))), '0') +
           digits + ".json";
}

class ArrayWriter {
public:
    ArrayWriter(const fs::path& dir, DatasetManifest& manifest) : dir_(dir), manifest_(manifest) {}

    template <typename T>
    void write(const std::string& name, std::vector<std::uint32_t> shape, const std::vector<T>& values) {
        const std::string file = name + ".bin";
        auto array = NdArray::from<T>(shape, values);
        save_array(dir_ / file, array);
        manifest_.arrays.push_back({name, file, array.dtype, std::move(shape)});
    }

private:
    fs::path dir_;
    DatasetManifest& manifest_;
};

void write_dataset(const std::vector<TaskParameter>& tasks, int episodes_per_task, std::uint64_t master_seed,
                   const fs::path& out_dir, const SplitFractions& fractions, DatasetManifest& manifest) {
    const int n = tasks.front().n;
    std::vector<TaskSolution> solutions(tasks.size());
    parallel_for(tasks.size(), [&](std::size_t t) { solutions[t] = solve_task(tasks[t]); });
    const auto records = run_episodes(solutions, policy_factory("expert"), episodes_per_task, master_seed);

    fs::create_directories(out_dir / "tasks");
    const int num_tasks = static_cast<int>(tasks.size());
    for (int t = 0; t < num_tasks; ++t) {
        const std::string rel = "tasks/" + task_file_name(t, num_tasks);
        save_task(tasks[t], out_dir / rel);
        manifest.tasks.push_back(rel);
    }
    manifest.splits = split_tasks(num_tasks, fractions, master_seed);

    const auto num_records = static_cast<std::uint32_t>(records.size());
    std::uint32_t max_len = 0;
    for (const auto& r : records) max_len = std::max<std::uint32_t>(max_len, static_cast<std::uint32_t>(r.length()));

    std::vector<std::int32_t> task_id, length;
    std::vector<std::uint8_t> success;
    std::vector<double> returns;
    const std::size_t padded = static_cast<std::size_t>(num_records) * max_len;
    std::vector<std::int32_t> act_i(padded, kPadCode), act_j(padded, kPadCode), obs(padded, kPadCode),
        expert(padded, kPadCode);
    for (std::size_t r = 0; r < records.size(); ++r) {
        const auto& rec = records[r];
        task_id.push_back(rec.task_id);
        length.push_back(rec.length());
        success.push_back(rec.success ? 1 : 0);
        returns.push_back(rec.return_i);
        for (std::size_t t = 0; t < rec.steps.size(); ++t) {
            const std::size_t k = r * max_len + t;
            act_i[k] = rec.steps[t].a_i;
            act_j[k] = rec.steps[t].a_j;
            obs[k] = rec.steps[t].o_i;
            expert[k] = rec.steps[t].expert_next_a_i;
        }
    }

    const auto un = static_cast<std::uint32_t>(n);
    const auto ut = static_cast<std::uint32_t>(num_tasks);
    std::vector<std::uint8_t> grid;
    std::vector<std::int32_t> gold;
    std::vector<double> belief_i(static_cast<std::size_t>(num_tasks) * n * n, 0.0), belief_j(belief_i.size(), 0.0);
    for (int t = 0; t < num_tasks; ++t) {
        const auto& task = tasks[t];
        grid.insert(grid.end(), task.obstacles.begin(), task.obstacles.end());
        gold.push_back(task.gold.row);
        gold.push_back(task.gold.col);
        for (Cell c : task.init_i)
            belief_i[static_cast<std::size_t>(t) * n * n + c.row * n + c.col] = 1.0 / task.init_i.size();
        for (Cell c : task.init_j)
            belief_j[static_cast<std::size_t>(t) * n * n + c.row * n + c.col] = 1.0 / task.init_j.size();
    }

    ArrayWriter out(out_dir, manifest);
    out.write("task_id", {num_records}, task_id);
    out.write("length", {num_records}, length);
    out.write("success", {num_records}, success);
    out.write("return_i", {num_records}, returns);
    out.write("action_i", {num_records, max_len}, act_i);
    out.write("action_j", {num_records, max_len}, act_j);
    out.write("observation_i", {num_records, max_len}, obs);
    out.write("expert_next_action_i", {num_records, max_len}, expert);
    out.write("grid", {ut, un, un}, grid);
    out.write("gold", {ut, 2}, gold);
    out.write("init_belief_i", {ut, un, un}, belief_i);
    out.write("init_belief_j", {ut, un, un}, belief_j);

    const NestedSpec spec = NestedSpec::defaults_for(tasks.front());
    manifest.records = static_cast<int>(num_records);
    manifest.env_defaults = {{"n", n},
                             {"max_steps", default_max_steps(tasks.front())},
                             {"horizon", spec.horizon},
                             {"top_level", spec.top_level},
                             {"level_dist", spec.level_dist},
                             {"nested_temperature", spec.temperature},
                             {"expert_selection", "argmax"},
                             {"pad_code", kPadCode}};

    std::ofstream mf(out_dir / "manifest.json", std::ios::binary);
    if (!mf) throw Error("cannot write manifest.json");
    mf << manifest.to_json().dump(2) << '\n';
    if (!mf) throw Error("failed writing manifest.json");
}

}  // namespace

DatasetManifest build_dataset(const std::vector<TaskParameter>& tasks, int episodes_per_task,
                              std::uint64_t master_seed, const fs::path& out_dir, const SplitFractions& fractions) {
    if (tasks.empty()) throw std::invalid_argument("dataset needs at least one task");
    if (episodes_per_task <= 0) throw std::invalid_argument("episodes per task must be positive");
    for (const auto& t : tasks) {
        if (t.n != tasks.front().n) throw std::invalid_argument("all dataset tasks must share the grid size");
    }
    split_tasks(static_cast<int>(tasks.size()), fractions, master_seed);  // validates fractions
    if (fs::exists(out_dir) && !(fs::is_directory(out_dir) && fs::is_empty(out_dir)))
        throw Error("output directory " + out_dir.string() + " exists and is not empty");

    DatasetManifest manifest;
    manifest.master_seed = master_seed;
    manifest.episodes_per_task = episodes_per_task;
    try {
        fs::create_directories(out_dir);
        write_dataset(tasks, episodes_per_task, master_seed, out_dir, fractions, manifest);
    } catch (...) {
        std::error_code ec;
        fs::remove_all(out_dir, ec);
        throw;
    }
    return manifest;
}

DatasetManifest read_manifest(const fs::path& dataset_dir) {
    std::ifstream in(dataset_dir / "manifest.json");
    if (!in) throw FormatError("no manifest.json in " + dataset_dir.string());
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("manifest.json: ") + e.what());
    }
    return DatasetManifest::from_json(j);
}

std::map<std::string, NdArray> read_dataset_arrays(const fs::path& dataset_dir) {
    const auto manifest = read_manifest(dataset_dir);
    std::map<std::string, NdArray> out;
    for (const auto& entry : manifest.arrays) {
        NdArray a = load_array(dataset_dir / entry.file);
        if (a.dtype != entry.dtype || a.shape != entry.shape)
            throw FormatError("array " + entry.name + " disagrees with its manifest entry");
        out.emplace(entry.name, std::move(a));
    }
    return out;
}

}  // namespace sipl

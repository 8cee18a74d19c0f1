#include "sipl/task.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <set>
#include <sstream>

namespace sipl {

std::string_view action_name(int action) {
    static constexpr std::array<std::string_view, kNumActions> names{"north", "east", "south",
                                                                     "west",  "listen", "open"};
    if (action < 0 || action >= kNumActions) return "invalid";
    return names[action];
}

TaskParameter make_open_task(int n, Cell gold, Cell start_i, Cell start_j) {
    TaskParameter task;
    task.n = n;
    task.obstacles.assign(static_cast<std::size_t>(n) * n, 0);
    task.gold = gold;
    task.init_i = {start_i};
    task.init_j = {start_j};
    return task;
}

namespace {

void require(bool cond, const std::string& what) {
    if (!cond) throw InvalidTask(what);
}

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::string cell_str(Cell c) {
    std::ostringstream os;
    os << "(" << c.row << "," << c.col << ")";
    return os.str();
}

}  // namespace

void validate_task(const TaskParameter& task) {
    require(task.n > 0, "grid size must be positive");
    require(task.obstacles.size() == static_cast<std::size_t>(task.n) * task.n,
            "occupancy map must have n*n entries");
    for (auto v : task.obstacles) require(v <= 1, "occupancy entries must be 0 or 1");
    require(task.is_free(task.gold), "gold cell " + cell_str(task.gold) + " is not a free cell");
    require(!task.init_i.empty(), "init_i support is empty");
    require(!task.init_j.empty(), "init_j support is empty");
    for (const auto* support : {&task.init_i, &task.init_j}) {
        std::set<Cell> seen;
        for (Cell c : *support) {
            require(task.is_free(c), "init support cell " + cell_str(c) + " is not a free cell");
            require(seen.insert(c).second, "duplicate init support cell " + cell_str(c));
        }
    }
    require(task.gamma > 0.0 && task.gamma < 1.0, "gamma must lie in (0,1)");
    require(is_probability(task.move_success_prob), "move_success_prob must lie in [0,1]");
    require(is_probability(task.obs_noise_move), "obs_noise_move must lie in [0,1]");
    require(is_probability(task.obs_noise_listen), "obs_noise_listen must lie in [0,1]");
    require(task.interaction_radius >= 0, "interaction_radius must be nonnegative");
}

std::vector<std::uint8_t> reachable_from(const TaskParameter& task, Cell from) {
    std::vector<std::uint8_t> seen(static_cast<std::size_t>(task.n) * task.n, 0);
    if (!task.is_free(from)) return seen;
    std::deque<Cell> queue{from};
    seen[from.row * task.n + from.col] = 1;
    while (!queue.empty()) {
        Cell c = queue.front();
        queue.pop_front();
        for (int a = North; a <= West; ++a) {
            Cell next = shifted(c, a);
            if (!task.is_free(next) || seen[next.row * task.n + next.col]) continue;
            seen[next.row * task.n + next.col] = 1;
            queue.push_back(next);
        }
    }
    return seen;
}

namespace {

using nlohmann::json;

json cell_json(Cell c) { return json::array({c.row, c.col}); }

Cell cell_from(const json& j) {
    if (!j.is_array() || j.size() != 2) throw InvalidTask("cell must be a [row, col] pair");
    return {j.at(0).get<int>(), j.at(1).get<int>()};
}

std::vector<Cell> cells_from(const json& j) {
    if (!j.is_array()) throw InvalidTask("cell list must be an array");
    std::vector<Cell> out;
    for (const auto& c : j) out.push_back(cell_from(c));
    return out;
}

void reject_unknown(const json& j, std::initializer_list<std::string_view> known, const char* where) {
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw InvalidTask(std::string("unknown field '") + key + "' in " + where);
    }
}

}  // namespace

json task_to_json(const TaskParameter& task) {
    json grid = json::array();
    for (int r = 0; r < task.n; ++r) {
        json row = json::array();
        for (int c = 0; c < task.n; ++c) row.push_back(static_cast<int>(task.obstacles[r * task.n + c]));
        grid.push_back(std::move(row));
    }
    json init_i = json::array(), init_j = json::array();
    for (Cell c : task.init_i) init_i.push_back(cell_json(c));
    for (Cell c : task.init_j) init_j.push_back(cell_json(c));
    return json{{"n", task.n},
                {"grid", std::move(grid)},
                {"gold", cell_json(task.gold)},
                {"init_i", std::move(init_i)},
                {"init_j", std::move(init_j)},
                {"gamma", task.gamma},
                {"move_success_prob", task.move_success_prob},
                {"obs_noise_move", task.obs_noise_move},
                {"obs_noise_listen", task.obs_noise_listen},
                {"interaction_radius", task.interaction_radius},
                {"rewards",
                 {{"step", task.rewards.step},
                  {"open_gold", task.rewards.open_gold},
                  {"open_wrong", task.rewards.open_wrong},
                  {"collision", task.rewards.collision},
                  {"shared_gold", task.rewards.shared_gold}}}};
}

TaskParameter task_from_json(const json& j) {
    if (!j.is_object()) throw InvalidTask("task must be a JSON object");
    reject_unknown(j,
                   {"n", "grid", "gold", "init_i", "init_j", "gamma", "move_success_prob",
                    "obs_noise_move", "obs_noise_listen", "interaction_radius", "rewards"},
                   "task");
    TaskParameter task;
    try {
        task.n = j.at("n").get<int>();
        const auto& grid = j.at("grid");
        if (!grid.is_array() || static_cast<int>(grid.size()) != task.n)
            throw InvalidTask("grid must have n rows");
        task.obstacles.reserve(static_cast<std::size_t>(task.n) * task.n);
        for (const auto& row : grid) {
            if (!row.is_array() || static_cast<int>(row.size()) != task.n)
                throw InvalidTask("grid rows must have n entries");
            for (const auto& v : row) {
                int x = v.get<int>();
                if (x != 0 && x != 1) throw InvalidTask("grid entries must be 0 or 1");
                task.obstacles.push_back(static_cast<std::uint8_t>(x));
            }
        }
        task.gold = cell_from(j.at("gold"));
        task.init_i = cells_from(j.at("init_i"));
        task.init_j = cells_from(j.at("init_j"));
        task.gamma = j.at("gamma").get<double>();
        task.move_success_prob = j.at("move_success_prob").get<double>();
        task.obs_noise_move = j.at("obs_noise_move").get<double>();
        task.obs_noise_listen = j.at("obs_noise_listen").get<double>();
        task.interaction_radius = j.at("interaction_radius").get<int>();
        const auto& r = j.at("rewards");
        if (!r.is_object()) throw InvalidTask("rewards must be an object");
        reject_unknown(r, {"step", "open_gold", "open_wrong", "collision", "shared_gold"}, "rewards");
        task.rewards.step = r.at("step").get<double>();
        task.rewards.open_gold = r.at("open_gold").get<double>();
        task.rewards.open_wrong = r.at("open_wrong").get<double>();
        task.rewards.collision = r.at("collision").get<double>();
        task.rewards.shared_gold = r.at("shared_gold").get<double>();
    } catch (const nlohmann::json::exception& e) {
        throw InvalidTask(std::string("malformed task JSON: ") + e.what());
    }
    validate_task(task);
    return task;
}

TaskParameter load_task(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open task file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw InvalidTask(path.string() + ": " + e.what());
    }
    return task_from_json(j);
}

void save_task(const TaskParameter& task, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write task file " + path.string());
    out << task_to_json(task).dump(2) << '\n';
    if (!out) throw Error("failed writing task file " + path.string());
}

}  // namespace sipl

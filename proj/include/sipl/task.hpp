#pragma once

#include "sipl/grid.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

namespace sipl {

class InvalidTask : public Error {
public:
    using Error::Error;
};

struct RewardParams {
    double step = -0.1;
    double open_gold = 10.0;
    double open_wrong = -10.0;
    double collision = -5.0;
    double shared_gold = 5.0;

    bool operator==(const RewardParams&) const = default;
};

/// Everything that identifies one Tiger-grid task: map, gold, initial
/// belief supports, noise levels, discount and the interaction radius.
struct TaskParameter {
    int n = 0;
    std::vector<std::uint8_t> obstacles;  // row-major n*n, 1 = obstacle
    Cell gold;
    std::vector<Cell> init_i;
    std::vector<Cell> init_j;
    double gamma = 0.95;
    double move_success_prob = 0.9;
    double obs_noise_move = 0.1;
    double obs_noise_listen = 0.02;
    int interaction_radius = 1;
    RewardParams rewards;

    bool in_bounds(Cell c) const { return c.row >= 0 && c.col >= 0 && c.row < n && c.col < n; }
    bool is_free(Cell c) const { return in_bounds(c) && obstacles[c.row * n + c.col] == 0; }
    /// True when a move from `c` in direction `action` would leave the grid or hit an obstacle.
    bool blocked(Cell c, int action) const { return !is_free(shifted(c, action)); }

    bool operator==(const TaskParameter&) const = default;
};

/// Obstacle-free n x n task with gold at `gold` and singleton supports.
TaskParameter make_open_task(int n, Cell gold, Cell start_i, Cell start_j);

/// Throws InvalidTask when an invariant does not hold.
void validate_task(const TaskParameter& task);

/// Cells reachable from `from` by compass moves through free cells.
std::vector<std::uint8_t> reachable_from(const TaskParameter& task, Cell from);

nlohmann::json task_to_json(const TaskParameter& task);
TaskParameter task_from_json(const nlohmann::json& j);

TaskParameter load_task(const std::filesystem::path& path);
void save_task(const TaskParameter& task, const std::filesystem::path& path);

}  // namespace sipl

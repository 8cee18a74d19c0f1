#include "sipl/env.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sipl {

namespace {

std::vector<Cell> sample_cells(const std::vector<Cell>& pool, int count, Rng& rng) {
    std::vector<Cell> items = pool;
    for (int k = 0; k < count; ++k) {
        const std::size_t pick = k + rng.below(items.size() - k);
        std::swap(items[k], items[pick]);
    }
    items.resize(count);
    return items;
}

}  // namespace

std::vector<GridSpec> generate(std::uint64_t seed, int n, int count, double obstacle_density,
                               int belief_support_size) {
    if (n < 3) throw std::invalid_argument("grid size must be at least 3");
    if (count < 0) throw std::invalid_argument("task count must be nonnegative");
    if (!(obstacle_density >= 0.0 && obstacle_density <= kMaxObstacleDensity))
        throw std::invalid_argument("obstacle density must lie in [0, 0.35]");
    if (belief_support_size < 1) throw std::invalid_argument("belief support size must be positive");

    const int cells = n * n;
    const int num_obstacles = static_cast<int>(std::lround(obstacle_density * cells));
    std::vector<GridSpec> out;
    out.reserve(count);
    for (int k = 0; k < count; ++k) {
        Rng rng = Rng::derive(seed, static_cast<std::uint64_t>(k));
        bool accepted = false;
        for (int attempt = 0; attempt < kMaxGenerationRejections && !accepted; ++attempt) {
            std::vector<int> order(cells);
            std::iota(order.begin(), order.end(), 0);
            for (int m = 0; m < num_obstacles; ++m) {
                const std::size_t pick = m + rng.below(order.size() - m);
                std::swap(order[m], order[pick]);
            }
            TaskParameter task;
            task.n = n;
            task.obstacles.assign(cells, 0);
            for (int m = 0; m < num_obstacles; ++m) task.obstacles[order[m]] = 1;

            std::vector<Cell> free_cells;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c)
                    if (task.is_free({r, c})) free_cells.push_back({r, c});
            if (static_cast<int>(free_cells.size()) < belief_support_size + 1) continue;

            task.gold = free_cells[rng.below(free_cells.size())];
            std::vector<Cell> pool;
            for (Cell c : free_cells)
                if (c != task.gold) pool.push_back(c);
            task.init_i = sample_cells(pool, belief_support_size, rng);
            task.init_j = sample_cells(pool, belief_support_size, rng);
            std::sort(task.init_i.begin(), task.init_i.end());
            std::sort(task.init_j.begin(), task.init_j.end());

            const auto seen = reachable_from(task, task.gold);
            const auto connected = [&](Cell c) { return seen[c.row * n + c.col] != 0; };
            if (!std::all_of(task.init_i.begin(), task.init_i.end(), connected) ||
                !std::all_of(task.init_j.begin(), task.init_j.end(), connected))
                continue;

            out.push_back({std::move(task), rng.seed(), obstacle_density});
            accepted = true;
        }
        if (!accepted) {
            throw GenerationExhausted("no connected task after " + std::to_string(kMaxGenerationRejections) +
                                      " draws (n=" + std::to_string(n) + ", density " +
                                      std::to_string(obstacle_density) + ")");
        }
    }
    return out;
}

EpisodeState start_episode(const FactoredModel& model, Rng& rng, int max_steps) {
    if (max_steps < 1) throw std::invalid_argument("max_steps must be at least 1");
    const auto& task = model.task;
    const Cell ci = task.init_i[rng.below(task.init_i.size())];
    const Cell cj = task.init_j[rng.below(task.init_j.size())];
    EpisodeState es;
    es.state = {model.space.index_of(ci), model.space.index_of(cj)};
    es.max_steps = max_steps;
    return es;
}

JointState sample_transition(const FactoredModel& model, JointState s, JointAction a, Rng& rng) {
    const auto pick = [&](std::span<const Successor> row) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (const auto& e : row) {
            acc += e.prob;
            if (u < acc) return e.target;
        }
        return row.back().target;
    };
    if (model.indicator.transition_active(model.space, s, a)) {
        const auto target = pick(model.t_int_i.row(model.space.encode(s) * kNumJointActions + a.index()));
        return model.space.decode(target);
    }
    const auto ni = pick(model.t_i.row(static_cast<std::size_t>(s.pos_i) * kNumActions + a.a_i));
    const auto nj = pick(model.t_j.row(static_cast<std::size_t>(s.pos_j) * kNumActions + a.a_j));
    return {static_cast<int>(ni), static_cast<int>(nj)};
}

EpisodeState step(const EpisodeState& es, const FactoredModel& model, JointAction a, Rng& rng) {
    if (es.done) throw StepAfterDone("step called on a finished episode");
    if (a.a_i < 0 || a.a_i >= kNumActions || a.a_j < 0 || a.a_j >= kNumActions)
        throw std::invalid_argument("joint action out of range");
    EpisodeState next = es;
    const double discount = std::pow(model.task.gamma, es.step);
    next.return_i += discount * compose_reward(model, model.indicator, es.state, a, Agent::I);
    next.return_j += discount * compose_reward(model, model.indicator, es.state, a, Agent::J);
    next.state = sample_transition(model, es.state, a, rng);
    next.step = es.step + 1;
    if (a.a_i == Open) {
        next.done = true;
        next.success = model.space.cell(es.state.pos_i) == model.task.gold;
    }
    if (next.step >= es.max_steps) next.done = true;
    return next;
}

int observe(const FactoredModel& model, JointState next, int a_i, Rng& rng) {
    const auto& task = model.task;
    const double noise = a_i == Listen ? task.obs_noise_listen : task.obs_noise_move;
    int code = true_observation(task, model.space.cell(next.pos_i));
    for (int bit = 0; bit < kNumObservationBits; ++bit) {
        if (rng.bernoulli(noise)) code ^= 1 << bit;
    }
    return code;
}

}  // namespace sipl

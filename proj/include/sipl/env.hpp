#pragma once

#include "sipl/model.hpp"
#include "sipl/rng.hpp"

#include <cstdint>
#include <vector>

namespace sipl {

class GenerationExhausted : public Error {
public:
    using Error::Error;
};

class StepAfterDone : public Error {
public:
    using Error::Error;
};

/// A generated task plus the metadata that produced it.
struct GridSpec {
    TaskParameter task;
    std::uint64_t seed = 0;
    double obstacle_density = 0.0;
};

inline constexpr int kMaxGenerationRejections = 1000;
inline constexpr double kMaxObstacleDensity = 0.35;

/// Procedurally generated Tiger-grids. Deterministic in `seed`; every init
/// support cell of both agents is connected to the gold cell.
std::vector<GridSpec> generate(std::uint64_t seed, int n, int count, double obstacle_density,
                               int belief_support_size);

/// Default episode length cap: 4N.
inline int default_max_steps(const TaskParameter& task) { return 4 * task.n; }

struct EpisodeState {
    JointState state;
    int step = 0;
    int max_steps = 0;
    double return_i = 0.0;
    double return_j = 0.0;
    bool done = false;
    bool success = false;  // agent i opened at the gold cell
};

/// Draws the initial joint state from the initial belief.
EpisodeState start_episode(const FactoredModel& model, Rng& rng, int max_steps);

/// Samples a successor from the composed transition under the model's indicator.
JointState sample_transition(const FactoredModel& model, JointState s, JointAction a, Rng& rng);

/// Advances one step and accumulates discounted composed rewards. The episode
/// ends when agent i opens or the step cap is reached.
EpisodeState step(const EpisodeState& es, const FactoredModel& model, JointAction a, Rng& rng);

/// Agent i's noisy observation after arriving in `next` with action `a_i`.
int observe(const FactoredModel& model, JointState next, int a_i, Rng& rng);

}  // namespace sipl

#include "sipl/planner.hpp"

#include <algorithm>
#include <cmath>

namespace sipl {

QFunction plan(const FactoredModel& model, const MixedStrategy& pi_hat_j, int horizon) {
    return value_iteration(model, model.indicator, Agent::I, pi_hat_j, horizon, model.task.gamma).q;
}

ActionValues action_values(const QFunction& q, const Belief& belief, const MixedStrategy& pi_hat_j) {
    if (belief.probs.size() != q.num_states || pi_hat_j.num_states != q.num_states)
        throw std::invalid_argument("action_values: belief, strategy and Q disagree on the state count");
    ActionValues out;
    for (std::size_t s = 0; s < q.num_states; ++s) {
        const double b = belief.probs[s];
        if (b == 0.0) continue;
        for (int ai = 0; ai < kNumActions; ++ai) {
            double v = 0.0;
            for (int aj = 0; aj < kNumActions; ++aj) v += q(s, ai * kNumActions + aj) * pi_hat_j(s, aj);
            out.q[ai] += b * v;
        }
    }
    return out;
}

std::array<double, kNumActions> softmax_probabilities(const ActionValues& values, double temperature) {
    if (!(temperature > 0.0)) throw std::invalid_argument("softmax temperature must be positive");
    const double top = *std::max_element(values.q.begin(), values.q.end());
    std::array<double, kNumActions> p{};
    double total = 0.0;
    for (int a = 0; a < kNumActions; ++a) {
        p[a] = std::exp((values.q[a] - top) / temperature);
        total += p[a];
    }
    for (double& v : p) v /= total;
    return p;
}

int select_action(const ActionValues& values, const Selection& mode, Rng& rng) {
    if (mode.mode == Selection::Mode::Argmax) {
        // max_element returns the first maximum, i.e. the lowest id.
        return static_cast<int>(std::max_element(values.q.begin(), values.q.end()) - values.q.begin());
    }
    const auto p = softmax_probabilities(values, mode.temperature);
    return static_cast<int>(rng.categorical(p));
}

int select_action(const ActionValues& values, const Selection& mode, std::uint64_t seed) {
    Rng rng(seed);
    return select_action(values, mode, rng);
}

}  // namespace sipl

#pragma once

#include "sipl/belief.hpp"
#include "sipl/nested.hpp"
#include "sipl/rng.hpp"

#include <array>

namespace sipl {

/// Belief-weighted value of each of agent i's actions.
struct ActionValues {
    std::array<double, kNumActions> q{};
};

/// Q_i^K of agent i against the predicted strategy of j. Computed once per
/// task; observations never enter it.
QFunction plan(const FactoredModel& model, const MixedStrategy& pi_hat_j, int horizon);

/// q(a_i) = sum_{s, a_j} Q(s, a) pi_hat_j(s, a_j) b(s), without renormalization.
ActionValues action_values(const QFunction& q, const Belief& belief, const MixedStrategy& pi_hat_j);

struct Selection {
    enum class Mode { Argmax, Softmax } mode = Mode::Argmax;
    double temperature = 1.0;

    static Selection argmax() { return {}; }
    static Selection softmax(double temperature) { return {Mode::Softmax, temperature}; }
};

/// Argmax breaks ties toward the lowest action id and never touches `rng`.
int select_action(const ActionValues& values, const Selection& mode, Rng& rng);
int select_action(const ActionValues& values, const Selection& mode, std::uint64_t seed);

/// Probabilities used by softmax selection.
std::array<double, kNumActions> softmax_probabilities(const ActionValues& values, double temperature);

}  // namespace sipl

#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace sipl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Per-agent action ids. Both agents share the same action set.
enum Action : int { North = 0, East = 1, South = 2, West = 3, Listen = 4, Open = 5 };

inline constexpr int kNumActions = 6;
inline constexpr int kNumJointActions = kNumActions * kNumActions;

/// Observation codes pack four adjacent-blocked bits and a glitter bit:
/// bit 0 = N, bit 1 = E, bit 2 = S, bit 3 = W, bit 4 = glitter.
inline constexpr int kNumObservationBits = 5;
inline constexpr int kNumObservations = 1 << kNumObservationBits;

enum class Agent { I, J };

constexpr Agent other(Agent a) { return a == Agent::I ? Agent::J : Agent::I; }

std::string_view action_name(int action);

constexpr bool is_move(int action) { return action >= North && action <= West; }

struct Cell {
    int row = 0;
    int col = 0;

    auto operator<=>(const Cell&) const = default;
};

constexpr int manhattan(Cell a, Cell b) {
    return (a.row > b.row ? a.row - b.row : b.row - a.row) +
           (a.col > b.col ? a.col - b.col : b.col - a.col);
}

/// Cell reached by a compass move, without bounds checks.
constexpr Cell shifted(Cell c, int action) {
    switch (action) {
    case North: return {c.row - 1, c.col};
    case East: return {c.row, c.col + 1};
    case South: return {c.row + 1, c.col};
    case West: return {c.row, c.col - 1};
    default: return c;
    }
}

struct JointAction {
    int a_i = 0;
    int a_j = 0;

    constexpr int index() const { return a_i * kNumActions + a_j; }
    static constexpr JointAction from_index(int idx) { return {idx / kNumActions, idx % kNumActions}; }
    constexpr int own(Agent agent) const { return agent == Agent::I ? a_i : a_j; }

    auto operator<=>(const JointAction&) const = default;
};

constexpr int joint_index(Agent self, int own_action, int opponent_action) {
    return self == Agent::I ? own_action * kNumActions + opponent_action
                            : opponent_action * kNumActions + own_action;
}

}  // namespace sipl

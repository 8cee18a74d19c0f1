#include "doctest.h"

#include "oracles.hpp"
#include "sipl/planner.hpp"

using namespace sipl;

TEST_CASE("plan with K=1 is the composed reward of agent i") {
    const auto m = build_model(oracle::random_small_task(70));
    const auto pi = solve_nested(m, NestedSpec::defaults_for(m.task));
    const auto q = plan(m, pi, 1);
    for (std::size_t s = 0; s < m.num_states(); ++s)
        for (int a = 0; a < kNumJointActions; ++a)
            CHECK(q(s, a) == compose_reward(m, m.indicator, m.space.decode(s), JointAction::from_index(a), Agent::I));
}

TEST_CASE("plan matches the flat joint oracle") {
    for (std::uint64_t seed = 71; seed < 74; ++seed) {
        const auto m = build_model(oracle::random_small_task(seed));
        const auto pi = solve_nested(m, NestedSpec::defaults_for(m.task));
        const int K = 2 * m.task.n;
        const auto q = plan(m, pi, K);
        const auto want =
            oracle::flat_value_iteration(oracle::materialize(m, m.indicator, Agent::I), Agent::I, pi, K, m.task.gamma);
        CHECK(oracle::max_abs_diff(q.values, want.q) <= 1e-9);
    }
}

TEST_CASE("swapping roles relabels the Q table") {
    auto task = oracle::random_small_task(75);
    std::swap(task.init_i, task.init_j);
    const auto m = build_model(task);
    const auto q_i = plan(m, level0_strategy(m, Agent::J), 5);
    const auto q_j = value_iteration(m, m.indicator, Agent::J, level0_strategy(m, Agent::I), 5, task.gamma).q;
    for (std::size_t s = 0; s < m.num_states(); ++s) {
        const auto st = m.space.decode(s);
        const auto swapped = m.space.encode({st.pos_j, st.pos_i});
        for (int a = 0; a < kNumJointActions; ++a) {
            const auto ja = JointAction::from_index(a);
            CHECK(q_i(s, a) == doctest::Approx(q_j(swapped, JointAction{ja.a_j, ja.a_i}.index())).epsilon(1e-12));
        }
    }
}

TEST_CASE("action values") {
    const auto m = build_model(oracle::random_small_task(77));
    const auto pi = solve_nested(m, NestedSpec::defaults_for(m.task));
    const auto q = plan(m, pi, 4);
    const std::size_t S = m.num_states();

    SUBCASE("delta belief and delta strategy pick out one Q entry") {
        Belief b{std::vector<double>(S, 0.0)};
        const std::size_t s = S / 3;
        b.probs[s] = 1.0;
        MixedStrategy delta{Agent::J, S, std::vector<double>(S * kNumActions, 0.0)};
        for (std::size_t k = 0; k < S; ++k) delta.probs[k * kNumActions + West] = 1.0;
        const auto av = action_values(q, b, delta);
        for (int a = 0; a < kNumActions; ++a) CHECK(av.q[a] == q(s, a * kNumActions + West));
    }
    SUBCASE("uniform over two states and two actions averages four entries") {
        Belief b{std::vector<double>(S, 0.0)};
        b.probs[1] = b.probs[S - 1] = 0.5;
        MixedStrategy two{Agent::J, S, std::vector<double>(S * kNumActions, 0.0)};
        for (std::size_t k = 0; k < S; ++k) two.probs[k * kNumActions + North] = two.probs[k * kNumActions + Open] = 0.5;
        const auto av = action_values(q, b, two);
        for (int a = 0; a < kNumActions; ++a) {
            const double mean = (q(1, a * 6 + North) + q(1, a * 6 + Open) + q(S - 1, a * 6 + North) +
                                 q(S - 1, a * 6 + Open)) / 4;
            CHECK(av.q[a] == doctest::Approx(mean).epsilon(1e-14));
        }
    }
    SUBCASE("random belief and strategy match a naive triple loop") {
        std::mt19937_64 gen(77);
        const Belief b{oracle::random_distribution(S, gen, 0.2)};
        const auto strategy = oracle::random_strategy(Agent::J, S, gen);
        const auto av = action_values(q, b, strategy);
        for (int ai = 0; ai < kNumActions; ++ai) {
            double want = 0.0;
            for (std::size_t s = 0; s < S; ++s)
                for (int aj = 0; aj < kNumActions; ++aj)
                    want += q.values[s * 36 + ai * 6 + aj] * strategy.probs[s * 6 + aj] * b.probs[s];
            CHECK(av.q[ai] == doctest::Approx(want).epsilon(1e-12));
        }
    }
    SUBCASE("linear in the belief") {
        std::mt19937_64 gen(78);
        const auto b1 = oracle::random_distribution(S, gen), b2 = oracle::random_distribution(S, gen);
        std::vector<double> mix(S);
        for (std::size_t k = 0; k < S; ++k) mix[k] = 0.25 * b1[k] + 0.75 * b2[k];
        const auto v1 = action_values(q, {b1}, pi), v2 = action_values(q, {b2}, pi), vm = action_values(q, {mix}, pi);
        for (int a = 0; a < kNumActions; ++a)
            CHECK(vm.q[a] == doctest::Approx(0.25 * v1.q[a] + 0.75 * v2.q[a]).epsilon(1e-12));
    }
    SUBCASE("shape mismatch") {
        CHECK_THROWS_AS(action_values(q, Belief{std::vector<double>(S + 2, 0.0)}, pi), std::invalid_argument);
    }
}

TEST_CASE("positive affine reward transforms keep the belief argmax") {
    auto m = build_model(oracle::random_small_task(80));
    const auto pi = solve_nested(m, NestedSpec::defaults_for(m.task));
    const auto q = plan(m, pi, 6);
    auto t = m;
    const double scale = 2.5, shift = -3.0;
    for (auto* table : {&t.r_i, &t.r_j, &t.r_int_i, &t.r_int_j})
        for (double& r : *table) r = scale * r + shift;
    const auto qt = plan(t, pi, 6);
    std::mt19937_64 gen(80);
    Rng unused(0);
    for (int probe = 0; probe < 20; ++probe) {
        const Belief b{oracle::random_distribution(m.num_states(), gen, 0.5)};
        const auto av = action_values(q, b, pi), avt = action_values(qt, b, pi);
        const int best_t = select_action(avt, Selection::argmax(), unused);
        CHECK(av.q[best_t] >= *std::max_element(av.q.begin(), av.q.end()) - 1e-9);
    }
}

TEST_CASE("planning ignores observation noise") {
    auto task = oracle::random_small_task(81);
    const auto m = build_model(task);
    task.obs_noise_move = 0.4;
    task.obs_noise_listen = 0.0;
    const auto noisy = build_model(task);
    const auto pi = solve_nested(m, NestedSpec::defaults_for(task));
    CHECK(plan(m, pi, 5).values == plan(noisy, pi, 5).values);
}

TEST_CASE("select_action") {
    Rng rng(1);
    CHECK(select_action(ActionValues{}, Selection::argmax(), rng) == 0);
    CHECK(select_action(ActionValues{{0, 1, 2, 5, 4, 3}}, Selection::argmax(), rng) == 3);
    CHECK(select_action(ActionValues{{0, 7, 2, 7, 4, 3}}, Selection::argmax(), rng) == 1);

    const ActionValues av{{0.5, -0.2, 1.0, 0.0, 0.3, -1.0}};
    CHECK(select_action(av, Selection::softmax(1.0), 99) == select_action(av, Selection::softmax(1.0), 99));

    const auto probs = softmax_probabilities(av, 1.0);
    std::array<int, kNumActions> counts{};
    Rng sampler(12345);
    const int draws = 100000;
    for (int k = 0; k < draws; ++k) ++counts[select_action(av, Selection::softmax(1.0), sampler)];
    for (int a = 0; a < kNumActions; ++a) CHECK(std::abs(counts[a] / double(draws) - probs[a]) <= 0.01);
}

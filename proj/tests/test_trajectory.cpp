#include "doctest.h"

#include "oracles.hpp"
#include "sipl/trajectory.hpp"

using namespace sipl;

TEST_CASE("expert standing on known gold opens immediately") {
    auto task = make_open_task(3, {1, 1}, {1, 1}, {0, 0});
    task.obs_noise_move = task.obs_noise_listen = 0.0;
    const auto sol = solve_task(task);
    ExpertPolicy expert;
    Rng rng(3);
    const auto rec = simulate_episode(sol, expert, rng, 12);
    REQUIRE(rec.length() == 1);
    CHECK(rec.steps[0].a_i == Open);
    CHECK(rec.success);
    CHECK(rec.return_i == doctest::Approx(10.0));
}

TEST_CASE("expert labels are reproducible by replaying the filter") {
    const auto specs = generate(11, 5, 3, 0.2, 3);
    for (const auto& spec : specs) {
        const auto sol = solve_task(spec.task);
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            ExpertPolicy expert;
            Rng rng(seed);
            const auto rec = simulate_episode(sol, expert, rng, default_max_steps(spec.task));
            CHECK(rec.expert_agreement == rec.length());

            ExpertPolicy replay;
            replay.begin(sol);
            for (const auto& s : rec.steps) {
                CHECK(replay.recommended() == s.a_i);
                replay.observe({s.a_i, s.a_j}, s.o_i);
                CHECK(replay.recommended() == s.expert_next_a_i);
            }
        }
    }
}

TEST_CASE("run_episodes") {
    std::vector<TaskSolution> sols;
    for (const auto& spec : generate(21, 5, 4, 0.2, 2)) sols.push_back(solve_task(spec.task));

    SUBCASE("deterministic and independent of the thread count") {
        const auto a = run_episodes(sols, policy_factory("expert"), 6, 77);
        setenv("SIPL_THREADS", "1", 1);
        const auto b = run_episodes(sols, policy_factory("expert"), 6, 77);
        unsetenv("SIPL_THREADS");
        REQUIRE(a.size() == 24);
        for (std::size_t k = 0; k < a.size(); ++k) {
            CHECK(a[k].task_id == static_cast<int>(k / 6));
            CHECK(a[k].return_i == b[k].return_i);
            CHECK(a[k].length() == b[k].length());
        }
    }
    SUBCASE("random agent i does worse than the expert") {
        const auto expert = evaluate_policy(sols, policy_factory("expert"), 20, 5);
        const auto random = evaluate_policy(sols, policy_factory("random"), 20, 5);
        CHECK(expert.policy == "expert");
        CHECK(random.policy == "random");
        CHECK(expert.mean_return > random.mean_return);
        CHECK(expert.success_rate > random.success_rate);
        CHECK(expert.action_accuracy.value_or(0.0) == doctest::Approx(1.0));
        CHECK(expert.per_task.size() == 4);
    }
    SUBCASE("invalid arguments") {
        CHECK_THROWS_AS(run_episodes(sols, policy_factory("expert"), 0, 1), std::invalid_argument);
        CHECK_THROWS_AS(run_episodes({}, policy_factory("expert"), 1, 1), std::invalid_argument);
        CHECK_THROWS_AS(policy_factory("greedy"), std::invalid_argument);
    }
}

TEST_CASE("summarize") {
    std::vector<TrajectoryRecord> recs(4);
    for (int k = 0; k < 4; ++k) {
        recs[k].task_id = k % 2;
        recs[k].success = k < 2;
        recs[k].return_i = k;
        recs[k].steps.resize(k + 1);
        recs[k].expert_agreement = k + 1;
    }
    const auto m = summarize(recs, "x");
    CHECK(m.episodes == 4);
    CHECK(m.success_rate == 0.5);
    CHECK(m.mean_return == 1.5);
    CHECK(m.mean_length == 2.5);
    // sample sd of {0,1,2,3} is sqrt(5/3)
    CHECK(m.return_se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
    CHECK(m.action_accuracy.value() == 1.0);
    CHECK(m.per_task.size() == 2);
    const auto j = metrics_to_json(m);
    CHECK(j.at("episodes") == 4);
}

#include "doctest.h"

#include "oracles.hpp"
#include "sipl/dataset.hpp"

#include <fstream>
#include <set>
#include <sstream>

using namespace sipl;
namespace fs = std::filesystem;

namespace {

std::vector<TaskParameter> small_tasks(int count) {
    std::vector<TaskParameter> out;
    for (const auto& spec : generate(3, 4, count, 0.15, 2)) out.push_back(spec.task);
    return out;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

}  // namespace

TEST_CASE("array container round trip") {
    const std::vector<double> d{1.5, -2.0, 3.25, 0.0, 1e-300, -7.0};
    const std::vector<std::int32_t> i{-1, 0, 7, 2147483647};
    const std::vector<std::uint8_t> u{0, 255, 3};
    const std::vector<float> f{0.5f, -1.25f};
    std::stringstream ss;
    const auto ad = NdArray::from<double>({2, 3}, d);
    const auto ai = NdArray::from<std::int32_t>({4}, i);
    const auto au = NdArray::from<std::uint8_t>({1, 3, 1}, u);
    const auto af = NdArray::from<float>({2}, f);
    for (const auto* a : {&ad, &ai, &au, &af}) write_array(ss, *a);
    CHECK(read_array(ss) == ad);
    CHECK(read_array(ss).values<std::int32_t>() == i);
    CHECK(read_array(ss) == au);
    CHECK(read_array(ss).values<float>() == f);

    std::stringstream header;
    write_array(header, ad);
    const std::string bytes = header.str();
    CHECK(bytes.substr(0, 4) == "SIPL");
    CHECK(bytes.size() == 4 + 2 + 1 + 1 + 2 * 4 + 6 * 8);
    CHECK(bytes[4] == 1);
    CHECK(bytes[5] == 0);
    CHECK(bytes[6] == 0);
    CHECK(bytes[7] == 2);
}

TEST_CASE("array container rejects malformed input") {
    std::stringstream bad_magic("XIPL....");
    CHECK_THROWS_AS(read_array(bad_magic), FormatError);

    std::stringstream ss;
    write_array(ss, NdArray::from<double>({3}, std::vector<double>{1, 2, 3}));
    std::string bytes = ss.str();
    std::stringstream truncated(bytes.substr(0, bytes.size() - 3));
    CHECK_THROWS_AS(read_array(truncated), FormatError);
    std::string wrong_dtype = bytes;
    wrong_dtype[6] = 9;
    std::stringstream bad_dtype(wrong_dtype);
    CHECK_THROWS_AS(read_array(bad_dtype), FormatError);
    std::string wrong_version = bytes;
    wrong_version[4] = 2;
    std::stringstream bad_version(wrong_version);
    CHECK_THROWS_AS(read_array(bad_version), FormatError);

    CHECK_THROWS_AS(NdArray::from<double>({2, 2}, std::vector<double>{1, 2, 3}), FormatError);
    CHECK_THROWS_AS(NdArray::from<double>({1}, std::vector<double>{1}).values<float>(), FormatError);
    CHECK_THROWS_AS(load_array("/nonexistent/sipl/array.bin"), Error);
}

TEST_CASE("policy dump round trip") {
    oracle::TempDir dir("dump");
    const auto sol = solve_task(oracle::random_small_task(5));
    save_policy_dump(dir.path() / "policy.bin", sol);
    const auto dump = load_policy_dump(dir.path() / "policy.bin");
    const auto S = static_cast<std::uint32_t>(sol.model.num_states());
    CHECK(dump.q_i.shape == std::vector<std::uint32_t>{S, 36});
    CHECK(dump.q_i.values<double>() == sol.q_i.values);
    CHECK(dump.pi_hat_j.shape == std::vector<std::uint32_t>{S, 6});
    CHECK(dump.pi_hat_j.values<double>() == sol.pi_hat_j.probs);
    const auto meta = dump.meta.values<std::int32_t>();
    REQUIRE(meta.size() == 4);
    CHECK(meta[0] == sol.model.task.n);
    CHECK(meta[2] == sol.spec.horizon);
    CHECK(meta[3] == sol.spec.top_level);
}

TEST_CASE("split_tasks") {
    const auto s = split_tasks(10, {}, 4);
    CHECK(s.at("train").size() == 8);
    CHECK(s.at("valid").size() == 1);
    CHECK(s.at("test").size() == 1);
    std::set<int> all;
    for (const auto& [name, ids] : s) all.insert(ids.begin(), ids.end());
    CHECK(all.size() == 10);
    CHECK(split_tasks(10, {}, 4) == s);
    CHECK_THROWS_AS(split_tasks(10, {0.5, 0.5, 0.5}, 1), std::invalid_argument);
}

TEST_CASE("build_dataset") {
    oracle::TempDir root("dataset");
    const auto tasks = small_tasks(10);
    const auto out = root.path() / "a";
    const auto manifest = build_dataset(tasks, 5, 99, out);
    CHECK(manifest.records == 50);

    const auto read = read_manifest(out);
    CHECK(read.to_json() == manifest.to_json());
    CHECK(read.tasks.size() == 10);
    CHECK(read.master_seed == 99);
    CHECK(read.episodes_per_task == 5);
    for (std::size_t t = 0; t < tasks.size(); ++t) CHECK(load_task(out / read.tasks[t]) == tasks[t]);

    std::set<int> seen;
    std::size_t total = 0;
    for (const auto& [name, ids] : read.splits) {
        seen.insert(ids.begin(), ids.end());
        total += ids.size();
    }
    CHECK(seen.size() == 10);
    CHECK(total == 10);

    const auto arrays = read_dataset_arrays(out);
    const auto length = arrays.at("length").values<std::int32_t>();
    const auto task_id = arrays.at("task_id").values<std::int32_t>();
    REQUIRE(length.size() == 50);
    const auto L = arrays.at("action_i").shape.at(1);
    CHECK(static_cast<std::int32_t>(L) == *std::max_element(length.begin(), length.end()));
    for (const char* name : {"action_i", "action_j", "observation_i", "expert_next_action_i"}) {
        const auto v = arrays.at(name).values<std::int32_t>();
        for (std::size_t r = 0; r < 50; ++r) {
            CHECK(task_id[r] == static_cast<int>(r / 5));
            for (std::uint32_t t = 0; t < L; ++t) {
                const auto x = v[r * L + t];
                if (static_cast<std::int32_t>(t) < length[r]) {
                    CHECK(x >= 0);
                } else {
                    CHECK(x == kPadCode);
                }
            }
        }
    }
    CHECK(arrays.at("grid").shape == std::vector<std::uint32_t>{10, 4, 4});
    const auto grid = arrays.at("grid").values<std::uint8_t>();
    CHECK(std::vector<std::uint8_t>(grid.begin(), grid.begin() + 16) == tasks[0].obstacles);
    const auto belief = arrays.at("init_belief_i").values<double>();
    double mass = 0.0;
    for (int k = 0; k < 16; ++k) mass += belief[k];
    CHECK(mass == doctest::Approx(1.0));

    SUBCASE("byte-identical across runs") {
        const auto again = root.path() / "b";
        build_dataset(tasks, 5, 99, again);
        CHECK(slurp(out / "manifest.json") == slurp(again / "manifest.json"));
        for (const auto& e : read.arrays) CHECK(slurp(out / e.file) == slurp(again / e.file));
    }
    SUBCASE("refuses a non-empty output directory") {
        CHECK_THROWS_AS(build_dataset(tasks, 1, 1, out), Error);
        CHECK(fs::exists(out / "manifest.json"));
    }
}

TEST_CASE("build_dataset failures") {
    oracle::TempDir root("dataset_fail");
    auto tasks = small_tasks(2);
    CHECK_THROWS_AS(build_dataset({}, 1, 1, root.path() / "x"), std::invalid_argument);
    CHECK_THROWS_AS(build_dataset(tasks, 0, 1, root.path() / "x"), std::invalid_argument);
    auto mixed = tasks;
    mixed.push_back(make_open_task(3, {2, 2}, {0, 0}, {0, 2}));
    CHECK_THROWS_AS(build_dataset(mixed, 1, 1, root.path() / "x"), std::invalid_argument);

    // Walls off the gold after validation so solving fails mid-build.
    auto broken = tasks;
    const Cell g = broken[1].gold;
    for (int a = North; a <= West; ++a) {
        const Cell c = shifted(g, a);
        if (broken[1].in_bounds(c)) broken[1].obstacles[c.row * 4 + c.col] = 1;
    }
    broken[1].init_i.erase(std::remove_if(broken[1].init_i.begin(), broken[1].init_i.end(),
                                          [&](Cell c) { return !broken[1].is_free(c); }),
                           broken[1].init_i.end());
    broken[1].init_j.erase(std::remove_if(broken[1].init_j.begin(), broken[1].init_j.end(),
                                          [&](Cell c) { return !broken[1].is_free(c); }),
                           broken[1].init_j.end());
    const auto out = root.path() / "partial";
    CHECK_THROWS(build_dataset(broken, 1, 1, out));
    CHECK(!fs::exists(out));
}

TEST_CASE("manifest parsing") {
    oracle::TempDir dir("manifest");
    CHECK_THROWS_AS(read_manifest(dir.path()), FormatError);
    std::ofstream(dir.path() / "manifest.json") << "{\"version\": 1}";
    CHECK_THROWS_AS(read_manifest(dir.path()), FormatError);
    std::ofstream(dir.path() / "manifest.json") << "{not json";
    CHECK_THROWS_AS(read_manifest(dir.path()), FormatError);
}

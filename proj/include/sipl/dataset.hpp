#pragma once

#include "sipl/array_io.hpp"
#include "sipl/trajectory.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "json.hpp"

namespace sipl {

struct SplitFractions {
    double train = 0.8;
    double valid = 0.1;
    double test = 0.1;
};

struct ArrayEntry {
    std::string name;
    std::string file;
    DType dtype = DType::F64;
    std::vector<std::uint32_t> shape;
};

/// In-memory view of manifest.json.
struct DatasetManifest {
    int version = 1;
    std::vector<std::string> tasks;  // relative to the dataset directory
    std::map<std::string, std::vector<int>> splits;
    std::vector<ArrayEntry> arrays;
    std::uint64_t master_seed = 0;
    int episodes_per_task = 0;
    int records = 0;
    nlohmann::json env_defaults;

    nlohmann::json to_json() const;
    static DatasetManifest from_json(const nlohmann::json& j);
};

inline constexpr int kPadCode = -1;

/// Writes expert trajectories for every (task, episode) pair to `out_dir`:
/// manifest.json, tasks/NNN.json and one array file per array. Splits are by
/// task. On failure the partially written directory is removed.
DatasetManifest build_dataset(const std::vector<TaskParameter>& tasks, int episodes_per_task,
                              std::uint64_t master_seed, const std::filesystem::path& out_dir,
                              const SplitFractions& fractions = {});

DatasetManifest read_manifest(const std::filesystem::path& dataset_dir);

/// Loads every array listed in the manifest, keyed by array name.
std::map<std::string, NdArray> read_dataset_arrays(const std::filesystem::path& dataset_dir);

/// Task ids per split, deterministic in the seed.
std::map<std::string, std::vector<int>> split_tasks(int num_tasks, const SplitFractions& fractions,
                                                    std::uint64_t seed);

}  // namespace sipl

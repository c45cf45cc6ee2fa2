#ifndef GRAPHROB_HARNESS_HPP
#define GRAPHROB_HARNESS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "graphrob/attacks.hpp"
#include "graphrob/synthgen.hpp"

namespace graphrob {

enum class SelectionMethod { Random, StratDegree, GreedyCover };

struct DatasetSource {
    std::optional<std::string> manifest_path;
    std::optional<SyntheticSpec> synthetic;
};

struct ExperimentConfig {
    DatasetSource dataset;
    SelectionMethod selection = SelectionMethod::Random;
    double t_train = 0.1;
    double t_val = 0.1;
    VictimConfig victim;
    AttackSpec attack;
    std::size_t num_targets = 25;
    std::size_t num_trials = 5;
    std::uint64_t master_seed = 0;
    std::size_t threads = 0;  // 0 = hardware concurrency
};

struct TrialResult {
    std::size_t trial_index = 0;
    std::vector<NodeId> targets;
    std::vector<std::size_t> budgets;      // aligned with targets
    std::vector<double> pre_margins;       // aligned with targets
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<double> per_class_f1;
    std::vector<std::size_t> test_class_counts;
    std::size_t test_size = 0;
    double avg_external_neighbors = 0.0;
    std::optional<int> final_k;
    bool target_shortfall = false;
    std::uint64_t split_seed = 0;
    std::uint64_t init_seed = 0;
    std::uint64_t target_seed = 0;
};

struct RobustnessCurve {
    std::vector<double> p;
    std::vector<double> mean_budget;
    std::vector<double> stderr_budget;
    std::size_t trials = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialResult> trials;
    RobustnessCurve curve;
    long long dataset_delta = 0;
    double dataset_heterophilicity = 0.0;
    std::size_t dataset_nodes = 0;
    std::size_t dataset_edges = 0;
};

/// The default success-probability grid 0.05, 0.10, ..., 1.00.
std::vector<double> default_probability_grid();

/// Within each trial budgets are sorted and the value at probability p is the
/// ceil(p * num_targets)-th order statistic; mean and standard error are
/// taken across trials per grid point.
RobustnessCurve robustness_curve(
    const std::vector<std::vector<std::size_t>>& per_trial_budgets,
    std::span<const double> grid);

/// One full trial: split, victim training, target sampling among correctly
/// classified test nodes, attacks, metrics. Deterministic in
/// (config, dataset, trial_index).
TrialResult run_trial(const ExperimentConfig& cfg, const LabeledDataset& ds,
                      std::size_t trial_index);

/// num_trials independent trials plus the aggregated robustness curve.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Resolves the configured dataset source (loads the manifest or runs the
/// generator).
LabeledDataset resolve_dataset(const ExperimentConfig& cfg);

/// Runs fn(0..count-1) on a pool of `threads` workers; results must be
/// written to index-addressed slots by the caller for determinism.
void parallel_for_index(std::size_t count, std::size_t threads,
                        const std::function<void(std::size_t)>& fn);

}  // namespace graphrob

#endif

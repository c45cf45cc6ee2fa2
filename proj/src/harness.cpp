#include "graphrob/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <thread>

#include "graphrob/dataset_io.hpp"
#include "graphrob/rng.hpp"

namespace graphrob {

std::vector<double> default_probability_grid() {
    std::vector<double> grid;
    grid.reserve(20);
    for (int i = 1; i <= 20; ++i) grid.push_back(static_cast<double>(i) / 20.0);
    return grid;
}

RobustnessCurve robustness_curve(
    const std::vector<std::vector<std::size_t>>& per_trial_budgets,
    std::span<const double> grid) {
    std::vector<std::vector<std::size_t>> trials;
    for (const auto& t : per_trial_budgets)
        if (!t.empty()) trials.push_back(t);
    if (trials.empty())
        throw DataError("robustness_curve: no non-empty trials");
    for (auto& t : trials) std::sort(t.begin(), t.end());

    RobustnessCurve curve;
    curve.p.assign(grid.begin(), grid.end());
    curve.trials = trials.size();
    for (double p : grid) {
        std::vector<double> values;
        values.reserve(trials.size());
        for (const auto& t : trials) {
            const auto n = static_cast<double>(t.size());
            auto idx = static_cast<std::size_t>(std::ceil(p * n - 1e-12));
            idx = std::clamp<std::size_t>(idx, 1, t.size());
            values.push_back(static_cast<double>(t[idx - 1]));
        }
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(values.size());
        double var = 0.0;
        if (values.size() > 1) {
            for (double v : values) var += (v - mean) * (v - mean);
            var /= static_cast<double>(values.size() - 1);
        }
        curve.mean_budget.push_back(mean);
        curve.stderr_budget.push_back(
            std::sqrt(var / static_cast<double>(values.size())));
    }
    return curve;
}

void parallel_for_index(std::size_t count, std::size_t threads,
                        const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min(threads, count);
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) {
        pool.emplace_back([&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

namespace {

Split make_split(const ExperimentConfig& cfg, const LabeledDataset& ds,
                 std::uint64_t seed, std::optional<int>* final_k) {
    switch (cfg.selection) {
        case SelectionMethod::Random:
            return stratified_random_split(ds, cfg.t_train, cfg.t_val, seed);
        case SelectionMethod::StratDegree:
            return strat_degree_select(ds, cfg.t_train, seed, cfg.t_val);
        case SelectionMethod::GreedyCover: {
            auto res = greedy_cover_select(ds, cfg.t_train, seed, cfg.t_val);
            if (final_k != nullptr) *final_k = res.final_k;
            return std::move(res.split);
        }
    }
    throw UsageError("unknown selection method");
}

AttackResult dispatch_attack(const ExperimentConfig& cfg, const LabeledDataset& ds,
                             const Split& split, NodeId target,
                             const CleanModels& clean) {
    switch (cfg.attack.kind) {
        case AttackKind::SurrogateGreedy:
            return surrogate_greedy_attack(ds, split, cfg.victim, target, cfg.attack,
                                           &clean);
        case AttackKind::Fga:
            return fga_attack(ds, split, cfg.victim, target, cfg.attack, &clean);
        case AttackKind::Sga:
            return sga_attack(ds, split, cfg.victim, target, cfg.attack, &clean);
    }
    throw UsageError("unknown attack kind");
}

}  // namespace

TrialResult run_trial(const ExperimentConfig& cfg, const LabeledDataset& ds,
                      std::size_t trial_index) {
    TrialResult res;
    res.trial_index = trial_index;
    res.split_seed = derive_seed(cfg.master_seed, {1, trial_index});
    res.init_seed = derive_seed(cfg.master_seed, {2, trial_index});
    res.target_seed = derive_seed(cfg.master_seed, {3, trial_index});

    Split split = make_split(cfg, ds, res.split_seed, &res.final_k);

    ExperimentConfig trial_cfg = cfg;
    trial_cfg.victim.train.seed = res.init_seed;
    if (trial_cfg.attack.kind == AttackKind::Sga)
        trial_cfg.victim.kind = ClassifierKind::Sgc;

    // The clean victim and the attack surrogate are shared by every target of
    // this trial; both depend only on (dataset, split, config).
    const CleanModels clean = train_clean_models(ds, split, trial_cfg.victim);
    const VictimModel& victim = clean.victim;
    const Metrics metrics =
        evaluate_metrics(victim.proba(), ds.labels, split.test, ds.num_classes);
    res.accuracy = metrics.accuracy;
    res.macro_f1 = metrics.macro_f1;
    res.per_class_f1 = metrics.per_class_f1;
    res.test_size = split.test.size();
    res.test_class_counts.assign(static_cast<std::size_t>(ds.num_classes), 0);
    for (NodeId u : split.test)
        ++res.test_class_counts[static_cast<std::size_t>(ds.labels[u])];
    res.avg_external_neighbors =
        avg_external_training_neighbors(ds.graph, split.train);

    // Targets: uniform sample among correctly classified test nodes.
    const auto preds = predict_margins(victim.proba(), ds.labels, split.test);
    std::vector<NodeId> eligible;
    for (const auto& p : preds)
        if (p.margin > 0.0) eligible.push_back(p.node);
    res.target_shortfall = eligible.size() < cfg.num_targets;
    Rng target_rng(res.target_seed);
    const std::size_t want = std::min<std::size_t>(cfg.num_targets, eligible.size());
    for (std::size_t i = 0; i < want; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(
                                      target_rng.below(eligible.size() - i));
        std::swap(eligible[i], eligible[j]);
    }
    eligible.resize(want);
    std::sort(eligible.begin(), eligible.end());
    res.targets = eligible;

    res.budgets.assign(res.targets.size(), 0);
    res.pre_margins.assign(res.targets.size(), 0.0);
    parallel_for_index(res.targets.size(), cfg.threads, [&](std::size_t i) {
        const AttackResult r =
            dispatch_attack(trial_cfg, ds, split, res.targets[i], clean);
        res.budgets[i] = r.required_budget;
        res.pre_margins[i] = r.margins.front();
    });
    return res;
}

LabeledDataset resolve_dataset(const ExperimentConfig& cfg) {
    if (cfg.dataset.manifest_path.has_value())
        return load_dataset(*cfg.dataset.manifest_path);
    if (cfg.dataset.synthetic.has_value())
        return generate_dataset(*cfg.dataset.synthetic).dataset;
    throw UsageError("experiment: no dataset source configured");
}

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
    if (cfg.num_targets < 1 || cfg.num_trials < 1)
        throw UsageError("experiment: num_targets and num_trials must be >= 1");
    ExperimentReport report;
    report.config = cfg;

    const LabeledDataset ds = resolve_dataset(cfg);
    report.dataset_nodes = ds.node_count();
    report.dataset_edges = ds.graph.edge_count();
    if (ds.num_classes == 2) {
        report.dataset_delta = homophily_delta(ds.graph, ds.labels);
        report.dataset_heterophilicity = heterophilicity(ds.graph, ds.labels);
    }

    std::vector<std::vector<std::size_t>> per_trial_budgets;
    for (std::size_t t = 0; t < cfg.num_trials; ++t) {
        report.trials.push_back(run_trial(cfg, ds, t));
        per_trial_budgets.push_back(report.trials.back().budgets);
    }
    report.curve = robustness_curve(per_trial_budgets, default_probability_grid());
    return report;
}

}  // namespace graphrob

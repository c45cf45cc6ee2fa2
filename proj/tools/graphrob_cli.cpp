#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "graphrob/dataset_io.hpp"
#include "graphrob/report_io.hpp"
#include "graphrob/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw graphrob::DataError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& path, const std::string& bytes) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw graphrob::DataError("cannot write file: " + path.string());
    out << bytes;
}

graphrob::Split select_split(const graphrob::LabeledDataset& ds,
                             const std::string& method, double t_train,
                             double t_val, std::uint64_t seed) {
    switch (graphrob::SelectionMethod m =
                [&] {
                    if (method == "random") return graphrob::SelectionMethod::Random;
                    if (method == "strat-degree" || method == "strat_degree")
                        return graphrob::SelectionMethod::StratDegree;
                    if (method == "greedy-cover" || method == "greedy_cover")
                        return graphrob::SelectionMethod::GreedyCover;
                    throw graphrob::UsageError("unknown selection method: " + method);
                }();
            m) {
        case graphrob::SelectionMethod::Random:
            return graphrob::stratified_random_split(ds, t_train, t_val, seed);
        case graphrob::SelectionMethod::StratDegree:
            return graphrob::strat_degree_select(ds, t_train, seed, t_val);
        case graphrob::SelectionMethod::GreedyCover:
            return graphrob::greedy_cover_select(ds, t_train, seed, t_val).split;
    }
    throw graphrob::UsageError("unknown selection method: " + method);
}

graphrob::VictimConfig make_victim(const std::string& kind, std::uint64_t seed) {
    graphrob::VictimConfig cfg;
    if (kind == "gcn") cfg.kind = graphrob::ClassifierKind::Gcn;
    else if (kind == "sgc") cfg.kind = graphrob::ClassifierKind::Sgc;
    else if (kind == "jaccard") cfg.kind = graphrob::ClassifierKind::JaccardGcn;
    else if (kind == "svd") cfg.kind = graphrob::ClassifierKind::SvdGcn;
    else throw graphrob::UsageError("unknown classifier: " + kind);
    cfg.train.seed = seed;
    return cfg;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Training-set selection, structure attacks and robustness "
                 "evaluation for graph vertex classifiers"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 0;
    std::string config_path;
    std::size_t threads = 0;
    std::string out_path = "out";
    app.add_option("--seed", seed, "Master random seed");
    app.add_option("--config", config_path, "Experiment config JSON file");
    app.add_option("--threads", threads, "Worker threads (0 = hardware)");
    app.add_option("--out", out_path, "Output path (file or directory)");

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic dataset");
    std::string gen_model = "er";
    std::size_t gen_n = 1200;
    std::string gen_homophily = "high";
    double gen_delta_fraction = 1.0;
    bool gen_delta_fraction_set = false;
    std::string gen_attrs = "none";
    bool gen_no_one_hot = false;
    std::string gen_name = "synthetic";
    gen->add_option("--model", gen_model, "Topology model: er|ba|ws|lfr");
    gen->add_option("--n", gen_n, "Node count before component extraction");
    gen->add_option("--homophily", gen_homophily,
                    "Label homophily scenario: high|half|none");
    gen->add_option("--delta-fraction", gen_delta_fraction,
                    "Fraction of the initial homophily gap to keep")
        ->each([&](const std::string&) { gen_delta_fraction_set = true; });
    gen->add_option("--attrs", gen_attrs,
                    "Attribute informativeness: none|0.5|0.7|0.9");
    gen->add_flag("--no-one-hot", gen_no_one_hot,
                  "Skip the one-hot index attribute block");
    gen->add_option("--name", gen_name, "Dataset name in the manifest");

    // select
    auto* sel = app.add_subcommand("select", "Emit a train/val/test split");
    std::string sel_dataset, sel_method = "random";
    double sel_t_train = 0.1, sel_t_val = 0.1;
    sel->add_option("--dataset", sel_dataset, "Dataset manifest path")->required();
    sel->add_option("--method", sel_method, "random|strat-degree|greedy-cover");
    sel->add_option("--t-train", sel_t_train, "Training fraction");
    sel->add_option("--t-val", sel_t_val, "Validation fraction");

    // train
    auto* trn = app.add_subcommand("train", "Train a classifier, emit checkpoint");
    std::string trn_dataset, trn_split, trn_classifier = "gcn";
    std::string trn_method = "random";
    double trn_t_train = 0.1, trn_t_val = 0.1;
    trn->add_option("--dataset", trn_dataset, "Dataset manifest path")->required();
    trn->add_option("--split", trn_split, "Split JSON (else --method is used)");
    trn->add_option("--method", trn_method, "Selection method when no split given");
    trn->add_option("--t-train", trn_t_train, "Training fraction");
    trn->add_option("--t-val", trn_t_val, "Validation fraction");
    trn->add_option("--classifier", trn_classifier, "gcn|sgc|jaccard|svd");

    // attack
    auto* atk = app.add_subcommand("attack", "Attack targets, emit JSONL results");
    std::string atk_dataset, atk_split, atk_classifier = "gcn";
    std::string atk_kind = "surrogate", atk_mode = "direct", atk_targets;
    std::string atk_method = "random";
    double atk_t_train = 0.1, atk_t_val = 0.1;
    std::size_t atk_budget = 0, atk_num_targets = 25, atk_hops = 2;
    atk->add_option("--dataset", atk_dataset, "Dataset manifest path")->required();
    atk->add_option("--split", atk_split, "Split JSON (else --method is used)");
    atk->add_option("--method", atk_method, "Selection method when no split given");
    atk->add_option("--t-train", atk_t_train, "Training fraction");
    atk->add_option("--t-val", atk_t_val, "Validation fraction");
    atk->add_option("--classifier", atk_classifier, "gcn|sgc|jaccard|svd");
    atk->add_option("--attack", atk_kind, "surrogate|fga|sga");
    atk->add_option("--mode", atk_mode, "direct|influence");
    atk->add_option("--budget", atk_budget, "Flip budget (0 = mode default)");
    atk->add_option("--sga-hops", atk_hops, "Subgraph radius for SGA");
    atk->add_option("--targets", atk_targets, "Comma-separated target ids");
    atk->add_option("--num-targets", atk_num_targets,
                    "Targets sampled when --targets is not given");

    // run
    auto* run = app.add_subcommand("run", "Full experiment: curve CSV + report");

    // report-merge
    auto* mrg = app.add_subcommand("report-merge",
                                   "Upper envelope across report JSON files");
    std::vector<std::string> mrg_reports;
    mrg->add_option("reports", mrg_reports, "Report JSON paths")->required();

    CLI11_PARSE(app, argc, argv);

    if (gen->parsed()) {
        graphrob::SyntheticSpec spec;
        spec.topology.model = [&] {
            if (gen_model == "er") return graphrob::TopologyModel::ER;
            if (gen_model == "ba") return graphrob::TopologyModel::BA;
            if (gen_model == "ws") return graphrob::TopologyModel::WS;
            if (gen_model == "lfr") return graphrob::TopologyModel::LFR;
            throw graphrob::UsageError("unknown topology model: " + gen_model);
        }();
        spec.topology.n = gen_n;
        spec.topology.seed = seed;
        spec.labels.seed = graphrob::derive_seed(seed, {21});
        if (gen_delta_fraction_set) {
            spec.labels.target_delta_fraction = gen_delta_fraction;
        } else if (gen_homophily == "high") {
            spec.labels.target_delta_fraction = 1.0;
        } else if (gen_homophily == "half") {
            spec.labels.target_delta_fraction = 0.5;
        } else if (gen_homophily == "none") {
            spec.labels.target_delta_fraction = 0.0;
        } else {
            throw graphrob::UsageError("unknown homophily scenario: " + gen_homophily);
        }
        if (gen_attrs != "none") {
            graphrob::AttributeConfig a;
            const double target = std::stod(gen_attrs);
            a.shift = graphrob::calibrate_attribute_shift(
                a, target, 10, graphrob::derive_seed(seed, {22}));
            a.one_hot_index = !gen_no_one_hot;
            spec.attributes = a;
        } else if (!gen_no_one_hot) {
            graphrob::AttributeConfig a;
            a.num_attrs = 0;
            a.one_hot_index = true;
            spec.attributes = a;
        }
        const graphrob::SyntheticResult res = graphrob::generate_dataset(spec);
        ordered_json prov;
        prov["generator"] = {{"model", gen_model},
                             {"n", gen_n},
                             {"seed", seed},
                             {"delta_fraction", spec.labels.target_delta_fraction},
                             {"attrs", gen_attrs},
                             {"one_hot_index", !gen_no_one_hot}};
        prov["initial_delta"] = res.initial_delta;
        prov["delta"] = res.final_delta;
        prov["heterophilicity"] = res.heterophilicity;
        graphrob::save_dataset(res.dataset, out_path, gen_name, prov);
        std::printf("dataset written to %s (n=%zu, edges=%zu, delta=%lld, H=%.4f)\n",
                    out_path.c_str(), res.dataset.node_count(),
                    res.dataset.graph.edge_count(), res.final_delta,
                    res.heterophilicity);
        return 0;
    }

    if (sel->parsed()) {
        const auto ds = graphrob::load_dataset(sel_dataset);
        const auto split = select_split(ds, sel_method, sel_t_train, sel_t_val, seed);
        const fs::path out = fs::path(out_path).has_extension()
                                 ? fs::path(out_path)
                                 : fs::path(out_path) / "split.json";
        write_text(out, graphrob::split_to_json(split).dump(2) + "\n");
        std::printf("split written to %s (train=%zu val=%zu test=%zu)\n",
                    out.string().c_str(), split.train.size(), split.val.size(),
                    split.test.size());
        return 0;
    }

    auto load_split = [&](const graphrob::LabeledDataset& ds,
                          const std::string& split_path, const std::string& method,
                          double t_train, double t_val) {
        if (!split_path.empty())
            return graphrob::split_from_json(json::parse(read_text(split_path)), ds);
        return select_split(ds, method, t_train, t_val, seed);
    };

    if (trn->parsed()) {
        const auto ds = graphrob::load_dataset(trn_dataset);
        const auto split = load_split(ds, trn_split, trn_method, trn_t_train, trn_t_val);
        auto victim_cfg = make_victim(trn_classifier, seed);
        const auto model = graphrob::train_victim(ds, split, victim_cfg);
        const auto metrics = graphrob::evaluate_metrics(model.proba(), ds.labels,
                                                        split.test, ds.num_classes);
        ordered_json j = graphrob::model_to_json(model);
        j["metrics"] = {{"accuracy", metrics.accuracy},
                        {"macro_f1", metrics.macro_f1},
                        {"per_class_f1", metrics.per_class_f1}};
        const fs::path out = fs::path(out_path).has_extension()
                                 ? fs::path(out_path)
                                 : fs::path(out_path) / "model.json";
        write_text(out, j.dump(2) + "\n");
        std::printf("model written to %s (accuracy=%.4f macro_f1=%.4f)\n",
                    out.string().c_str(), metrics.accuracy, metrics.macro_f1);
        return 0;
    }

    if (atk->parsed()) {
        const auto ds = graphrob::load_dataset(atk_dataset);
        const auto split = load_split(ds, atk_split, atk_method, atk_t_train, atk_t_val);
        auto victim_cfg = make_victim(atk_classifier, seed);
        graphrob::AttackSpec spec;
        spec.kind = [&] {
            if (atk_kind == "surrogate" || atk_kind == "surrogate_greedy")
                return graphrob::AttackKind::SurrogateGreedy;
            if (atk_kind == "fga") return graphrob::AttackKind::Fga;
            if (atk_kind == "sga") return graphrob::AttackKind::Sga;
            throw graphrob::UsageError("unknown attack kind: " + atk_kind);
        }();
        spec.mode = atk_mode == "influence" ? graphrob::AttackMode::Influence
                                            : graphrob::AttackMode::Direct;
        spec.budget = atk_budget;
        spec.sga_hops = atk_hops;
        if (spec.kind == graphrob::AttackKind::Sga)
            victim_cfg.kind = graphrob::ClassifierKind::Sgc;

        std::vector<graphrob::NodeId> targets;
        if (!atk_targets.empty()) {
            std::istringstream ss(atk_targets);
            std::string tok;
            while (std::getline(ss, tok, ','))
                targets.push_back(static_cast<graphrob::NodeId>(std::stoul(tok)));
        } else {
            const auto victim = graphrob::train_victim(ds, split, victim_cfg);
            const auto preds =
                graphrob::predict_margins(victim.proba(), ds.labels, split.test);
            std::vector<graphrob::NodeId> eligible;
            for (const auto& p : preds)
                if (p.margin > 0.0) eligible.push_back(p.node);
            graphrob::Rng rng(graphrob::derive_seed(seed, {3}));
            const std::size_t want = std::min<std::size_t>(atk_num_targets, eligible.size());
            for (std::size_t i = 0; i < want; ++i) {
                const std::size_t j =
                    i + static_cast<std::size_t>(rng.below(eligible.size() - i));
                std::swap(eligible[i], eligible[j]);
            }
            eligible.resize(want);
            std::sort(eligible.begin(), eligible.end());
            targets = std::move(eligible);
        }

        const auto clean = graphrob::train_clean_models(ds, split, victim_cfg);
        std::vector<graphrob::AttackResult> results(targets.size());
        graphrob::parallel_for_index(targets.size(), threads, [&](std::size_t i) {
            switch (spec.kind) {
                case graphrob::AttackKind::SurrogateGreedy:
                    results[i] = graphrob::surrogate_greedy_attack(
                        ds, split, victim_cfg, targets[i], spec, &clean);
                    break;
                case graphrob::AttackKind::Fga:
                    results[i] = graphrob::fga_attack(ds, split, victim_cfg,
                                                      targets[i], spec, &clean);
                    break;
                case graphrob::AttackKind::Sga:
                    results[i] = graphrob::sga_attack(ds, split, victim_cfg,
                                                      targets[i], spec, &clean);
                    break;
            }
        });
        std::string lines;
        for (const auto& r : results)
            lines += graphrob::attack_result_to_json(r).dump() + "\n";
        const fs::path out = fs::path(out_path).has_extension()
                                 ? fs::path(out_path)
                                 : fs::path(out_path) / "attacks.jsonl";
        write_text(out, lines);
        std::printf("attack results written to %s (%zu targets)\n",
                    out.string().c_str(), results.size());
        return 0;
    }

    if (run->parsed()) {
        if (config_path.empty())
            throw graphrob::UsageError("run: --config is required");
        graphrob::ExperimentConfig cfg =
            graphrob::config_from_json(json::parse(read_text(config_path)));
        for (const std::string& flag : {"--seed"})
            (void)flag;  // flags below override file values
        if (app.count("--seed") > 0) cfg.master_seed = seed;
        if (app.count("--threads") > 0) cfg.threads = threads;
        const auto report = graphrob::run_experiment(cfg);
        const fs::path dir(out_path);
        fs::create_directories(dir);
        write_text(dir / "report.json",
                   graphrob::report_to_json(report).dump(2) + "\n");
        write_text(dir / "curve.csv", graphrob::curve_to_csv(report.curve));
        std::printf("experiment written to %s (trials=%zu, targets/trial=%zu)\n",
                    dir.string().c_str(), report.trials.size(), cfg.num_targets);
        return 0;
    }

    if (mrg->parsed()) {
        std::vector<json> reports;
        std::vector<std::string> labels;
        for (const auto& path : mrg_reports) {
            reports.push_back(json::parse(read_text(path)));
            labels.push_back(fs::path(path).stem().string());
        }
        const std::string csv = graphrob::merge_reports_csv(reports, labels);
        const fs::path out = fs::path(out_path).has_extension()
                                 ? fs::path(out_path)
                                 : fs::path(out_path) / "envelope.csv";
        write_text(out, csv);
        std::printf("envelope written to %s\n", out.string().c_str());
        return 0;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const graphrob::Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return static_cast<int>(e.kind());
    } catch (const nlohmann::json::exception& e) {
        std::fprintf(stderr, "error: invalid JSON: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
}

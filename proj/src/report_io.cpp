#include "graphrob/report_io.hpp"

#include <algorithm>
#include <cstdio>

namespace graphrob {

namespace {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

const char* selection_name(SelectionMethod m) {
    switch (m) {
        case SelectionMethod::Random: return "random";
        case SelectionMethod::StratDegree: return "strat_degree";
        case SelectionMethod::GreedyCover: return "greedy_cover";
    }
    return "random";
}

SelectionMethod selection_from_name(const std::string& s) {
    if (s == "random") return SelectionMethod::Random;
    if (s == "strat_degree" || s == "strat-degree") return SelectionMethod::StratDegree;
    if (s == "greedy_cover" || s == "greedy-cover") return SelectionMethod::GreedyCover;
    throw UsageError("unknown selection method: " + s);
}

const char* classifier_name(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Gcn: return "gcn";
        case ClassifierKind::Sgc: return "sgc";
        case ClassifierKind::JaccardGcn: return "jaccard_gcn";
        case ClassifierKind::SvdGcn: return "svd_gcn";
    }
    return "gcn";
}

ClassifierKind classifier_from_name(const std::string& s) {
    if (s == "gcn") return ClassifierKind::Gcn;
    if (s == "sgc") return ClassifierKind::Sgc;
    if (s == "jaccard_gcn" || s == "jaccard") return ClassifierKind::JaccardGcn;
    if (s == "svd_gcn" || s == "svd") return ClassifierKind::SvdGcn;
    throw UsageError("unknown classifier kind: " + s);
}

const char* attack_name(AttackKind k) {
    switch (k) {
        case AttackKind::SurrogateGreedy: return "surrogate_greedy";
        case AttackKind::Fga: return "fga";
        case AttackKind::Sga: return "sga";
    }
    return "surrogate_greedy";
}

AttackKind attack_from_name(const std::string& s) {
    if (s == "surrogate_greedy" || s == "surrogate" || s == "nettack")
        return AttackKind::SurrogateGreedy;
    if (s == "fga") return AttackKind::Fga;
    if (s == "sga") return AttackKind::Sga;
    throw UsageError("unknown attack kind: " + s);
}

const char* topology_name(TopologyModel m) {
    switch (m) {
        case TopologyModel::ER: return "er";
        case TopologyModel::BA: return "ba";
        case TopologyModel::WS: return "ws";
        case TopologyModel::LFR: return "lfr";
    }
    return "er";
}

TopologyModel topology_from_name(const std::string& s) {
    if (s == "er") return TopologyModel::ER;
    if (s == "ba") return TopologyModel::BA;
    if (s == "ws") return TopologyModel::WS;
    if (s == "lfr") return TopologyModel::LFR;
    throw UsageError("unknown topology model: " + s);
}

}  // namespace

nlohmann::ordered_json split_to_json(const Split& split) {
    nlohmann::ordered_json j;
    j["train"] = split.train;
    j["val"] = split.val;
    j["test"] = split.test;
    j["method"] = split.method;
    j["seed"] = split.seed;
    if (split.final_k.has_value()) j["final_k"] = *split.final_k;
    return j;
}

Split split_from_json(const nlohmann::json& j, const LabeledDataset& ds) {
    Split s;
    try {
        s.train = j.at("train").get<std::vector<NodeId>>();
        s.val = j.at("val").get<std::vector<NodeId>>();
        s.test = j.at("test").get<std::vector<NodeId>>();
        s.method = j.value("method", "");
        s.seed = j.value("seed", std::uint64_t{0});
        if (j.contains("final_k")) s.final_k = j.at("final_k").get<int>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("split: invalid JSON: ") + e.what());
    }
    std::sort(s.train.begin(), s.train.end());
    std::sort(s.val.begin(), s.val.end());
    std::sort(s.test.begin(), s.test.end());
    s.class_counts.assign(static_cast<std::size_t>(ds.num_classes), {0, 0, 0});
    for (NodeId u : s.train) ++s.class_counts[ds.labels[u]][0];
    for (NodeId u : s.val) ++s.class_counts[ds.labels[u]][1];
    for (NodeId u : s.test) ++s.class_counts[ds.labels[u]][2];
    s.validate(ds);
    return s;
}

nlohmann::ordered_json attack_result_to_json(const AttackResult& res) {
    nlohmann::ordered_json j;
    j["target"] = res.target;
    auto flips = nlohmann::ordered_json::array();
    for (const EdgeFlip& f : res.flips)
        flips.push_back({{"u", f.u}, {"v", f.v}, {"op", f.add ? "add" : "remove"}});
    j["flips"] = flips;
    j["margins"] = res.margins;
    j["success"] = res.success;
    j["required_budget"] = res.required_budget;
    return j;
}

nlohmann::ordered_json model_to_json(const VictimModel& model) {
    nlohmann::ordered_json j;
    auto weights = [](const DenseMatrix& w) {
        nlohmann::ordered_json m;
        m["rows"] = w.rows;
        m["cols"] = w.cols;
        m["data"] = w.data;
        return m;
    };
    if (const auto* gcn = std::get_if<GcnModel>(&model.model)) {
        j["kind"] = "gcn";
        j["hidden"] = gcn->config.hidden;
        j["add_self_loops"] = gcn->config.add_self_loops;
        j["row_normalize"] = gcn->config.row_normalize;
        j["seed"] = gcn->config.seed;
        j["best_epoch"] = gcn->best_epoch;
        j["best_val_loss"] = gcn->best_val_loss;
        j["w1"] = weights(gcn->w1);
        j["w2"] = weights(gcn->w2);
    } else {
        const auto& sgc = std::get<SgcModel>(model.model);
        j["kind"] = "sgc";
        j["power"] = sgc.power;
        j["add_self_loops"] = sgc.config.add_self_loops;
        j["row_normalize"] = sgc.config.row_normalize;
        j["seed"] = sgc.config.seed;
        j["best_epoch"] = sgc.best_epoch;
        j["best_val_loss"] = sgc.best_val_loss;
        j["w"] = weights(sgc.w);
    }
    return j;
}

nlohmann::ordered_json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json ds;
    if (cfg.dataset.manifest_path.has_value()) {
        ds["manifest"] = *cfg.dataset.manifest_path;
    } else if (cfg.dataset.synthetic.has_value()) {
        const SyntheticSpec& s = *cfg.dataset.synthetic;
        nlohmann::ordered_json t;
        t["model"] = topology_name(s.topology.model);
        t["n"] = s.topology.n;
        t["seed"] = s.topology.seed;
        t["er_p"] = s.topology.er_p;
        t["ba_m"] = s.topology.ba_m;
        t["ba_seed_star"] = s.topology.ba_seed_star;
        t["ws_k_side"] = s.topology.ws_k_side;
        t["ws_rewire_p"] = s.topology.ws_rewire_p;
        t["lfr_degree_exponent"] = s.topology.lfr_degree_exponent;
        t["lfr_avg_degree"] = s.topology.lfr_avg_degree;
        t["lfr_max_degree"] = s.topology.lfr_max_degree;
        t["lfr_community_exponent"] = s.topology.lfr_community_exponent;
        t["lfr_min_community"] = s.topology.lfr_min_community;
        t["lfr_mixing"] = s.topology.lfr_mixing;
        ds["synthetic"] = t;
        ds["label"] = {{"delta_fraction", s.labels.target_delta_fraction},
                       {"seed", s.labels.seed}};
        if (s.attributes.has_value()) {
            ds["attributes"] = {{"num_attrs", s.attributes->num_attrs},
                                {"p0", s.attributes->p0},
                                {"tau", s.attributes->tau},
                                {"shift", s.attributes->shift},
                                {"one_hot_index", s.attributes->one_hot_index}};
        } else {
            ds["attributes"] = nullptr;
        }
    }
    j["dataset"] = ds;
    j["selection"] = {{"method", selection_name(cfg.selection)},
                      {"t_train", cfg.t_train},
                      {"t_val", cfg.t_val}};
    j["classifier"] = {{"kind", classifier_name(cfg.victim.kind)},
                       {"hidden", cfg.victim.train.hidden},
                       {"learning_rate", cfg.victim.train.learning_rate},
                       {"weight_decay", cfg.victim.train.weight_decay},
                       {"epochs", cfg.victim.train.epochs},
                       {"patience", cfg.victim.train.patience},
                       {"dropout", cfg.victim.train.dropout},
                       {"add_self_loops", cfg.victim.train.add_self_loops},
                       {"row_normalize", cfg.victim.train.row_normalize},
                       {"jaccard_threshold", cfg.victim.jaccard_threshold},
                       {"svd_rank", cfg.victim.svd_rank},
                       {"sgc_power", cfg.victim.sgc_power}};
    j["attack"] = {{"kind", attack_name(cfg.attack.kind)},
                   {"mode", cfg.attack.mode == AttackMode::Direct ? "direct" : "influence"},
                   {"budget", cfg.attack.effective_budget()},
                   {"sga_hops", cfg.attack.sga_hops}};
    j["num_targets"] = cfg.num_targets;
    j["num_trials"] = cfg.num_trials;
    j["seed"] = cfg.master_seed;
    j["threads"] = cfg.threads;
    return j;
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
    ExperimentConfig cfg;
    try {
        if (j.contains("dataset")) {
            const auto& ds = j.at("dataset");
            if (ds.contains("manifest")) {
                cfg.dataset.manifest_path = ds.at("manifest").get<std::string>();
            } else if (ds.contains("synthetic")) {
                SyntheticSpec s;
                const auto& t = ds.at("synthetic");
                s.topology.model = topology_from_name(t.value("model", "er"));
                s.topology.n = t.value("n", s.topology.n);
                s.topology.seed = t.value("seed", s.topology.seed);
                s.topology.er_p = t.value("er_p", s.topology.er_p);
                s.topology.ba_m = t.value("ba_m", s.topology.ba_m);
                s.topology.ba_seed_star = t.value("ba_seed_star", s.topology.ba_seed_star);
                s.topology.ws_k_side = t.value("ws_k_side", s.topology.ws_k_side);
                s.topology.ws_rewire_p = t.value("ws_rewire_p", s.topology.ws_rewire_p);
                s.topology.lfr_degree_exponent =
                    t.value("lfr_degree_exponent", s.topology.lfr_degree_exponent);
                s.topology.lfr_avg_degree =
                    t.value("lfr_avg_degree", s.topology.lfr_avg_degree);
                s.topology.lfr_max_degree =
                    t.value("lfr_max_degree", s.topology.lfr_max_degree);
                s.topology.lfr_community_exponent =
                    t.value("lfr_community_exponent", s.topology.lfr_community_exponent);
                s.topology.lfr_min_community =
                    t.value("lfr_min_community", s.topology.lfr_min_community);
                s.topology.lfr_mixing = t.value("lfr_mixing", s.topology.lfr_mixing);
                if (ds.contains("label")) {
                    s.labels.target_delta_fraction =
                        ds.at("label").value("delta_fraction", 1.0);
                    s.labels.seed = ds.at("label").value("seed", std::uint64_t{0});
                }
                if (ds.contains("attributes") && !ds.at("attributes").is_null()) {
                    AttributeConfig a;
                    const auto& aj = ds.at("attributes");
                    a.num_attrs = aj.value("num_attrs", a.num_attrs);
                    a.p0 = aj.value("p0", a.p0);
                    a.tau = aj.value("tau", a.tau);
                    a.shift = aj.value("shift", a.shift);
                    a.one_hot_index = aj.value("one_hot_index", a.one_hot_index);
                    s.attributes = a;
                }
                cfg.dataset.synthetic = s;
            }
        }
        if (j.contains("selection")) {
            const auto& sel = j.at("selection");
            cfg.selection = selection_from_name(sel.value("method", "random"));
            cfg.t_train = sel.value("t_train", cfg.t_train);
            cfg.t_val = sel.value("t_val", cfg.t_val);
        }
        if (j.contains("classifier")) {
            const auto& c = j.at("classifier");
            cfg.victim.kind = classifier_from_name(c.value("kind", "gcn"));
            cfg.victim.train.hidden = c.value("hidden", cfg.victim.train.hidden);
            cfg.victim.train.learning_rate =
                c.value("learning_rate", cfg.victim.train.learning_rate);
            cfg.victim.train.weight_decay =
                c.value("weight_decay", cfg.victim.train.weight_decay);
            cfg.victim.train.epochs = c.value("epochs", cfg.victim.train.epochs);
            cfg.victim.train.patience = c.value("patience", cfg.victim.train.patience);
            cfg.victim.train.dropout = c.value("dropout", cfg.victim.train.dropout);
            cfg.victim.train.add_self_loops =
                c.value("add_self_loops", cfg.victim.train.add_self_loops);
            cfg.victim.train.row_normalize =
                c.value("row_normalize", cfg.victim.train.row_normalize);
            cfg.victim.jaccard_threshold =
                c.value("jaccard_threshold", cfg.victim.jaccard_threshold);
            cfg.victim.svd_rank = c.value("svd_rank", cfg.victim.svd_rank);
            cfg.victim.sgc_power = c.value("sgc_power", cfg.victim.sgc_power);
        }
        if (j.contains("attack")) {
            const auto& a = j.at("attack");
            cfg.attack.kind = attack_from_name(a.value("kind", "surrogate_greedy"));
            const std::string mode = a.value("mode", "direct");
            if (mode == "direct")
                cfg.attack.mode = AttackMode::Direct;
            else if (mode == "influence")
                cfg.attack.mode = AttackMode::Influence;
            else
                throw UsageError("unknown attack mode: " + mode);
            cfg.attack.budget = a.value("budget", cfg.attack.budget);
            cfg.attack.sga_hops = a.value("sga_hops", cfg.attack.sga_hops);
        }
        cfg.num_targets = j.value("num_targets", cfg.num_targets);
        cfg.num_trials = j.value("num_trials", cfg.num_trials);
        cfg.master_seed = j.value("seed", cfg.master_seed);
        cfg.threads = j.value("threads", cfg.threads);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("config: invalid JSON: ") + e.what());
    }
    return cfg;
}

nlohmann::ordered_json report_to_json(const ExperimentReport& report) {
    nlohmann::ordered_json j;
    j["config"] = config_to_json(report.config);
    j["dataset"] = {{"nodes", report.dataset_nodes},
                    {"edges", report.dataset_edges},
                    {"delta", report.dataset_delta},
                    {"heterophilicity", report.dataset_heterophilicity}};
    nlohmann::ordered_json curve;
    curve["p"] = report.curve.p;
    curve["mean_budget"] = report.curve.mean_budget;
    curve["stderr"] = report.curve.stderr_budget;
    curve["trials"] = report.curve.trials;
    j["curve"] = curve;
    auto trials = nlohmann::ordered_json::array();
    for (const TrialResult& t : report.trials) {
        nlohmann::ordered_json tj;
        tj["trial"] = t.trial_index;
        tj["seeds"] = {{"split", t.split_seed},
                       {"init", t.init_seed},
                       {"target", t.target_seed}};
        tj["targets"] = t.targets;
        tj["budgets"] = t.budgets;
        tj["pre_margins"] = t.pre_margins;
        tj["accuracy"] = t.accuracy;
        tj["macro_f1"] = t.macro_f1;
        tj["per_class_f1"] = t.per_class_f1;
        tj["test_class_counts"] = t.test_class_counts;
        tj["test_size"] = t.test_size;
        tj["avg_external_neighbors"] = t.avg_external_neighbors;
        if (t.final_k.has_value()) tj["final_k"] = *t.final_k;
        tj["target_shortfall"] = t.target_shortfall;
        trials.push_back(tj);
    }
    j["trials"] = trials;
    return j;
}

std::string curve_to_csv(const RobustnessCurve& curve) {
    std::string out = "p,mean_budget,stderr,trials\n";
    for (std::size_t i = 0; i < curve.p.size(); ++i) {
        out += format_double(curve.p[i]) + "," + format_double(curve.mean_budget[i]) +
               "," + format_double(curve.stderr_budget[i]) + "," +
               std::to_string(curve.trials) + "\n";
    }
    return out;
}

std::string merge_reports_csv(const std::vector<nlohmann::json>& reports,
                              const std::vector<std::string>& labels) {
    if (reports.empty()) throw UsageError("report merge: no reports given");
    std::string out = "p,best_mean_budget,stderr,source\n";
    std::vector<double> grid;
    try {
        grid = reports[0].at("curve").at("p").get<std::vector<double>>();
        for (std::size_t i = 0; i < grid.size(); ++i) {
            double best = -1.0, best_err = 0.0;
            std::size_t best_idx = 0;
            for (std::size_t r = 0; r < reports.size(); ++r) {
                const auto& curve = reports[r].at("curve");
                const auto p = curve.at("p").get<std::vector<double>>();
                if (p.size() != grid.size() || std::abs(p[i] - grid[i]) > 1e-12)
                    throw DataError("report merge: probability grids differ");
                const double mean = curve.at("mean_budget").at(i).get<double>();
                if (mean > best) {
                    best = mean;
                    best_err = curve.at("stderr").at(i).get<double>();
                    best_idx = r;
                }
            }
            out += format_double(grid[i]) + "," + format_double(best) + "," +
                   format_double(best_err) + "," + labels[best_idx] + "\n";
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("report merge: invalid report JSON: ") + e.what());
    }
    return out;
}

}  // namespace graphrob

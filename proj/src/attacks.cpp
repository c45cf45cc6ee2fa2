#include "graphrob/attacks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <set>
#include <string>

namespace graphrob {

namespace {

bool flip_less(const EdgeFlip& a, const EdgeFlip& b) {
    if (a.u != b.u) return a.u < b.u;
    if (a.v != b.v) return a.v < b.v;
    return a.add && !b.add;
}

EdgeFlip normalized(NodeId a, NodeId b, bool add) {
    return a < b ? EdgeFlip{a, b, add} : EdgeFlip{b, a, add};
}

/// Removal is legal only if neither endpoint would be isolated.
bool removal_ok(const Graph& g, NodeId a, NodeId b) {
    return g.degree(a) > 1 && g.degree(b) > 1;
}

void softmax_inplace(std::vector<double>& row) {
    double mx = -std::numeric_limits<double>::infinity();
    for (double v : row) mx = std::max(mx, v);
    double sum = 0.0;
    for (double& v : row) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : row) v /= sum;
}

void softmax_rows(DenseMatrix& m) {
    std::vector<double> row(m.cols);
    for (std::size_t i = 0; i < m.rows; ++i) {
        for (std::size_t c = 0; c < m.cols; ++c) row[c] = m(i, c);
        softmax_inplace(row);
        for (std::size_t c = 0; c < m.cols; ++c) m(i, c) = row[c];
    }
}

}  // namespace

std::vector<EdgeFlip> candidate_flips(const Graph& g, NodeId target,
                                      AttackMode mode) {
    const std::size_t n = g.node_count();
    if (target >= n) throw UsageError("candidate_flips: target out of range");
    std::vector<EdgeFlip> out;
    if (mode == AttackMode::Direct) {
        for (NodeId v = 0; v < n; ++v) {
            if (v == target) continue;
            if (g.has_edge(target, v)) {
                if (removal_ok(g, target, v))
                    out.push_back(normalized(target, v, false));
            } else {
                out.push_back(normalized(target, v, true));
            }
        }
    } else {
        std::set<std::pair<NodeId, NodeId>> pairs;
        for (NodeId u : g.neighbors(target)) {
            for (NodeId v = 0; v < n; ++v) {
                if (v == u || v == target) continue;
                pairs.insert(u < v ? std::make_pair(u, v) : std::make_pair(v, u));
            }
        }
        for (const auto& [a, b] : pairs) {
            if (g.has_edge(a, b)) {
                if (removal_ok(g, a, b)) out.push_back({a, b, false});
            } else {
                out.push_back({a, b, true});
            }
        }
    }
    if (out.empty())
        throw DataError("candidate_flips: no legal flips for target " +
                        std::to_string(target));
    std::sort(out.begin(), out.end(), flip_less);
    return out;
}

std::vector<NodeId> k_hop_nodes(const Graph& g, NodeId target, std::size_t hops) {
    std::vector<NodeId> frontier{target};
    std::vector<char> seen(g.node_count(), 0);
    seen[target] = 1;
    std::vector<NodeId> all{target};
    for (std::size_t h = 0; h < hops && !frontier.empty(); ++h) {
        std::vector<NodeId> next;
        for (NodeId u : frontier) {
            for (NodeId v : g.neighbors(u)) {
                if (!seen[v]) {
                    seen[v] = 1;
                    next.push_back(v);
                    all.push_back(v);
                }
            }
        }
        frontier = std::move(next);
    }
    std::sort(all.begin(), all.end());
    return all;
}

namespace {

/// Per-attack scorer for the target's surrogate margin under hypothetical
/// flips. X*W and the inverse-sqrt degree table are cached; a flip only
/// patches the two endpoint degrees and the two adjacency rows on the fly.
class SurrogateScorer {
public:
    SurrogateScorer(const BinaryMatrix& attrs, const DenseMatrix& w,
                    bool row_normalize, std::size_t power, bool self_loops,
                    NodeId target, int true_class)
        : power_(power),
          self_loops_(self_loops),
          target_(target),
          true_class_(static_cast<std::size_t>(true_class)),
          num_classes_(w.cols),
          xw_(attrs.rows, w.cols),
          coeff_(attrs.rows, 0.0),
          next_coeff_(attrs.rows, 0.0),
          logits_(w.cols, 0.0) {
        for (std::size_t i = 0; i < attrs.rows; ++i) {
            const auto& sup = attrs.row_support[i];
            if (sup.empty()) continue;
            const double scale =
                row_normalize ? 1.0 / static_cast<double>(sup.size()) : 1.0;
            double* orow = xw_.data.data() + i * xw_.cols;
            for (NodeId j : sup) {
                const double* wrow = w.data.data() + j * w.cols;
                for (std::size_t c = 0; c < w.cols; ++c) orow[c] += scale * wrow[c];
            }
        }
    }

    /// Must be called whenever the working graph changes.
    void set_graph(const Graph& g) {
        graph_ = &g;
        const std::size_t n = g.node_count();
        inv_sqrt_deg_.resize(n);
        for (NodeId u = 0; u < n; ++u) {
            const double d =
                static_cast<double>(g.degree(u)) + (self_loops_ ? 1.0 : 0.0);
            inv_sqrt_deg_[u] = d > 0.0 ? 1.0 / std::sqrt(d) : 0.0;
        }
    }

    double margin(const std::optional<EdgeFlip>& flip) {
        const Graph& g = *graph_;
        // Patched inverse-sqrt degrees for the flip endpoints.
        NodeId fa = static_cast<NodeId>(-1), fb = fa;
        double isd_a = 0.0, isd_b = 0.0;
        bool adds = false;
        if (flip.has_value()) {
            fa = flip->u;
            fb = flip->v;
            adds = flip->add;
            const double shift = adds ? 1.0 : -1.0;
            const double base = self_loops_ ? 1.0 : 0.0;
            const double da = static_cast<double>(g.degree(fa)) + base + shift;
            const double db = static_cast<double>(g.degree(fb)) + base + shift;
            if (da <= 0.0 || db <= 0.0)
                throw DataError("surrogate score: flip isolates a node");
            isd_a = 1.0 / std::sqrt(da);
            isd_b = 1.0 / std::sqrt(db);
        }
        auto isd = [&](NodeId u) {
            if (u == fa) return isd_a;
            if (u == fb) return isd_b;
            return inv_sqrt_deg_[u];
        };

        touched_.assign(1, target_);
        coeff_[target_] = 1.0;
        for (std::size_t step = 0; step < power_; ++step) {
            next_touched_.clear();
            for (NodeId u : touched_) {
                const double cu = coeff_[u];
                coeff_[u] = 0.0;
                if (cu == 0.0) continue;
                const double w_base = cu * isd(u);
                auto visit = [&](NodeId v) {
                    if (next_coeff_[v] == 0.0 && !(w_base == 0.0))
                        next_touched_.push_back(v);
                    next_coeff_[v] += w_base * isd(v);
                };
                const bool u_is_a = u == fa, u_is_b = u == fb;
                const NodeId removed =
                    (!adds && flip.has_value())
                        ? (u_is_a ? fb : (u_is_b ? fa : static_cast<NodeId>(-1)))
                        : static_cast<NodeId>(-1);
                for (NodeId v : g.neighbors(u)) {
                    if (v == removed) continue;
                    visit(v);
                }
                if (adds && (u_is_a || u_is_b)) visit(u_is_a ? fb : fa);
                if (self_loops_) visit(u);
            }
            std::swap(coeff_, next_coeff_);
            std::swap(touched_, next_touched_);
        }
        std::fill(logits_.begin(), logits_.end(), 0.0);
        for (NodeId w : touched_) {
            const double cw = coeff_[w];
            coeff_[w] = 0.0;
            const double* frow = xw_.data.data() + w * xw_.cols;
            for (std::size_t c = 0; c < num_classes_; ++c)
                logits_[c] += cw * frow[c];
        }
        softmax_inplace(logits_);
        double best_other = -std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < num_classes_; ++c)
            if (c != true_class_) best_other = std::max(best_other, logits_[c]);
        return logits_[true_class_] - best_other;
    }

private:
    std::size_t power_;
    bool self_loops_;
    NodeId target_;
    std::size_t true_class_;
    std::size_t num_classes_;
    DenseMatrix xw_;
    const Graph* graph_ = nullptr;
    std::vector<double> inv_sqrt_deg_;
    std::vector<double> coeff_, next_coeff_;
    std::vector<NodeId> touched_, next_touched_;
    std::vector<double> logits_;
};

LabeledDataset with_graph(const LabeledDataset& ds, Graph g) {
    LabeledDataset out;
    out.graph = std::move(g);
    out.attributes = ds.attributes;
    out.labels = ds.labels;
    out.num_classes = ds.num_classes;
    return out;
}

AttackResult finalize(NodeId target, std::vector<EdgeFlip> flips,
                      std::vector<double> margins, std::size_t max_budget) {
    AttackResult res;
    res.target = target;
    res.flips = std::move(flips);
    res.margins = std::move(margins);
    res.success = false;
    for (double m : res.margins)
        if (m < 0.0) res.success = true;
    res.required_budget = required_budget(res.margins, max_budget);
    return res;
}

/// Shared loop of the surrogate-scored attacks. When hop_limit is set,
/// candidates are restricted to the induced k-hop neighborhood of the target.
AttackResult greedy_surrogate_loop(const LabeledDataset& ds, const Split& split,
                                   const VictimConfig& victim_cfg, NodeId target,
                                   const AttackSpec& spec,
                                   std::optional<std::size_t> hop_limit,
                                   const CleanModels* clean) {
    ds.validate();
    const std::size_t budget = spec.effective_budget();
    const int true_class = ds.labels[target];

    std::optional<CleanModels> own;
    if (clean == nullptr) {
        own = train_clean_models(ds, split, victim_cfg);
        clean = &*own;
    }
    VictimModel victim = clean->victim;
    std::vector<double> margins{victim.margin_of(target, true_class)};

    // Fixed scorer: the linear surrogate is trained once on clean data.
    const TrainConfig& tc = victim_cfg.train;
    SurrogateScorer scorer(ds.attributes, clean->surrogate.w, tc.row_normalize,
                           victim_cfg.sgc_power, tc.add_self_loops, target,
                           true_class);

    Graph current = ds.graph;
    std::vector<EdgeFlip> flips;
    while (flips.size() < budget && margins.back() >= 0.0) {
        std::vector<EdgeFlip> candidates = candidate_flips(current, target, spec.mode);
        if (hop_limit.has_value()) {
            const auto subgraph = k_hop_nodes(current, target, *hop_limit);
            std::erase_if(candidates, [&](const EdgeFlip& f) {
                return !std::binary_search(subgraph.begin(), subgraph.end(), f.u) ||
                       !std::binary_search(subgraph.begin(), subgraph.end(), f.v);
            });
            if (candidates.empty()) break;  // no legal move inside the subgraph
        }
        scorer.set_graph(current);
        const EdgeFlip* best = nullptr;
        double best_margin = std::numeric_limits<double>::infinity();
        for (const EdgeFlip& f : candidates) {
            const double m = scorer.margin(f);
            if (m < best_margin) {
                best_margin = m;
                best = &f;
            }
        }
        current = current.with_edge_flip(best->u, best->v, best->add);
        flips.push_back(*best);

        const LabeledDataset poisoned = with_graph(ds, current);
        victim = train_victim(poisoned, split, victim_cfg);
        margins.push_back(victim.margin_of(target, true_class));
    }
    return finalize(target, std::move(flips), std::move(margins), budget);
}

}  // namespace

CleanModels train_clean_models(const LabeledDataset& ds, const Split& split,
                               const VictimConfig& victim_cfg) {
    CleanModels clean{train_victim(ds, split, victim_cfg),
                      train_sgc(ds, split, victim_cfg.train, victim_cfg.sgc_power)};
    return clean;
}

AttackResult surrogate_greedy_attack(const LabeledDataset& ds, const Split& split,
                                     const VictimConfig& victim_cfg, NodeId target,
                                     const AttackSpec& spec,
                                     const CleanModels* clean) {
    return greedy_surrogate_loop(ds, split, victim_cfg, target, spec, std::nullopt,
                                 clean);
}

AttackResult sga_attack(const LabeledDataset& ds, const Split& split,
                        const VictimConfig& victim_cfg, NodeId target,
                        const AttackSpec& spec, const CleanModels* clean) {
    if (victim_cfg.kind != ClassifierKind::Sgc)
        throw UsageError("sga_attack: victim classifier must be SGC");
    return greedy_surrogate_loop(ds, split, victim_cfg, target, spec,
                                 spec.sga_hops, clean);
}

double surrogate_margin_after_flip(const Graph& g, const BinaryMatrix& attrs,
                                   const DenseMatrix& w, std::size_t power,
                                   bool add_self_loops, bool row_normalize,
                                   NodeId target, int true_class,
                                   const std::optional<EdgeFlip>& flip) {
    SurrogateScorer scorer(attrs, w, row_normalize, power, add_self_loops, target,
                           true_class);
    scorer.set_graph(g);
    return scorer.margin(flip);
}

namespace {

/// Gradient of the target's loss with respect to the normalized propagation
/// matrix, stored as dense rows over the (small) set of nodes where it is
/// nonzero.
struct PropagationGradient {
    std::vector<NodeId> rows;
    std::vector<std::vector<double>> m;

    double entry(NodeId u, NodeId v) const {
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (rows[i] == u) return m[i][v];
        return 0.0;
    }
};

// For the two-layer GCN with Z1 = S P, H = relu(Z1), Z2 = S Q and
// L = CE(target): dL/dS = e_t g2^T Q^T + G1 P^T, where G1 = (S^T G2 W2^T)
// masked by relu'(Z1). Only the target row and rows adjacent to the target
// in S are nonzero.
PropagationGradient gcn_propagation_gradient(const GcnModel& model,
                                             const LabeledDataset& ds,
                                             NodeId target) {
    const std::size_t n = ds.node_count();
    const auto c_count = static_cast<std::size_t>(model.num_classes);
    const bool rn = model.config.row_normalize;

    const DenseMatrix x = detail::binary_to_dense(ds.attributes, rn);
    const DenseMatrix p = matmul(x, model.w1);
    const DenseMatrix z1 = model.prop.apply(p);
    DenseMatrix h = z1;
    for (double& v : h.data) v = std::max(v, 0.0);
    const DenseMatrix q = matmul(h, model.w2);
    DenseMatrix y = model.prop.apply(q);
    softmax_rows(y);

    std::vector<double> g2(c_count);
    for (std::size_t c = 0; c < c_count; ++c) g2[c] = y(target, c);
    g2[static_cast<std::size_t>(ds.labels[target])] -= 1.0;

    DenseMatrix g2m(n, c_count);
    for (std::size_t c = 0; c < c_count; ++c) g2m(target, c) = g2[c];
    const DenseMatrix dq = model.prop.apply(g2m);  // propagation is symmetric
    DenseMatrix g1 = matmul(dq, transpose(model.w2));
    for (std::size_t i = 0; i < g1.data.size(); ++i)
        if (z1.data[i] <= 0.0) g1.data[i] = 0.0;

    std::vector<char> has_row(n, 0);
    has_row[target] = 1;
    for (std::size_t u = 0; u < n; ++u)
        for (std::size_t c = 0; c < c_count; ++c)
            if (g1(u, c) != 0.0) has_row[u] = 1;

    PropagationGradient out;
    for (NodeId u = 0; u < n; ++u) {
        if (!has_row[u]) continue;
        std::vector<double> row(n, 0.0);
        if (u == target)
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t c = 0; c < c_count; ++c) row[j] += g2[c] * q(j, c);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t c = 0; c < c_count; ++c) row[j] += g1(u, c) * p(j, c);
        out.rows.push_back(u);
        out.m.push_back(std::move(row));
    }
    return out;
}

// For SGC with Z = S^k P0 and L = CE(target):
// dL/dS = sum_{j=0}^{k-1} (S^j G) (S^{k-1-j} P0)^T.
PropagationGradient sgc_propagation_gradient(const SgcModel& model,
                                             const LabeledDataset& ds,
                                             NodeId target) {
    const std::size_t n = ds.node_count();
    const auto c_count = static_cast<std::size_t>(model.num_classes);
    const std::size_t k = model.power;
    const bool rn = model.config.row_normalize;

    std::vector<DenseMatrix> ap(k + 1);
    {
        const DenseMatrix x = detail::binary_to_dense(ds.attributes, rn);
        ap[0] = matmul(x, model.w);
    }
    for (std::size_t i = 1; i <= k; ++i) ap[i] = model.prop.apply(ap[i - 1]);

    DenseMatrix y = ap[k];
    softmax_rows(y);

    std::vector<DenseMatrix> ag(std::max<std::size_t>(k, 1));
    ag[0] = DenseMatrix(n, c_count);
    for (std::size_t c = 0; c < c_count; ++c) ag[0](target, c) = y(target, c);
    ag[0](target, static_cast<std::size_t>(ds.labels[target])) -= 1.0;
    for (std::size_t j = 1; j < k; ++j) ag[j] = model.prop.apply(ag[j - 1]);

    std::vector<char> has_row(n, 0);
    for (std::size_t j = 0; j < k; ++j)
        for (std::size_t u = 0; u < n; ++u)
            for (std::size_t c = 0; c < c_count; ++c)
                if (ag[j](u, c) != 0.0) has_row[u] = 1;

    PropagationGradient out;
    for (NodeId u = 0; u < n; ++u) {
        if (!has_row[u]) continue;
        std::vector<double> row(n, 0.0);
        for (std::size_t j = 0; j < k; ++j) {
            bool zero = true;
            for (std::size_t c = 0; c < c_count; ++c)
                if (ag[j](u, c) != 0.0) zero = false;
            if (zero) continue;
            const DenseMatrix& right = ap[k - 1 - j];
            for (std::size_t v = 0; v < n; ++v)
                for (std::size_t c = 0; c < c_count; ++c)
                    row[v] += ag[j](u, c) * right(v, c);
        }
        out.rows.push_back(u);
        out.m.push_back(std::move(row));
    }
    return out;
}

}  // namespace

std::vector<double> fga_flip_gradients(const VictimModel& model,
                                       const LabeledDataset& ds, NodeId target,
                                       std::span<const EdgeFlip> candidates) {
    const Graph& g = ds.graph;
    const std::size_t n = g.node_count();

    PropagationGradient pg;
    bool self_loops;
    if (const auto* gcn = std::get_if<GcnModel>(&model.model)) {
        if (gcn->prop.is_dense())
            throw UsageError("fga gradient: dense propagation not supported");
        pg = gcn_propagation_gradient(*gcn, ds, target);
        self_loops = gcn->config.add_self_loops;
    } else {
        const auto& sgc = std::get<SgcModel>(model.model);
        pg = sgc_propagation_gradient(sgc, ds, target);
        self_loops = sgc.config.add_self_loops;
    }

    // Chain through the normalization: with S = D~^{-1/2} A~ D~^{-1/2},
    // dL/da_uv = M_uv / sqrt(d_u d_v) - r_u/(2 d_u) - r_v/(2 d_v) where
    // r_u = sum_j M_uj S_uj. The reported score symmetrizes over (u,v),(v,u).
    std::vector<double> deg(n);
    for (NodeId u = 0; u < n; ++u)
        deg[u] = static_cast<double>(g.degree(u)) + (self_loops ? 1.0 : 0.0);
    std::vector<double> r(n, 0.0);
    for (std::size_t i = 0; i < pg.rows.size(); ++i) {
        const NodeId u = pg.rows[i];
        const auto& row = pg.m[i];
        double acc = 0.0;
        for (NodeId v : g.neighbors(u)) acc += row[v] / std::sqrt(deg[u] * deg[v]);
        if (self_loops) acc += row[u] / deg[u];
        r[u] = acc;
    }

    std::vector<double> scores;
    scores.reserve(candidates.size());
    for (const EdgeFlip& f : candidates) {
        const double duv = std::sqrt(deg[f.u] * deg[f.v]);
        const double s = (pg.entry(f.u, f.v) + pg.entry(f.v, f.u)) / duv -
                         r[f.u] / deg[f.u] - r[f.v] / deg[f.v];
        scores.push_back(s);
    }
    return scores;
}

AttackResult fga_attack(const LabeledDataset& ds, const Split& split,
                        const VictimConfig& victim_cfg, NodeId target,
                        const AttackSpec& spec, const CleanModels* clean) {
    ds.validate();
    const std::size_t budget = spec.effective_budget();
    const int true_class = ds.labels[target];

    // Defense preprocessors are not differentiable; gradients come from the
    // undefended model of the same family trained on the same data.
    VictimConfig grad_cfg = victim_cfg;
    if (grad_cfg.kind == ClassifierKind::JaccardGcn ||
        grad_cfg.kind == ClassifierKind::SvdGcn)
        grad_cfg.kind = ClassifierKind::Gcn;
    const bool separate_grad_model = grad_cfg.kind != victim_cfg.kind;

    VictimModel victim = clean != nullptr ? clean->victim
                                          : train_victim(ds, split, victim_cfg);
    std::vector<double> margins{victim.margin_of(target, true_class)};

    Graph current = ds.graph;
    LabeledDataset poisoned = with_graph(ds, current);
    std::vector<EdgeFlip> flips;
    while (flips.size() < budget && margins.back() >= 0.0) {
        const auto candidates = candidate_flips(current, target, spec.mode);
        std::optional<VictimModel> grad_own;
        if (separate_grad_model)
            grad_own = train_victim(poisoned, split, grad_cfg);
        const VictimModel& grad_model = separate_grad_model ? *grad_own : victim;
        const auto grads = fga_flip_gradients(grad_model, poisoned, target, candidates);

        // Feasible direction: positive gradient on a non-edge (add) or
        // negative gradient on an edge (remove); largest magnitude wins,
        // ties by candidate order.
        const EdgeFlip* best = nullptr;
        double best_mag = 0.0;
        for (std::size_t i = 0; i < candidates.size(); ++i) {
            const bool feasible =
                candidates[i].add ? grads[i] > 0.0 : grads[i] < 0.0;
            if (!feasible) continue;
            const double mag = std::abs(grads[i]);
            if (mag > best_mag) {
                best_mag = mag;
                best = &candidates[i];
            }
        }
        if (best == nullptr) break;  // no loss-increasing feasible flip

        current = current.with_edge_flip(best->u, best->v, best->add);
        flips.push_back(*best);
        poisoned = with_graph(ds, current);
        victim = train_victim(poisoned, split, victim_cfg);
        margins.push_back(victim.margin_of(target, true_class));
    }
    return finalize(target, std::move(flips), std::move(margins), budget);
}

std::size_t required_budget(std::span<const double> margins,
                            std::size_t max_budget) {
    if (margins.empty()) throw UsageError("required_budget: empty margin trace");
    for (std::size_t b = 0; b < margins.size(); ++b)
        if (margins[b] < 0.0) return b;
    return max_budget;
}

}  // namespace graphrob

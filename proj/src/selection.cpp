#include "graphrob/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "graphrob/rng.hpp"

namespace graphrob {

namespace {

void check_fractions(const LabeledDataset& ds, double t_train, double t_val) {
    if (t_train < 0.0 || t_val < 0.0 || t_train + t_val >= 1.0)
        throw UsageError("split fractions must satisfy 0 <= t, t_train + t_val < 1");
    const auto members = ds.class_members();
    for (std::size_t c = 0; c < members.size(); ++c) {
        if (members[c].size() < 2)
            throw DataError("class " + std::to_string(c) +
                            " has fewer than 2 members; cannot stratify");
    }
}

/// Per-class quota used by GreedyCover's loop condition |T_c| < t*|V_c|:
/// the ceiling, except exact when t*|V_c| is integral (within fp slack).
std::size_t ceil_quota(double t, std::size_t size) {
    const double q = t * static_cast<double>(size);
    const double r = std::round(q);
    if (std::abs(q - r) < 1e-9) return static_cast<std::size_t>(r);
    return static_cast<std::size_t>(std::ceil(q));
}

/// First `count` elements of a seeded partial shuffle of `pool`, sorted.
std::vector<NodeId> sample_nodes(std::vector<NodeId> pool, std::size_t count,
                                 Rng& rng) {
    count = std::min(count, pool.size());
    for (std::size_t i = 0; i < count; ++i) {
        const std::size_t j = i + static_cast<std::size_t>(rng.below(pool.size() - i));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(count);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/// Assembles a Split from chosen train/val node sets; test is the complement.
Split finish_split(const LabeledDataset& ds, std::vector<NodeId> train,
                   std::vector<NodeId> val, std::string method,
                   std::uint64_t seed) {
    const std::size_t n = ds.node_count();
    std::sort(train.begin(), train.end());
    std::sort(val.begin(), val.end());
    std::vector<char> taken(n, 0);
    for (NodeId u : train) taken[u] = 1;
    for (NodeId u : val) taken[u] = 2;
    Split s;
    s.train = std::move(train);
    s.val = std::move(val);
    s.test.reserve(n - s.train.size() - s.val.size());
    for (NodeId u = 0; u < n; ++u)
        if (!taken[u]) s.test.push_back(u);
    s.class_counts.assign(static_cast<std::size_t>(ds.num_classes), {0, 0, 0});
    for (NodeId u : s.train) ++s.class_counts[ds.labels[u]][0];
    for (NodeId u : s.val) ++s.class_counts[ds.labels[u]][1];
    for (NodeId u : s.test) ++s.class_counts[ds.labels[u]][2];
    s.method = std::move(method);
    s.seed = seed;
    return s;
}

/// Stratified validation draw from whatever remains after train selection.
/// Quotas are apportioned on the original class sizes and clamped to the
/// per-class remainder.
std::vector<NodeId> draw_validation(
    const std::vector<std::vector<NodeId>>& members,
    const std::vector<NodeId>& train, double t_val, Rng& rng) {
    std::vector<std::size_t> sizes(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) sizes[c] = members[c].size();
    const auto quotas = apportion_largest_remainder(sizes, t_val);
    std::vector<char> in_train;
    std::vector<NodeId> val;
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::vector<NodeId> pool;
        for (NodeId u : members[c])
            if (!std::binary_search(train.begin(), train.end(), u))
                pool.push_back(u);
        auto picked = sample_nodes(std::move(pool), quotas[c], rng);
        val.insert(val.end(), picked.begin(), picked.end());
    }
    return val;
}

}  // namespace

std::vector<std::size_t> apportion_largest_remainder(
    std::span<const std::size_t> class_sizes, double fraction) {
    const std::size_t num_classes = class_sizes.size();
    std::size_t total_nodes = 0;
    for (std::size_t s : class_sizes) total_nodes += s;
    const auto target = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(total_nodes)));

    std::vector<std::size_t> quota(num_classes);
    std::vector<double> remainder(num_classes);
    std::size_t assigned = 0;
    for (std::size_t c = 0; c < num_classes; ++c) {
        const double q = fraction * static_cast<double>(class_sizes[c]);
        quota[c] = static_cast<std::size_t>(std::floor(q + 1e-9));
        quota[c] = std::min(quota[c], class_sizes[c]);
        remainder[c] = q - static_cast<double>(quota[c]);
        assigned += quota[c];
    }
    std::vector<std::size_t> order(num_classes);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return remainder[a] > remainder[b];
    });
    for (std::size_t i = 0; assigned < target && i < order.size(); ++i) {
        const std::size_t c = order[i];
        if (quota[c] < class_sizes[c]) {
            ++quota[c];
            ++assigned;
        }
    }
    return quota;
}

void Split::validate(const LabeledDataset& ds) const {
    const std::size_t n = ds.node_count();
    std::vector<int> seen(n, 0);
    for (NodeId u : train) ++seen[u];
    for (NodeId u : val) ++seen[u];
    for (NodeId u : test) ++seen[u];
    for (std::size_t u = 0; u < n; ++u)
        if (seen[u] != 1)
            throw DataError("split: node " + std::to_string(u) +
                            " appears " + std::to_string(seen[u]) + " times");
    for (std::size_t c = 0; c < class_counts.size(); ++c)
        if (class_counts[c][0] == 0 && train.size() > 0)
            throw DataError("split: class " + std::to_string(c) +
                            " missing from train set");
}

Split stratified_random_split(const LabeledDataset& ds, double t_train,
                              double t_val, std::uint64_t seed) {
    check_fractions(ds, t_train, t_val);
    const auto members = ds.class_members();
    std::vector<std::size_t> sizes(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) sizes[c] = members[c].size();

    auto quotas = apportion_largest_remainder(sizes, t_train);
    // Stratification: every class contributes at least one train node; borrow
    // from the largest-quota class when rounding starves one.
    if (t_train > 0.0) {
        for (std::size_t c = 0; c < quotas.size(); ++c) {
            if (quotas[c] > 0) continue;
            const std::size_t donor = static_cast<std::size_t>(std::distance(
                quotas.begin(), std::max_element(quotas.begin(), quotas.end())));
            if (quotas[donor] <= 1)
                throw DataError("class " + std::to_string(c) +
                                " cannot be stratified at this train fraction");
            --quotas[donor];
            ++quotas[c];
        }
    }

    Rng train_rng(derive_seed(seed, {0}));
    std::vector<NodeId> train;
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto picked = sample_nodes(members[c], quotas[c], train_rng);
        train.insert(train.end(), picked.begin(), picked.end());
    }
    std::sort(train.begin(), train.end());

    Rng val_rng(derive_seed(seed, {1}));
    auto val = draw_validation(members, train, t_val, val_rng);
    return finish_split(ds, std::move(train), std::move(val), "random", seed);
}

Split strat_degree_select(const LabeledDataset& ds, double t_train,
                          std::uint64_t seed, double t_val) {
    check_fractions(ds, t_train, t_val);
    const auto members = ds.class_members();
    std::vector<std::size_t> sizes(members.size());
    for (std::size_t c = 0; c < members.size(); ++c) sizes[c] = members[c].size();
    auto quotas = apportion_largest_remainder(sizes, t_train);
    if (t_train > 0.0) {
        for (std::size_t c = 0; c < quotas.size(); ++c) {
            if (quotas[c] > 0) continue;
            const std::size_t donor = static_cast<std::size_t>(std::distance(
                quotas.begin(), std::max_element(quotas.begin(), quotas.end())));
            if (quotas[donor] <= 1)
                throw DataError("class " + std::to_string(c) +
                                " cannot be stratified at this train fraction");
            --quotas[donor];
            ++quotas[c];
        }
    }

    std::vector<NodeId> train;
    for (std::size_t c = 0; c < members.size(); ++c) {
        std::vector<NodeId> by_degree = members[c];
        std::stable_sort(by_degree.begin(), by_degree.end(),
                         [&](NodeId a, NodeId b) {
                             return ds.graph.degree(a) != ds.graph.degree(b)
                                        ? ds.graph.degree(a) > ds.graph.degree(b)
                                        : a < b;
                         });
        by_degree.resize(quotas[c]);
        train.insert(train.end(), by_degree.begin(), by_degree.end());
    }
    std::sort(train.begin(), train.end());

    Rng val_rng(derive_seed(seed, {1}));
    auto val = draw_validation(members, train, t_val, val_rng);
    return finish_split(ds, std::move(train), std::move(val), "strat_degree", seed);
}

namespace {

/// Incremental score structure for the priority-queue mode: per class, nodes
/// bucketed by their current score #{u' in N(u) : m[u'] = k}.
class ScoreBuckets {
public:
    ScoreBuckets(const LabeledDataset& ds, std::size_t max_degree)
        : ds_(ds),
          buckets_(static_cast<std::size_t>(ds.num_classes),
                   std::vector<std::set<NodeId>>(max_degree + 2)),
          top_(static_cast<std::size_t>(ds.num_classes), 0),
          score_(ds.node_count(), 0),
          selected_(ds.node_count(), 0) {}

    void rebuild(const std::vector<int>& m, int k) {
        for (auto& cls : buckets_)
            for (auto& b : cls) b.clear();
        std::fill(top_.begin(), top_.end(), 0);
        for (NodeId u = 0; u < ds_.node_count(); ++u) {
            if (selected_[u]) continue;
            std::size_t s = 0;
            for (NodeId v : ds_.graph.neighbors(u))
                if (m[v] == k) ++s;
            score_[u] = s;
            insert(u, s);
        }
    }

    /// Best unselected node of class c by (score desc, id asc); nullopt when
    /// the class has no unselected node with positive score.
    std::optional<NodeId> best_positive(std::size_t c) {
        auto& cls = buckets_[c];
        while (top_[c] > 0 && cls[top_[c]].empty()) --top_[c];
        if (top_[c] == 0) return std::nullopt;
        return *cls[top_[c]].begin();
    }

    void mark_selected(NodeId u) {
        erase(u, score_[u]);
        selected_[u] = 1;
    }

    /// Adjusts neighbor scores when m[node] transitions old_m -> new_m.
    void on_m_change(NodeId node, int old_m, int new_m, int k) {
        const int delta = (new_m == k ? 1 : 0) - (old_m == k ? 1 : 0);
        if (delta == 0) return;
        for (NodeId w : ds_.graph.neighbors(node)) {
            if (selected_[w]) continue;
            const std::size_t old_s = score_[w];
            const std::size_t new_s = old_s + static_cast<std::size_t>(delta);
            erase(w, old_s);
            score_[w] = new_s;
            insert(w, new_s);
        }
    }

private:
    void insert(NodeId u, std::size_t s) {
        const auto c = static_cast<std::size_t>(ds_.labels[u]);
        buckets_[c][s].insert(u);
        top_[c] = std::max(top_[c], s);
    }
    void erase(NodeId u, std::size_t s) {
        buckets_[static_cast<std::size_t>(ds_.labels[u])][s].erase(u);
    }

    const LabeledDataset& ds_;
    std::vector<std::vector<std::set<NodeId>>> buckets_;
    std::vector<std::size_t> top_;
    std::vector<std::size_t> score_;
    std::vector<char> selected_;
};

}  // namespace

GreedyCoverResult greedy_cover_select(const LabeledDataset& ds, double t_train,
                                      std::uint64_t seed, double t_val,
                                      CoverScanMode mode) {
    check_fractions(ds, t_train, t_val);
    const auto members = ds.class_members();
    const std::size_t num_classes = members.size();
    const std::size_t max_deg = ds.graph.max_degree();

    std::vector<std::size_t> quota(num_classes);
    for (std::size_t c = 0; c < num_classes; ++c)
        quota[c] = ceil_quota(t_train, members[c].size());

    CoverState state;
    state.m.assign(ds.node_count(), 0);
    std::vector<std::size_t> selected_count(num_classes, 0);
    std::vector<char> in_train(ds.node_count(), 0);
    std::vector<NodeId> train;

    const bool use_buckets = mode == CoverScanMode::PriorityQueue;
    std::optional<ScoreBuckets> buckets;
    if (use_buckets) {
        buckets.emplace(ds, max_deg);
        buckets->rebuild(state.m, state.k);
    }

    auto select_node = [&](NodeId v, std::size_t c) {
        // Bucket maintenance stops mattering once k exceeds every possible
        // coverage count; only the m bookkeeping is kept up to date then.
        const bool track = use_buckets && state.k <= static_cast<int>(max_deg);
        if (track) {
            buckets->mark_selected(v);
            buckets->on_m_change(v, state.m[v], -1, state.k);
        }
        state.m[v] = -1;
        in_train[v] = 1;
        train.push_back(v);
        ++selected_count[c];
        for (NodeId u : ds.graph.neighbors(v)) {
            if (in_train[u]) continue;
            const int old_m = state.m[u];
            ++state.m[u];
            if (track) buckets->on_m_change(u, old_m, state.m[u], state.k);
        }
    };

    Rng class_rng(derive_seed(seed, {0}));
    std::vector<double> weights(num_classes);
    while (true) {
        bool any_unmet = false;
        double total_weight = 0.0;
        for (std::size_t c = 0; c < num_classes; ++c) {
            const bool unmet = selected_count[c] < quota[c];
            any_unmet |= unmet;
            const double target = t_train * static_cast<double>(members[c].size());
            double w = 0.0;
            if (unmet && target > 0.0)
                w = std::max(0.0, 1.0 - static_cast<double>(selected_count[c]) / target);
            weights[c] = w;
            total_weight += w;
        }
        if (!any_unmet) break;

        std::size_t c;
        if (total_weight > 0.0) {
            c = class_rng.weighted_index(weights);
        } else {
            // Degenerate rounding: quotas unmet but all weights zero.
            std::vector<std::size_t> unmet_classes;
            for (std::size_t i = 0; i < num_classes; ++i)
                if (selected_count[i] < quota[i]) unmet_classes.push_back(i);
            c = unmet_classes[class_rng.below(unmet_classes.size())];
        }

        if (state.k > static_cast<int>(max_deg)) {
            // Dead end: no node can ever have a neighbor at coverage k again.
            // Fill the drawn class by highest degree, ties by smallest id.
            std::vector<NodeId> rest;
            for (NodeId u : members[c])
                if (!in_train[u]) rest.push_back(u);
            std::stable_sort(rest.begin(), rest.end(), [&](NodeId a, NodeId b) {
                return ds.graph.degree(a) != ds.graph.degree(b)
                           ? ds.graph.degree(a) > ds.graph.degree(b)
                           : a < b;
            });
            for (NodeId u : rest) {
                if (selected_count[c] >= quota[c]) break;
                select_node(u, c);
            }
            if (selected_count[c] < quota[c])
                throw DataError("greedy_cover: class " + std::to_string(c) +
                                " exhausted before quota");
            continue;
        }

        std::optional<NodeId> best;
        if (use_buckets) {
            best = buckets->best_positive(c);
        } else {
            std::size_t best_score = 0;
            for (NodeId u : members[c]) {
                if (in_train[u]) continue;
                std::size_t s = 0;
                for (NodeId v : ds.graph.neighbors(u))
                    if (state.m[v] == state.k) ++s;
                if (s > best_score) {
                    best_score = s;
                    best = u;
                }
            }
        }

        if (!best.has_value()) {
            ++state.k;
            if (use_buckets && state.k <= static_cast<int>(max_deg))
                buckets->rebuild(state.m, state.k);
            continue;
        }
        select_node(*best, c);
    }

    std::sort(train.begin(), train.end());
    Rng val_rng(derive_seed(seed, {1}));
    auto val = draw_validation(members, train, t_val, val_rng);
    GreedyCoverResult res;
    res.split = finish_split(ds, std::move(train), std::move(val), "greedy_cover", seed);
    res.final_k = state.k;
    res.split.final_k = state.k;
    return res;
}

double avg_external_training_neighbors(const Graph& g,
                                       std::span<const NodeId> train) {
    const std::size_t n = g.node_count();
    std::vector<char> in_train(n, 0);
    for (NodeId u : train) {
        if (u >= n) throw UsageError("train node id out of range");
        in_train[u] = 1;
    }
    std::size_t train_size = 0;
    for (char c : in_train) train_size += c;
    if (train_size == n)
        throw UsageError("avg_external_training_neighbors: train set is all of V");
    std::size_t boundary = 0;
    for (NodeId u = 0; u < n; ++u) {
        if (!in_train[u]) continue;
        for (NodeId v : g.neighbors(u))
            if (!in_train[v]) ++boundary;
    }
    return static_cast<double>(boundary) / static_cast<double>(n - train_size);
}

}  // namespace graphrob

#include "graphrob/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "graphrob/rng.hpp"
#include "graphrob/spectral.hpp"

namespace graphrob {

namespace {

Graph sample_er(std::size_t n, double p, Rng& rng) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (rng.bernoulli(p)) edges.emplace_back(u, v);
    return Graph::from_edges(n, edges);
}

Graph sample_ba(std::size_t n, std::size_t m, std::size_t star, Rng& rng) {
    if (star < 2 || star > n)
        throw UsageError("BA: seed star size must be in [2, n]");
    if (m > star) throw UsageError("BA: attachment count exceeds seed size");
    std::vector<std::pair<NodeId, NodeId>> edges;
    // Endpoint multiset; sampling from it is degree-proportional attachment.
    std::vector<NodeId> endpoints;
    for (NodeId leaf = 1; leaf < star; ++leaf) {
        edges.emplace_back(0, leaf);
        endpoints.push_back(0);
        endpoints.push_back(leaf);
    }
    std::vector<NodeId> chosen;
    for (NodeId u = static_cast<NodeId>(star); u < n; ++u) {
        chosen.clear();
        while (chosen.size() < m) {
            const NodeId v = endpoints[rng.below(endpoints.size())];
            if (std::find(chosen.begin(), chosen.end(), v) == chosen.end())
                chosen.push_back(v);
        }
        for (NodeId v : chosen) {
            edges.emplace_back(u, v);
            endpoints.push_back(u);
            endpoints.push_back(v);
        }
    }
    return Graph::from_edges(n, edges);
}

Graph sample_ws(std::size_t n, std::size_t k_side, double rewire_p, Rng& rng) {
    if (2 * k_side >= n) throw UsageError("WS: ring degree too large for n");
    std::set<std::pair<NodeId, NodeId>> edge_set;
    auto key = [](NodeId a, NodeId b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    for (NodeId u = 0; u < n; ++u)
        for (std::size_t j = 1; j <= k_side; ++j)
            edge_set.insert(key(u, static_cast<NodeId>((u + j) % n)));

    // Rewire each original rightward edge with probability rewire_p, keeping
    // the source endpoint and avoiding self-loops and duplicates.
    for (NodeId u = 0; u < n; ++u) {
        for (std::size_t j = 1; j <= k_side; ++j) {
            const NodeId v = static_cast<NodeId>((u + j) % n);
            if (!rng.bernoulli(rewire_p)) continue;
            if (!edge_set.count(key(u, v))) continue;  // already moved away
            NodeId w;
            bool found = false;
            for (int attempt = 0; attempt < 64; ++attempt) {
                w = static_cast<NodeId>(rng.below(n));
                if (w != u && !edge_set.count(key(u, w))) {
                    found = true;
                    break;
                }
            }
            if (!found) continue;  // node saturated; keep the lattice edge
            edge_set.erase(key(u, v));
            edge_set.insert(key(u, w));
        }
    }
    std::vector<std::pair<NodeId, NodeId>> edges(edge_set.begin(), edge_set.end());
    return Graph::from_edges(n, edges);
}

/// Discrete truncated power law p(x) proportional to x^-exponent on
/// [lo, hi], sampled through the cumulative table.
struct PowerLawSampler {
    std::vector<double> cumulative;
    std::size_t lo;

    PowerLawSampler(std::size_t lo_, std::size_t hi, double exponent) : lo(lo_) {
        double total = 0.0;
        cumulative.reserve(hi - lo_ + 1);
        for (std::size_t x = lo_; x <= hi; ++x) {
            total += std::pow(static_cast<double>(x), -exponent);
            cumulative.push_back(total);
        }
        for (double& c : cumulative) c /= total;
    }

    double mean(double exponent) const {
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < cumulative.size(); ++i) {
            const double x = static_cast<double>(lo + i);
            const double w = std::pow(x, -exponent);
            num += x * w;
            den += w;
        }
        return num / den;
    }

    std::size_t sample(Rng& rng) const {
        const double r = rng.next_unit();
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), r);
        return lo + static_cast<std::size_t>(it - cumulative.begin());
    }
};

/// Pairs stubs into simple edges by repeated shuffling; pairs violating
/// `ok` go back into the pool. Unmatchable leftovers are dropped.
void pair_stubs(std::vector<NodeId> stubs, Rng& rng,
                std::set<std::pair<NodeId, NodeId>>& edge_set,
                const std::function<bool(NodeId, NodeId)>& ok) {
    auto key = [](NodeId a, NodeId b) {
        return a < b ? std::make_pair(a, b) : std::make_pair(b, a);
    };
    for (int round = 0; round < 24 && stubs.size() >= 2; ++round) {
        rng.shuffle(stubs);
        std::vector<NodeId> leftover;
        if (stubs.size() % 2 == 1) {
            leftover.push_back(stubs.back());
            stubs.pop_back();
        }
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2) {
            const NodeId a = stubs[i], b = stubs[i + 1];
            if (a != b && !edge_set.count(key(a, b)) && ok(a, b)) {
                edge_set.insert(key(a, b));
            } else {
                leftover.push_back(a);
                leftover.push_back(b);
            }
        }
        stubs = std::move(leftover);
    }
}

LfrSample sample_lfr(const TopologySpec& spec, Rng& rng) {
    const std::size_t n = spec.n;
    const std::size_t dmax = std::min(spec.lfr_max_degree, n - 1);
    if (n < spec.lfr_min_community)
        throw UsageError("LFR: n below the minimum community size");

    // Lower degree cutoff chosen so the truncated power law hits the
    // requested average degree as closely as possible.
    std::size_t dmin = 1;
    double best_gap = std::numeric_limits<double>::infinity();
    for (std::size_t lo = 1; lo <= dmax; ++lo) {
        PowerLawSampler s(lo, dmax, spec.lfr_degree_exponent);
        const double gap = std::abs(s.mean(spec.lfr_degree_exponent) - spec.lfr_avg_degree);
        if (gap < best_gap) {
            best_gap = gap;
            dmin = lo;
        }
        if (s.mean(spec.lfr_degree_exponent) > spec.lfr_avg_degree) break;
    }
    const PowerLawSampler degree_dist(dmin, dmax, spec.lfr_degree_exponent);
    std::vector<std::size_t> degree(n);
    for (auto& d : degree) d = degree_dist.sample(rng);

    // Community sizes from the size power law, truncated to cover n nodes.
    const PowerLawSampler comm_dist(spec.lfr_min_community, n,
                                    spec.lfr_community_exponent);
    std::vector<std::size_t> comm_sizes;
    std::size_t covered = 0;
    while (covered < n) {
        std::size_t s = comm_dist.sample(rng);
        if (covered + s > n) {
            const std::size_t rest = n - covered;
            if (rest >= spec.lfr_min_community || comm_sizes.empty()) {
                s = rest;
            } else {
                comm_sizes.back() += rest;
                covered = n;
                break;
            }
        }
        comm_sizes.push_back(s);
        covered += s;
    }

    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::vector<std::size_t> community(n);
    std::size_t pos = 0;
    for (std::size_t c = 0; c < comm_sizes.size(); ++c)
        for (std::size_t i = 0; i < comm_sizes[c]; ++i) community[order[pos++]] = c;

    // Intra-community stub budget: (1-mu) of each degree, capped by the
    // community size; capped excess becomes inter-community stubs.
    std::vector<std::size_t> intra(n);
    for (NodeId u = 0; u < n; ++u) {
        std::size_t t = static_cast<std::size_t>(
            std::llround((1.0 - spec.lfr_mixing) * static_cast<double>(degree[u])));
        t = std::min(t, comm_sizes[community[u]] - 1);
        t = std::min(t, degree[u]);
        intra[u] = t;
    }

    std::set<std::pair<NodeId, NodeId>> edge_set;
    std::vector<std::vector<NodeId>> comm_members(comm_sizes.size());
    for (NodeId u = 0; u < n; ++u) comm_members[community[u]].push_back(u);
    for (const auto& members : comm_members) {
        std::vector<NodeId> stubs;
        for (NodeId u : members)
            for (std::size_t i = 0; i < intra[u]; ++i) stubs.push_back(u);
        pair_stubs(std::move(stubs), rng, edge_set,
                   [](NodeId, NodeId) { return true; });
    }
    // Remaining degree goes to inter-community stubs.
    std::vector<std::size_t> placed(n, 0);
    for (const auto& [a, b] : edge_set) {
        ++placed[a];
        ++placed[b];
    }
    std::vector<NodeId> inter_stubs;
    for (NodeId u = 0; u < n; ++u)
        for (std::size_t i = placed[u]; i < degree[u]; ++i) inter_stubs.push_back(u);
    pair_stubs(std::move(inter_stubs), rng, edge_set,
               [&](NodeId a, NodeId b) { return community[a] != community[b]; });

    std::vector<std::pair<NodeId, NodeId>> edges(edge_set.begin(), edge_set.end());
    if (edges.empty()) throw DataError("LFR: generated graph has no edges");
    return {Graph::from_edges(n, edges), std::move(community)};
}

}  // namespace

LfrSample sample_lfr_topology(const TopologySpec& spec) {
    for (int attempt = 0; attempt < 5; ++attempt) {
        Rng sub(derive_seed(spec.seed, {3, static_cast<std::uint64_t>(attempt)}));
        try {
            LfrSample s = sample_lfr(spec, sub);
            if (largest_connected_component(s.graph).graph.node_count() >= 2)
                return s;
        } catch (const DataError&) {
            continue;
        }
    }
    throw DataError("LFR: no feasible graph after bounded retries");
}

Graph sample_topology(const TopologySpec& spec) {
    if (spec.n < 2) throw UsageError("topology: need at least 2 nodes");
    Rng rng(derive_seed(spec.seed, {static_cast<std::uint64_t>(spec.model)}));
    switch (spec.model) {
        case TopologyModel::ER:
            return sample_er(spec.n, spec.er_p, rng);
        case TopologyModel::BA:
            return sample_ba(spec.n, spec.ba_m, spec.ba_seed_star, rng);
        case TopologyModel::WS:
            return sample_ws(spec.n, spec.ws_k_side, spec.ws_rewire_p, rng);
        case TopologyModel::LFR:
            return sample_lfr_topology(spec).graph;
    }
    throw UsageError("topology: unknown model");
}

Graph generate_topology(const TopologySpec& spec) {
    Graph raw = sample_topology(spec);
    auto lcc = largest_connected_component(raw);
    if (lcc.graph.node_count() < 2)
        throw DataError("topology: largest connected component has fewer than 2 nodes");
    return std::move(lcc.graph);
}

std::vector<int> assign_labels_high_homophily(const Graph& g) {
    const std::size_t n = g.node_count();
    const auto fiedler = fiedler_vector(g, 1e-8, std::max<std::size_t>(10000, 400 * n));
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
        return fiedler[a] != fiedler[b] ? fiedler[a] < fiedler[b] : a < b;
    });
    std::vector<int> labels(n, 1);
    for (std::size_t i = 0; i < n / 2; ++i) labels[order[i]] = 0;
    return labels;
}

long long homophily_delta(const Graph& g, std::span<const int> labels) {
    long long within = 0, across = 0;
    for (NodeId u = 0; u < g.node_count(); ++u) {
        for (NodeId v : g.neighbors(u)) {
            if (u >= v) continue;
            if (labels[u] == labels[v])
                ++within;
            else
                ++across;
        }
    }
    return within - across;
}

namespace {

std::vector<int> swap_step_impl(const Graph& g, std::span<const int> labels,
                                Rng& rng) {
    const std::size_t n = g.node_count();
    // x = -1 on class 0, +1 on class 1; d = Ax counts the class imbalance of
    // each neighborhood.
    std::vector<long long> d(n, 0);
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : g.neighbors(u)) d[u] += labels[v] == 0 ? -1 : 1;

    std::vector<double> weight_up(n, 0.0), weight_down(n, 0.0);
    double total_up = 0.0, total_down = 0.0;
    for (NodeId u = 0; u < n; ++u) {
        if (labels[u] == 1 && d[u] >= 0) {
            weight_up[u] = static_cast<double>(d[u]);
            total_up += weight_up[u];
        }
        if (labels[u] == 0 && d[u] < 0) {
            weight_down[u] = static_cast<double>(-d[u]);
            total_down += weight_down[u];
        }
    }
    const long long delta = homophily_delta(g, labels);
    if (total_up <= 0.0)
        throw StallError("swap2reduce: no eligible class-1 node", delta);
    if (total_down <= 0.0)
        throw StallError("swap2reduce: no eligible class-0 node", delta);

    const NodeId u = static_cast<NodeId>(rng.weighted_index(weight_up));
    const NodeId v = static_cast<NodeId>(rng.weighted_index(weight_down));
    std::vector<int> out(labels.begin(), labels.end());
    out[u] = 0;
    out[v] = 1;
    return out;
}

}  // namespace

std::vector<int> swap2reduce_step(const Graph& g, std::span<const int> labels,
                                  std::uint64_t seed) {
    Rng rng(derive_seed(seed, {0}));
    return swap_step_impl(g, labels, rng);
}

std::vector<int> reduce_homophily_to(const Graph& g, std::span<const int> labels,
                                     long long target_delta,
                                     std::size_t max_steps, std::uint64_t seed) {
    std::vector<int> current(labels.begin(), labels.end());
    long long delta = homophily_delta(g, current);
    if (delta <= target_delta) return current;
    Rng rng(derive_seed(seed, {0}));
    long long best = delta;
    for (std::size_t step = 0; step < max_steps; ++step) {
        try {
            current = swap_step_impl(g, current, rng);
        } catch (const StallError&) {
            throw StallError("reduce_homophily_to: stalled at delta " +
                                 std::to_string(best) + " (target " +
                                 std::to_string(target_delta) + ")",
                             best);
        }
        delta = homophily_delta(g, current);
        best = std::min(best, delta);
        if (delta <= target_delta) return current;
    }
    throw StallError("reduce_homophily_to: step budget exhausted at delta " +
                         std::to_string(best) + " (target " +
                         std::to_string(target_delta) + ")",
                     best);
}

double AttributeConfig::base_probability(std::size_t j) const {
    const double q = p0 * std::exp(-static_cast<double>(j) / tau);
    return std::clamp(q, 0.0, 1.0);
}

BinaryMatrix generate_attributes(const Graph& g, std::span<const int> labels,
                                 const AttributeConfig& cfg, std::uint64_t seed) {
    const std::size_t n = g.node_count();
    if (cfg.shift >= std::max<std::size_t>(cfg.num_attrs, 1))
        throw UsageError("attributes: shift out of range");
    BinaryMatrix m(n, cfg.num_attrs);
    Rng rng(derive_seed(seed, {0}));
    for (NodeId i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < cfg.num_attrs; ++j) {
            const std::size_t src =
                labels[i] == 0 ? j : (j + cfg.shift) % cfg.num_attrs;
            if (rng.bernoulli(cfg.base_probability(src)))
                m.row_support[i].push_back(static_cast<NodeId>(j));
        }
    }
    if (cfg.one_hot_index) m = BinaryMatrix::with_identity_block(m);
    return m;
}

namespace {

std::vector<char> draw_attribute_vector(const AttributeConfig& cfg,
                                        std::size_t shift, int cls, Rng& rng) {
    std::vector<char> x(cfg.num_attrs);
    for (std::size_t j = 0; j < cfg.num_attrs; ++j) {
        const std::size_t src = cls == 0 ? j : (j + shift) % cfg.num_attrs;
        x[j] = rng.bernoulli(cfg.base_probability(src)) ? 1 : 0;
    }
    return x;
}

}  // namespace

double glrt_accuracy(const AttributeConfig& cfg, std::size_t shift,
                     std::size_t trials, std::size_t train_per_class,
                     std::size_t heldout_per_class, std::uint64_t seed) {
    if (trials == 0 || train_per_class == 0 || heldout_per_class == 0)
        throw UsageError("glrt_accuracy: counts must be positive");
    std::size_t correct = 0, total = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, {shift, trial}));
        // Per-attribute Bernoulli estimates with add-one smoothing.
        std::vector<double> p0(cfg.num_attrs, 0.0), p1(cfg.num_attrs, 0.0);
        for (int cls = 0; cls < 2; ++cls) {
            auto& p = cls == 0 ? p0 : p1;
            for (std::size_t s = 0; s < train_per_class; ++s) {
                const auto x = draw_attribute_vector(cfg, shift, cls, rng);
                for (std::size_t j = 0; j < cfg.num_attrs; ++j) p[j] += x[j];
            }
            for (std::size_t j = 0; j < cfg.num_attrs; ++j)
                p[j] = (p[j] + 1.0) / (static_cast<double>(train_per_class) + 2.0);
        }
        std::vector<double> log_on(cfg.num_attrs), log_off(cfg.num_attrs);
        for (std::size_t j = 0; j < cfg.num_attrs; ++j) {
            log_on[j] = std::log(p0[j]) - std::log(p1[j]);
            log_off[j] = std::log(1.0 - p0[j]) - std::log(1.0 - p1[j]);
        }
        for (int cls = 0; cls < 2; ++cls) {
            for (std::size_t s = 0; s < heldout_per_class; ++s) {
                const auto x = draw_attribute_vector(cfg, shift, cls, rng);
                double llr = 0.0;
                for (std::size_t j = 0; j < cfg.num_attrs; ++j)
                    llr += x[j] ? log_on[j] : log_off[j];
                const int predicted = llr >= 0.0 ? 0 : 1;
                correct += predicted == cls;
                ++total;
            }
        }
    }
    return static_cast<double>(correct) / static_cast<double>(total);
}

std::size_t calibrate_attribute_shift(const AttributeConfig& cfg,
                                      double target_acc, std::size_t trials,
                                      std::uint64_t seed) {
    constexpr double kBand = 0.02;
    constexpr std::size_t kTrainPerClass = 60;
    const std::size_t heldout =
        std::max<std::size_t>(1, (2000 + 2 * trials - 1) / (2 * trials));
    auto accuracy = [&](std::size_t s) {
        return glrt_accuracy(cfg, s, trials, kTrainPerClass, heldout, seed);
    };

    if (target_acc <= 0.5 + kBand) return 0;

    // Binary search for the smallest shift reaching target - band; the
    // accuracy curve is monotone over [0, num_attrs/2].
    std::size_t lo = 0, hi = cfg.num_attrs / 2;
    if (accuracy(hi) < target_acc - kBand)
        throw ConvergenceError("calibrate_attribute_shift: target " +
                                   std::to_string(target_acc) +
                                   " unreachable; accuracy at max shift is " +
                                   std::to_string(accuracy(hi)),
                               accuracy(hi));
    while (lo < hi) {
        const std::size_t mid = (lo + hi) / 2;
        if (accuracy(mid) >= target_acc - kBand)
            hi = mid;
        else
            lo = mid + 1;
    }
    const double achieved = accuracy(lo);
    if (std::abs(achieved - target_acc) > kBand)
        throw ConvergenceError(
            "calibrate_attribute_shift: nearest achievable accuracy " +
                std::to_string(achieved) + " misses target " +
                std::to_string(target_acc),
            achieved);
    return lo;
}

double heterophilicity(const Graph& g, std::span<const int> labels) {
    const std::size_t n = g.node_count();
    const std::size_t m = g.edge_count();
    if (m == 0) throw DataError("heterophilicity: graph has no edges");
    std::size_t n0 = 0;
    for (int l : labels) n0 += l == 0;
    const std::size_t n1 = n - n0;
    if (n0 == 0 || n1 == 0)
        throw DataError("heterophilicity: both classes must be non-empty");
    std::size_t cross = 0;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v : g.neighbors(u))
            if (u < v && labels[u] != labels[v]) ++cross;
    const double pairs = static_cast<double>(n) * static_cast<double>(n - 1) / 2.0;
    const double expected = static_cast<double>(n0) * static_cast<double>(n1) *
                            static_cast<double>(m) / pairs;
    return static_cast<double>(cross) / expected;
}

SyntheticResult generate_dataset(const SyntheticSpec& spec) {
    SyntheticResult res;
    Graph g = generate_topology(spec.topology);
    std::vector<int> labels = assign_labels_high_homophily(g);
    res.initial_delta = homophily_delta(g, labels);

    const double frac = spec.labels.target_delta_fraction;
    if (frac < -1.0 || frac > 1.0)
        throw UsageError("labels: target_delta_fraction must be in [-1, 1]");
    if (frac < 1.0) {
        const auto target = static_cast<long long>(
            std::llround(frac * static_cast<double>(res.initial_delta)));
        labels = reduce_homophily_to(g, labels, target, 10 * g.node_count(),
                                     spec.labels.seed);
    }
    res.final_delta = homophily_delta(g, labels);
    res.heterophilicity = heterophilicity(g, labels);

    BinaryMatrix attrs(g.node_count(), 0);
    if (spec.attributes.has_value())
        attrs = generate_attributes(g, labels, *spec.attributes,
                                    derive_seed(spec.topology.seed, {11}));
    res.dataset.graph = std::move(g);
    res.dataset.attributes = std::move(attrs);
    res.dataset.labels = std::move(labels);
    res.dataset.num_classes = 2;
    res.dataset.validate();
    return res;
}

}  // namespace graphrob

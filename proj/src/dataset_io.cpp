#include "graphrob/dataset_io.hpp"

#include <fstream>
#include <sstream>

namespace graphrob {

namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << bytes;
    if (!out) throw DataError("write failed: " + path.string());
}

struct Line {
    std::size_t number;
    std::vector<std::string> fields;
};

std::vector<Line> parse_tsv(const std::string& bytes) {
    std::vector<Line> lines;
    std::istringstream in(bytes);
    std::string raw;
    std::size_t number = 0;
    while (std::getline(in, raw)) {
        ++number;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty() || raw[0] == '#') continue;
        Line line{number, {}};
        std::istringstream fs(raw);
        std::string field;
        while (fs >> field) line.fields.push_back(field);
        lines.push_back(std::move(line));
    }
    return lines;
}

std::size_t parse_count(const std::string& s, const std::string& file,
                        std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size() || v < 0) throw std::invalid_argument(s);
        return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw DataError(file + ":" + std::to_string(line_no) +
                        ": not a non-negative integer: '" + s + "'");
    }
}

}  // namespace

std::string fnv1a64_hex(std::string_view bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

LabeledDataset load_dataset(const std::filesystem::path& manifest_path) {
    const std::string manifest_bytes = read_file(manifest_path);
    nlohmann::json mj;
    try {
        mj = nlohmann::json::parse(manifest_bytes);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest_path.string() + ": invalid JSON: " + e.what());
    }

    DatasetManifest m;
    try {
        m.name = mj.value("name", "");
        m.edge_file = mj.at("files").at("edges").get<std::string>();
        m.label_file = mj.at("files").at("labels").get<std::string>();
        m.attr_file = mj.at("files").at("attributes").get<std::string>();
        m.nodes = mj.at("counts").at("nodes").get<std::size_t>();
        m.edges = mj.at("counts").at("edges").get<std::size_t>();
        m.classes = mj.at("counts").at("classes").get<std::size_t>();
        m.attrs = mj.at("counts").at("attributes").get<std::size_t>();
        for (const auto& [k, v] : mj.at("checksums").items())
            m.checksums[k] = v.get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw DataError(manifest_path.string() + ": missing manifest field: " +
                        e.what());
    }

    const auto dir = manifest_path.parent_path();
    auto load_checked = [&](const std::string& rel) {
        const std::string bytes = read_file(dir / rel);
        const auto it = m.checksums.find(rel);
        if (it == m.checksums.end())
            throw DataError(manifest_path.string() + ": no checksum for " + rel);
        const std::string actual = fnv1a64_hex(bytes);
        if (actual != it->second)
            throw DataError(rel + ": checksum mismatch (manifest " + it->second +
                            ", actual " + actual + ")");
        return bytes;
    };

    // Labels define the node set.
    const auto label_lines = parse_tsv(load_checked(m.label_file));
    if (label_lines.size() != m.nodes)
        throw DataError(m.label_file + ": " + std::to_string(label_lines.size()) +
                        " labeled nodes, manifest counts.nodes says " +
                        std::to_string(m.nodes));
    std::vector<int> labels(m.nodes, -1);
    for (const auto& line : label_lines) {
        if (line.fields.size() != 2)
            throw DataError(m.label_file + ":" + std::to_string(line.number) +
                            ": expected 'id<TAB>class'");
        const std::size_t id = parse_count(line.fields[0], m.label_file, line.number);
        const std::size_t cls = parse_count(line.fields[1], m.label_file, line.number);
        if (id >= m.nodes)
            throw DataError(m.label_file + ":" + std::to_string(line.number) +
                            ": node id " + std::to_string(id) + " out of range");
        if (cls >= m.classes)
            throw DataError(m.label_file + ":" + std::to_string(line.number) +
                            ": class " + std::to_string(cls) +
                            " >= declared class count " + std::to_string(m.classes));
        if (labels[id] != -1)
            throw DataError(m.label_file + ":" + std::to_string(line.number) +
                            ": duplicate label for node " + std::to_string(id));
        labels[id] = static_cast<int>(cls);
    }

    const auto edge_lines = parse_tsv(load_checked(m.edge_file));
    std::vector<std::pair<NodeId, NodeId>> edges;
    edges.reserve(edge_lines.size());
    for (const auto& line : edge_lines) {
        if (line.fields.size() != 2)
            throw DataError(m.edge_file + ":" + std::to_string(line.number) +
                            ": expected 'u<TAB>v'");
        const std::size_t u = parse_count(line.fields[0], m.edge_file, line.number);
        const std::size_t v = parse_count(line.fields[1], m.edge_file, line.number);
        if (u >= m.nodes || v >= m.nodes)
            throw DataError(m.edge_file + ":" + std::to_string(line.number) +
                            ": node id out of range");
        edges.emplace_back(static_cast<NodeId>(u), static_cast<NodeId>(v));
    }
    const Graph graph = Graph::from_edges(m.nodes, edges);
    if (graph.edge_count() != m.edges)
        throw DataError(m.edge_file + ": " + std::to_string(graph.edge_count()) +
                        " distinct edges, manifest counts.edges says " +
                        std::to_string(m.edges));

    BinaryMatrix attrs(m.nodes, m.attrs);
    const auto attr_lines = parse_tsv(load_checked(m.attr_file));
    for (const auto& line : attr_lines) {
        if (line.fields.size() != 3 || line.fields[2] != "1")
            throw DataError(m.attr_file + ":" + std::to_string(line.number) +
                            ": expected 'id<TAB>attr<TAB>1'");
        const std::size_t id = parse_count(line.fields[0], m.attr_file, line.number);
        const std::size_t a = parse_count(line.fields[1], m.attr_file, line.number);
        if (id >= m.nodes)
            throw DataError(m.attr_file + ":" + std::to_string(line.number) +
                            ": node id out of range");
        if (a >= m.attrs)
            throw DataError(m.attr_file + ":" + std::to_string(line.number) +
                            ": attribute index " + std::to_string(a) +
                            " >= declared attribute count " + std::to_string(m.attrs));
        auto& sup = attrs.row_support[id];
        if (!sup.empty() && sup.back() >= static_cast<NodeId>(a))
            throw DataError(m.attr_file + ":" + std::to_string(line.number) +
                            ": attribute entries must be sorted and unique per node");
        sup.push_back(static_cast<NodeId>(a));
    }

    // Work on the largest connected component, re-indexing everything.
    const LccResult lcc = largest_connected_component(graph);
    if (lcc.graph.node_count() < 2)
        throw DataError(manifest_path.string() +
                        ": largest connected component has fewer than 2 nodes");
    LabeledDataset ds;
    ds.graph = lcc.graph;
    ds.num_classes = static_cast<int>(m.classes);
    ds.labels.resize(lcc.new_to_old.size());
    ds.attributes = BinaryMatrix(lcc.new_to_old.size(), m.attrs);
    for (std::size_t i = 0; i < lcc.new_to_old.size(); ++i) {
        ds.labels[i] = labels[lcc.new_to_old[i]];
        ds.attributes.row_support[i] = attrs.row_support[lcc.new_to_old[i]];
    }
    ds.validate();
    return ds;
}

DatasetManifest save_dataset(const LabeledDataset& ds,
                             const std::filesystem::path& dir,
                             const std::string& name,
                             nlohmann::ordered_json provenance) {
    ds.validate();
    std::filesystem::create_directories(dir);

    DatasetManifest m;
    m.name = name;
    m.nodes = ds.node_count();
    m.edges = ds.graph.edge_count();
    m.classes = static_cast<std::size_t>(ds.num_classes);
    m.attrs = ds.attributes.cols;
    m.provenance = std::move(provenance);

    std::string edge_bytes;
    for (const auto& [u, v] : ds.graph.edges())
        edge_bytes += std::to_string(u) + "\t" + std::to_string(v) + "\n";
    std::string label_bytes;
    for (NodeId u = 0; u < ds.node_count(); ++u)
        label_bytes += std::to_string(u) + "\t" + std::to_string(ds.labels[u]) + "\n";
    std::string attr_bytes;
    for (NodeId u = 0; u < ds.node_count(); ++u)
        for (NodeId a : ds.attributes.row_support[u])
            attr_bytes += std::to_string(u) + "\t" + std::to_string(a) + "\t1\n";

    write_file(dir / m.edge_file, edge_bytes);
    write_file(dir / m.label_file, label_bytes);
    write_file(dir / m.attr_file, attr_bytes);
    m.checksums[m.edge_file] = fnv1a64_hex(edge_bytes);
    m.checksums[m.label_file] = fnv1a64_hex(label_bytes);
    m.checksums[m.attr_file] = fnv1a64_hex(attr_bytes);

    nlohmann::ordered_json mj;
    mj["name"] = m.name;
    mj["files"] = {{"edges", m.edge_file},
                   {"labels", m.label_file},
                   {"attributes", m.attr_file}};
    mj["counts"] = {{"nodes", m.nodes},
                    {"edges", m.edges},
                    {"classes", m.classes},
                    {"attributes", m.attrs}};
    mj["checksums"] = m.checksums;
    mj["provenance"] = m.provenance;
    write_file(dir / "manifest.json", mj.dump(2) + "\n");
    return m;
}

}  // namespace graphrob

#ifndef GRAPHROB_DATASET_IO_HPP
#define GRAPHROB_DATASET_IO_HPP

#include <filesystem>
#include <map>
#include <string>

#include <json.hpp>

#include "graphrob/dataset.hpp"

namespace graphrob {

/// On-disk dataset description. Files are tab-separated text relative to the
/// manifest directory: edges "u\tv", labels "id\tclass", attributes
/// "id\tattr\t1"; '#' starts a comment line.
struct DatasetManifest {
    std::string name;
    std::string edge_file = "edges.tsv";
    std::string label_file = "labels.tsv";
    std::string attr_file = "attributes.tsv";
    std::size_t nodes = 0;
    std::size_t edges = 0;
    std::size_t classes = 0;
    std::size_t attrs = 0;
    std::map<std::string, std::string> checksums;
    nlohmann::ordered_json provenance;
};

/// Parses and validates the files behind a manifest, then extracts the
/// largest connected component (labels and attributes re-indexed with it).
LabeledDataset load_dataset(const std::filesystem::path& manifest_path);

/// Writes the dataset in the text format plus a manifest.json. Emission is
/// sorted, so output bytes are deterministic for a given dataset.
DatasetManifest save_dataset(const LabeledDataset& ds,
                             const std::filesystem::path& dir,
                             const std::string& name,
                             nlohmann::ordered_json provenance = {});

/// FNV-1a 64-bit checksum, 16 hex digits.
std::string fnv1a64_hex(std::string_view bytes);

}  // namespace graphrob

#endif

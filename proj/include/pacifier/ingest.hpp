#pragma once

#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pacifier/errors.hpp"
#include "pacifier/graph.hpp"
#include "pacifier/instance.hpp"
#include "pacifier/metrics.hpp"

namespace pacifier {

struct IngestedDataset {
    Graph graph;
    std::vector<int> camps;               // +1 / -1 per dense node id
    Vec s0;                               // extreme assignment by camp
    std::vector<std::int64_t> original_ids;
    bool remapped = false;
    bool connected = true;
};

// Loads an edge list plus a label file ("node_id camp" with camp +1/-1).
// Self-loops are rejected by the edge parser; disconnected graphs are
// refused unless force is set. Nodes without labels are rejected.
inline IngestedDataset ingest_dataset(const std::string& edge_path, const std::string& label_path,
                                      bool force = false) {
    LoadedEdgeList loaded = load_edge_list(edge_path);

    std::ifstream in(label_path);
    if (!in) throw IngestError("cannot open label file '" + label_path + "'");
    std::map<std::int64_t, int> labels;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        std::int64_t id;
        std::string camp;
        if (!(ss >> id)) continue;
        if (!(ss >> camp))
            throw IngestError(label_path + ":" + std::to_string(line_no) + ": expected 'id camp'");
        int c;
        if (camp == "+1" || camp == "1")
            c = 1;
        else if (camp == "-1")
            c = -1;
        else
            throw IngestError(label_path + ":" + std::to_string(line_no) + ": camp must be +1 or -1");
        if (!labels.emplace(id, c).second)
            throw IngestError(label_path + ":" + std::to_string(line_no) + ": duplicate label for node " +
                              std::to_string(id));
    }

    IngestedDataset out;
    out.graph = std::move(loaded.graph);
    out.original_ids = std::move(loaded.original_ids);
    out.remapped = loaded.remapped;
    const int n = out.graph.node_count();
    out.camps.resize(n);
    out.s0 = Vec(n);
    for (int v = 0; v < n; ++v) {
        auto it = labels.find(out.original_ids[v]);
        if (it == labels.end())
            throw IngestError(label_path + ": no camp label for node " +
                              std::to_string(out.original_ids[v]));
        out.camps[v] = it->second;
        out.s0[v] = it->second;
    }
    out.connected = is_connected(out.graph);
    if (!out.connected && !force)
        throw IngestError(edge_path + ": graph is not a single connected component (use force to keep)");
    return out;
}

}  // namespace pacifier

#include "gplab/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace gplab {

std::size_t Graph::edge_count() const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t j = i + 1; j < n_nodes; ++j)
            if (adjacency(i, j) != 0.0) ++c;
    return c;
}

void Graph::validate() const {
    if (n_nodes < 1) throw std::invalid_argument("graph: must have at least one node");
    if (adjacency.rows() != n_nodes || adjacency.cols() != n_nodes)
        throw std::invalid_argument("graph: adjacency shape mismatch");
    if (features.rows() != n_nodes)
        throw std::invalid_argument("graph: feature row count mismatch");
    if (!features.all_finite() || !adjacency.all_finite())
        throw std::invalid_argument("graph: non-finite entries");
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (adjacency(i, i) != 0.0) throw std::invalid_argument("graph: nonzero diagonal");
        for (std::size_t j = 0; j < n_nodes; ++j) {
            if (adjacency(i, j) < 0.0) throw std::invalid_argument("graph: negative adjacency entry");
            if (adjacency(i, j) != adjacency(j, i))
                throw std::invalid_argument("graph: adjacency not symmetric");
        }
    }
}

Graph generate_graph(std::size_t n_nodes, std::size_t feature_dim, double density, RngStream& rng) {
    if (n_nodes < 1) throw std::invalid_argument("generate_graph: n_nodes must be >= 1");
    if (!(density > 0.0 && density < 1.0))
        throw std::invalid_argument("generate_graph: density must lie in (0, 1)");
    Graph g;
    g.n_nodes = n_nodes;
    g.adjacency = Matrix(n_nodes, n_nodes);
    g.features = Matrix(n_nodes, feature_dim);
    for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t j = i + 1; j < n_nodes; ++j)
            if (rng.uniform() < density) {
                g.adjacency(i, j) = 1.0;
                g.adjacency(j, i) = 1.0;
            }
    for (std::size_t i = 0; i < n_nodes; ++i)
        for (std::size_t f = 0; f < feature_dim; ++f) g.features(i, f) = rng.normal();
    return g;
}

std::vector<Graph> generate_dataset(const DatasetSpec& spec, RngStream& rng) {
    if (spec.n_graphs < 1 || spec.feature_dim < 1 || spec.avg_nodes < 1)
        throw std::invalid_argument("generate_dataset: counts must be >= 1");
    std::size_t lo = static_cast<std::size_t>(std::ceil(0.5 * static_cast<double>(spec.avg_nodes)));
    std::size_t hi = static_cast<std::size_t>(std::floor(1.5 * static_cast<double>(spec.avg_nodes)));
    if (lo < 1) lo = 1;
    std::vector<Graph> out;
    out.reserve(spec.n_graphs);
    for (std::size_t i = 0; i < spec.n_graphs; ++i) {
        std::size_t n = lo + rng.uniform_int(hi - lo + 1);
        out.push_back(generate_graph(n, spec.feature_dim, spec.density, rng));
    }
    return out;
}

Graph apply_data_operation(const Graph& g, const DataOperationSpec& spec, RngStream& rng) {
    g.validate();
    if (spec.enabled_ops.empty())
        throw std::invalid_argument("apply_data_operation: no operations enabled");
    if (spec.intensity < 0.0 || spec.intensity > 1.0)
        throw std::invalid_argument("apply_data_operation: intensity outside [0, 1]");
    const double beta = spec.intensity;
    auto fires = [&rng, beta]() {
        if (beta <= 0.0) return false;
        if (beta >= 1.0) { rng.uniform(); return true; }
        return rng.uniform() < beta;
    };

    Graph out = g;
    const std::size_t feat = g.feature_dim();

    // fixed application order keeps results reproducible
    if (spec.enabled_ops.count(DataOp::DeleteNode)) {
        std::vector<bool> drop(out.n_nodes, false);
        std::size_t n_drop = 0;
        for (std::size_t i = 0; i < out.n_nodes; ++i)
            if (fires()) { drop[i] = true; ++n_drop; }
        if (n_drop == out.n_nodes) drop[0] = false, --n_drop; // never empty the graph
        if (n_drop > 0) {
            std::vector<std::size_t> keep;
            for (std::size_t i = 0; i < out.n_nodes; ++i)
                if (!drop[i]) keep.push_back(i);
            Graph shrunk;
            shrunk.n_nodes = keep.size();
            shrunk.adjacency = Matrix(keep.size(), keep.size());
            shrunk.features = Matrix(keep.size(), feat);
            for (std::size_t a = 0; a < keep.size(); ++a) {
                for (std::size_t b = 0; b < keep.size(); ++b)
                    shrunk.adjacency(a, b) = out.adjacency(keep[a], keep[b]);
                for (std::size_t f = 0; f < feat; ++f)
                    shrunk.features(a, f) = out.features(keep[a], f);
            }
            out = std::move(shrunk);
        }
    }

    if (spec.enabled_ops.count(DataOp::DeleteEdge)) {
        for (std::size_t i = 0; i < out.n_nodes; ++i)
            for (std::size_t j = i + 1; j < out.n_nodes; ++j)
                if (out.adjacency(i, j) != 0.0 && fires()) {
                    out.adjacency(i, j) = 0.0;
                    out.adjacency(j, i) = 0.0;
                }
    }

    if (spec.enabled_ops.count(DataOp::AddEdge)) {
        for (std::size_t i = 0; i < out.n_nodes; ++i)
            for (std::size_t j = i + 1; j < out.n_nodes; ++j)
                if (out.adjacency(i, j) == 0.0 && fires()) {
                    out.adjacency(i, j) = 1.0;
                    out.adjacency(j, i) = 1.0;
                }
    }

    if (spec.enabled_ops.count(DataOp::AddNode)) {
        // a single insertion candidate per application
        if (fires()) {
            std::size_t n = out.n_nodes;
            Graph grown;
            grown.n_nodes = n + 1;
            grown.adjacency = Matrix(n + 1, n + 1);
            grown.features = Matrix(n + 1, feat);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) grown.adjacency(i, j) = out.adjacency(i, j);
                for (std::size_t f = 0; f < feat; ++f) grown.features(i, f) = out.features(i, f);
            }
            for (std::size_t f = 0; f < feat; ++f) grown.features(n, f) = rng.normal();
            for (std::size_t i = 0; i < n; ++i)
                if (rng.uniform() < spec.add_edge_density) {
                    grown.adjacency(i, n) = 1.0;
                    grown.adjacency(n, i) = 1.0;
                }
            out = std::move(grown);
        }
    }

    if (spec.enabled_ops.count(DataOp::MaskFeature)) {
        for (std::size_t i = 0; i < out.n_nodes; ++i)
            for (std::size_t f = 0; f < feat; ++f)
                if (fires()) out.features(i, f) = 0.0;
    }

    out.validate();
    return out;
}

Matrix diffusion_from_adjacency(const Matrix& adjacency, DiffusionScheme scheme) {
    const std::size_t n = adjacency.rows();
    Matrix s = adjacency;
    for (std::size_t i = 0; i < n; ++i) s(i, i) += 1.0;
    if (scheme == DiffusionScheme::RawSelfLoop) return s;
    std::vector<double> dinv(n);
    for (std::size_t i = 0; i < n; ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < n; ++j) d += s(i, j);
        dinv[i] = 1.0 / std::sqrt(d);
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) s(i, j) *= dinv[i] * dinv[j];
    return s;
}

Matrix diffusion_matrix(const Graph& g, DiffusionScheme scheme) {
    return diffusion_from_adjacency(g.adjacency, scheme);
}

namespace {

std::vector<std::string> read_lines(const std::string& file) {
    std::ifstream in(file);
    if (!in) throw std::runtime_error("read_tu_dataset: cannot open " + file);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        while (!line.empty() && (line.back() == '\r' || line.back() == '\n')) line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

long parse_long(const std::string& tok, const std::string& file, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        long v = std::stol(tok, &pos);
        while (pos < tok.size() && std::isspace(static_cast<unsigned char>(tok[pos]))) ++pos;
        if (pos != tok.size()) throw std::invalid_argument("trailing");
        return v;
    } catch (...) {
        throw std::runtime_error("read_tu_dataset: non-integer token '" + tok + "' in " + file +
                                 " line " + std::to_string(line_no));
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        std::size_t a = tok.find_first_not_of(" \t");
        std::size_t b = tok.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : tok.substr(a, b - a + 1));
    }
    return out;
}

bool file_exists(const std::string& path) {
    std::ifstream in(path);
    return static_cast<bool>(in);
}

} // namespace

std::vector<Graph> read_tu_dataset(const std::string& path, const std::string& name) {
    const std::string base = path + "/" + name;
    const std::string a_file = base + "_A.txt";
    const std::string ind_file = base + "_graph_indicator.txt";
    const std::string label_file = base + "_node_labels.txt";
    const std::string attr_file = base + "_node_attributes.txt";

    auto ind_lines = read_lines(ind_file);
    const std::size_t total_nodes = ind_lines.size();
    std::vector<std::size_t> graph_of(total_nodes);
    std::size_t n_graphs = 0;
    for (std::size_t i = 0; i < total_nodes; ++i) {
        long gid = parse_long(ind_lines[i], ind_file, i + 1);
        if (gid < 1)
            throw std::runtime_error("read_tu_dataset: graph indicator < 1 in " + ind_file +
                                     " line " + std::to_string(i + 1));
        graph_of[i] = static_cast<std::size_t>(gid - 1);
        n_graphs = std::max(n_graphs, static_cast<std::size_t>(gid));
    }

    std::vector<std::size_t> node_count(n_graphs, 0);
    std::vector<std::size_t> local_index(total_nodes);
    for (std::size_t i = 0; i < total_nodes; ++i) local_index[i] = node_count[graph_of[i]]++;

    // features from labels (one-hot) or attributes
    std::size_t feature_dim = 0;
    Matrix all_features;
    if (file_exists(label_file)) {
        auto lines = read_lines(label_file);
        if (lines.size() != total_nodes)
            throw std::runtime_error("read_tu_dataset: node label count mismatch in " + label_file);
        std::vector<long> labels(total_nodes);
        std::map<long, std::size_t> label_index;
        for (std::size_t i = 0; i < total_nodes; ++i) {
            labels[i] = parse_long(lines[i], label_file, i + 1);
            label_index.emplace(labels[i], 0);
        }
        std::size_t idx = 0;
        for (auto& kv : label_index) kv.second = idx++;
        feature_dim = label_index.size();
        all_features = Matrix(total_nodes, feature_dim);
        for (std::size_t i = 0; i < total_nodes; ++i)
            all_features(i, label_index[labels[i]]) = 1.0;
    } else if (file_exists(attr_file)) {
        auto lines = read_lines(attr_file);
        if (lines.size() != total_nodes)
            throw std::runtime_error("read_tu_dataset: attribute count mismatch in " + attr_file);
        auto first = split_csv(lines[0]);
        feature_dim = first.size();
        all_features = Matrix(total_nodes, feature_dim);
        for (std::size_t i = 0; i < total_nodes; ++i) {
            auto toks = split_csv(lines[i]);
            if (toks.size() != feature_dim)
                throw std::runtime_error("read_tu_dataset: ragged attributes in " + attr_file +
                                         " line " + std::to_string(i + 1));
            for (std::size_t f = 0; f < feature_dim; ++f) all_features(i, f) = std::stod(toks[f]);
        }
    } else {
        throw std::runtime_error("read_tu_dataset: neither " + label_file + " nor " + attr_file +
                                 " exists");
    }

    std::vector<Graph> graphs(n_graphs);
    for (std::size_t gi = 0; gi < n_graphs; ++gi) {
        graphs[gi].n_nodes = node_count[gi];
        graphs[gi].adjacency = Matrix(node_count[gi], node_count[gi]);
        graphs[gi].features = Matrix(node_count[gi], feature_dim);
    }
    for (std::size_t i = 0; i < total_nodes; ++i)
        for (std::size_t f = 0; f < feature_dim; ++f)
            graphs[graph_of[i]].features(local_index[i], f) = all_features(i, f);

    auto edge_lines = read_lines(a_file);
    for (std::size_t li = 0; li < edge_lines.size(); ++li) {
        auto toks = split_csv(edge_lines[li]);
        if (toks.size() != 2)
            throw std::runtime_error("read_tu_dataset: expected 'i, j' in " + a_file + " line " +
                                     std::to_string(li + 1));
        long u = parse_long(toks[0], a_file, li + 1);
        long v = parse_long(toks[1], a_file, li + 1);
        if (u < 1 || v < 1 || static_cast<std::size_t>(u) > total_nodes ||
            static_cast<std::size_t>(v) > total_nodes)
            throw std::runtime_error("read_tu_dataset: node index out of range in " + a_file +
                                     " line " + std::to_string(li + 1));
        std::size_t ui = static_cast<std::size_t>(u - 1), vi = static_cast<std::size_t>(v - 1);
        if (graph_of[ui] != graph_of[vi])
            throw std::runtime_error("read_tu_dataset: edge crosses graphs in " + a_file +
                                     " line " + std::to_string(li + 1));
        if (ui == vi) continue; // drop self loops
        Graph& g = graphs[graph_of[ui]];
        g.adjacency(local_index[ui], local_index[vi]) = 1.0;
        g.adjacency(local_index[vi], local_index[ui]) = 1.0;
    }
    return graphs;
}

std::string to_string(DiffusionScheme s) {
    return s == DiffusionScheme::RawSelfLoop ? "raw_self_loop" : "sym_normalized";
}

DiffusionScheme diffusion_scheme_from_string(const std::string& s) {
    if (s == "raw_self_loop") return DiffusionScheme::RawSelfLoop;
    if (s == "sym_normalized") return DiffusionScheme::SymNormalized;
    throw std::invalid_argument("unknown diffusion scheme: " + s);
}

std::string to_string(DataOp op) {
    switch (op) {
        case DataOp::DeleteNode: return "delete_node";
        case DataOp::AddNode: return "add_node";
        case DataOp::DeleteEdge: return "delete_edge";
        case DataOp::AddEdge: return "add_edge";
        case DataOp::MaskFeature: return "mask_feature";
    }
    return "?";
}

DataOp data_op_from_string(const std::string& s) {
    if (s == "delete_node") return DataOp::DeleteNode;
    if (s == "add_node") return DataOp::AddNode;
    if (s == "delete_edge") return DataOp::DeleteEdge;
    if (s == "add_edge") return DataOp::AddEdge;
    if (s == "mask_feature") return DataOp::MaskFeature;
    throw std::invalid_argument("unknown data operation: " + s);
}

} // namespace gplab

#include "gplab/gnn.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace gplab {

using nlohmann::json;

double activation(double x, double slope, bool linear) {
    if (linear) return x;
    return x > 0.0 ? x : slope * x;
}

double activation_grad(double x, double slope, bool linear) {
    if (linear) return 1.0;
    return x > 0.0 ? 1.0 : slope; // slope at the kink by convention
}

FrozenModel init_frozen_model(std::size_t n_layers, std::size_t feature_dim, Arch arch,
                              std::size_t rank_loss, double leaky_slope, Readout readout,
                              DiffusionScheme scheme, RngStream& rng,
                              bool deficient_all_layers) {
    if (rank_loss >= feature_dim)
        throw std::invalid_argument("init_frozen_model: rank_loss must be < feature_dim");
    if (n_layers < 1) throw std::invalid_argument("init_frozen_model: need at least one layer");
    FrozenModel m;
    m.arch = arch;
    m.leaky_slope = leaky_slope;
    m.readout = std::move(readout);
    m.scheme = scheme;
    m.rank_loss = rank_loss;
    m.deficient_all_layers = deficient_all_layers;
    const double scale = 1.0 / std::sqrt(static_cast<double>(feature_dim));
    for (std::size_t l = 0; l < n_layers; ++l) {
        Matrix w(feature_dim, feature_dim);
        for (std::size_t i = 0; i < feature_dim; ++i)
            for (std::size_t j = 0; j < feature_dim; ++j) w(i, j) = scale * rng.normal();
        bool deficient = rank_loss > 0 && (deficient_all_layers || l + 1 == n_layers);
        if (deficient) w = rank_project(w, feature_dim - rank_loss);
        m.layers.push_back(std::move(w));
    }
    return m;
}

std::vector<double> apply_readout(const Readout& readout, const Matrix& h) {
    const std::size_t n = h.rows(), f = h.cols();
    std::vector<double> out(f, 0.0);
    switch (readout.kind) {
        case ReadoutKind::Mean:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < f; ++j) out[j] += h(i, j);
            for (double& v : out) v /= static_cast<double>(n);
            break;
        case ReadoutKind::Sum:
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < f; ++j) out[j] += h(i, j);
            break;
        case ReadoutKind::Weighted:
            if (readout.weights.size() != n)
                throw std::invalid_argument("weighted readout: weight length " +
                                            std::to_string(readout.weights.size()) +
                                            " != node count " + std::to_string(n));
            for (double w : readout.weights)
                if (w <= 0.0)
                    throw std::invalid_argument("weighted readout: weights must be > 0");
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < f; ++j) out[j] += readout.weights[i] * h(i, j);
            break;
    }
    return out;
}

Matrix gat_attention(const Matrix& adjacency, const Matrix& features) {
    const std::size_t n = adjacency.rows();
    Matrix e(n, n);
    Matrix s(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        double emax = -1e300;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && adjacency(i, j) == 0.0) continue;
            double dot = 0.0;
            for (std::size_t f = 0; f < features.cols(); ++f) dot += features(i, f) * features(j, f);
            e(i, j) = dot;
            emax = std::max(emax, dot);
        }
        double denom = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && adjacency(i, j) == 0.0) continue;
            s(i, j) = std::exp(e(i, j) - emax);
            denom += s(i, j);
        }
        for (std::size_t j = 0; j < n; ++j) s(i, j) /= denom;
    }
    return s;
}

ForwardCache forward_pass(const FrozenModel& model, const Matrix& adjacency,
                          const Matrix& features) {
    if (features.cols() != model.feature_dim())
        throw std::invalid_argument("forward_pass: feature dimension " +
                                    std::to_string(features.cols()) + " != model dimension " +
                                    std::to_string(model.feature_dim()));
    ForwardCache c;
    c.s = (model.arch == Arch::Gat) ? gat_attention(adjacency, features)
                                    : diffusion_from_adjacency(adjacency, model.scheme);
    const bool linear = model.arch == Arch::GcnLinear;
    c.h.push_back(features);
    for (std::size_t l = 0; l < model.n_layers(); ++l) {
        Matrix y = matmul(c.h.back(), model.layers[l]);
        Matrix z = matmul(c.s, y);
        Matrix h(z.rows(), z.cols());
        for (std::size_t i = 0; i < z.rows(); ++i)
            for (std::size_t j = 0; j < z.cols(); ++j)
                h(i, j) = activation(z(i, j), model.leaky_slope, linear);
        c.y.push_back(std::move(y));
        c.z.push_back(std::move(z));
        c.h.push_back(std::move(h));
    }
    c.output = apply_readout(model.readout, c.h.back());
    return c;
}

Matrix forward_embedding(const FrozenModel& model, const Graph& g) {
    return forward_pass(model, g.adjacency, g.features).h.back();
}

std::vector<double> model_output(const FrozenModel& model, const Graph& g) {
    return forward_pass(model, g.adjacency, g.features).output;
}

std::vector<double> target_embedding(const FrozenModel& model, const Graph& g,
                                     const DataOperationSpec& spec, RngStream& rng) {
    return model_output(model, apply_data_operation(g, spec, rng));
}

namespace {

json matrix_to_json(const Matrix& m) {
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    j["entries"] = m.data();
    return j;
}

Matrix matrix_from_json(const json& j) {
    Matrix m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
    auto entries = j.at("entries").get<std::vector<double>>();
    if (entries.size() != m.rows() * m.cols())
        throw std::runtime_error("matrix json: entry count mismatch");
    m.data() = std::move(entries);
    return m;
}

} // namespace

std::string save_model_json(const FrozenModel& model) {
    json j;
    j["arch"] = to_string(model.arch);
    j["leaky_slope"] = model.leaky_slope;
    j["readout"] = to_string(model.readout.kind);
    if (model.readout.kind == ReadoutKind::Weighted) j["readout_weights"] = model.readout.weights;
    j["diffusion_scheme"] = to_string(model.scheme);
    j["rank_loss"] = model.rank_loss;
    j["deficient_all_layers"] = model.deficient_all_layers;
    j["layers"] = json::array();
    for (const auto& w : model.layers) j["layers"].push_back(matrix_to_json(w));
    return j.dump(2);
}

FrozenModel load_model_json(const std::string& text) {
    json j = json::parse(text);
    FrozenModel m;
    m.arch = arch_from_string(j.at("arch").get<std::string>());
    m.leaky_slope = j.at("leaky_slope").get<double>();
    m.readout.kind = readout_kind_from_string(j.at("readout").get<std::string>());
    if (m.readout.kind == ReadoutKind::Weighted)
        m.readout.weights = j.at("readout_weights").get<std::vector<double>>();
    m.scheme = diffusion_scheme_from_string(j.at("diffusion_scheme").get<std::string>());
    m.rank_loss = j.at("rank_loss").get<std::size_t>();
    m.deficient_all_layers = j.value("deficient_all_layers", false);
    for (const auto& lw : j.at("layers")) m.layers.push_back(matrix_from_json(lw));
    return m;
}

void save_model_file(const FrozenModel& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << save_model_json(model);
}

FrozenModel load_model_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read model file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return load_model_json(ss.str());
}

std::string to_string(Arch a) {
    switch (a) {
        case Arch::Gcn: return "gcn";
        case Arch::Gat: return "gat";
        case Arch::GcnLinear: return "gcn_linear";
    }
    return "?";
}

Arch arch_from_string(const std::string& s) {
    if (s == "gcn") return Arch::Gcn;
    if (s == "gat") return Arch::Gat;
    if (s == "gcn_linear") return Arch::GcnLinear;
    throw std::invalid_argument("unknown arch: " + s);
}

std::string to_string(ReadoutKind k) {
    switch (k) {
        case ReadoutKind::Mean: return "mean";
        case ReadoutKind::Sum: return "sum";
        case ReadoutKind::Weighted: return "weighted";
    }
    return "?";
}

ReadoutKind readout_kind_from_string(const std::string& s) {
    if (s == "mean") return ReadoutKind::Mean;
    if (s == "sum") return ReadoutKind::Sum;
    if (s == "weighted") return ReadoutKind::Weighted;
    throw std::invalid_argument("unknown readout: " + s);
}

} // namespace gplab

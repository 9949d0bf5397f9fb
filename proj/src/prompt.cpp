#include "gplab/prompt.hpp"

#include <cmath>
#include <stdexcept>

namespace gplab {

double softplus(double x) {
    if (x > 30.0) return x;
    return std::log1p(std::exp(x));
}

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    double e = std::exp(x);
    return e / (1.0 + e);
}

std::size_t Prompt::param_count() const {
    switch (kind) {
        case PromptKind::Gpf:
            return p.size();
        case PromptKind::GpfPlus:
            return tokens.data().size() + q.data().size();
        case PromptKind::AllInOne: {
            std::size_t n = tokens.data().size();
            for (const auto& c : cross_raw) n += c.data().size();
            return n;
        }
    }
    return 0;
}

std::vector<double> Prompt::to_vector() const {
    std::vector<double> v;
    v.reserve(param_count());
    switch (kind) {
        case PromptKind::Gpf:
            v = p;
            break;
        case PromptKind::GpfPlus:
            v.insert(v.end(), tokens.data().begin(), tokens.data().end());
            v.insert(v.end(), q.data().begin(), q.data().end());
            break;
        case PromptKind::AllInOne:
            v.insert(v.end(), tokens.data().begin(), tokens.data().end());
            for (const auto& c : cross_raw) v.insert(v.end(), c.data().begin(), c.data().end());
            break;
    }
    return v;
}

void Prompt::from_vector(const std::vector<double>& v) {
    if (v.size() != param_count())
        throw std::invalid_argument("prompt: parameter vector length mismatch");
    std::size_t off = 0;
    switch (kind) {
        case PromptKind::Gpf:
            p = v;
            break;
        case PromptKind::GpfPlus:
            std::copy(v.begin(), v.begin() + tokens.data().size(), tokens.data().begin());
            off = tokens.data().size();
            std::copy(v.begin() + off, v.begin() + off + q.data().size(), q.data().begin());
            break;
        case PromptKind::AllInOne:
            std::copy(v.begin(), v.begin() + tokens.data().size(), tokens.data().begin());
            off = tokens.data().size();
            for (auto& c : cross_raw) {
                std::copy(v.begin() + off, v.begin() + off + c.data().size(), c.data().begin());
                off += c.data().size();
            }
            break;
    }
}

Prompt init_prompt(PromptKind kind, std::size_t k, std::size_t feature_dim, std::size_t n_graphs,
                   const std::vector<std::size_t>& node_counts, RngStream& rng,
                   InnerMode inner_mode_override, bool use_inner_override) {
    if (k < 1 || n_graphs < 1) throw std::invalid_argument("init_prompt: k and M must be >= 1");
    if (kind == PromptKind::Gpf && k != 1)
        throw std::invalid_argument("init_prompt: gpf requires k = 1");
    const double scale = 0.01;
    Prompt pr;
    pr.kind = kind;
    pr.k = k;
    pr.feature_dim = feature_dim;
    pr.n_graphs = n_graphs;
    switch (kind) {
        case PromptKind::Gpf:
            pr.p.resize(feature_dim);
            for (double& x : pr.p) x = scale * rng.normal();
            break;
        case PromptKind::GpfPlus:
            pr.tokens = Matrix(k, feature_dim);
            pr.q = Matrix(n_graphs, k);
            for (double& x : pr.tokens.data()) x = scale * rng.normal();
            for (double& x : pr.q.data()) x = scale * rng.normal();
            break;
        case PromptKind::AllInOne:
            if (node_counts.size() != n_graphs)
                throw std::invalid_argument("init_prompt: node_counts must have one entry per graph");
            pr.tokens = Matrix(k, feature_dim);
            for (double& x : pr.tokens.data()) x = scale * rng.normal();
            pr.cross_raw.reserve(n_graphs);
            for (std::size_t i = 0; i < n_graphs; ++i) {
                Matrix c(k, node_counts[i]);
                for (double& x : c.data()) x = scale * rng.normal();
                pr.cross_raw.push_back(std::move(c));
            }
            pr.inner_mode = use_inner_override
                                ? inner_mode_override
                                : (k > 1 ? InnerMode::InnerProductSigmoid : InnerMode::Zero);
            break;
    }
    return pr;
}

PromptedGraph apply_prompt(const Prompt& prompt, const Graph& g, std::size_t graph_index) {
    if (g.feature_dim() != prompt.feature_dim && prompt.feature_dim != 0)
        throw std::invalid_argument("apply_prompt: feature dimension mismatch");
    PromptedGraph out;
    switch (prompt.kind) {
        case PromptKind::Gpf: {
            out.graph = g;
            for (std::size_t i = 0; i < g.n_nodes; ++i)
                for (std::size_t f = 0; f < g.feature_dim(); ++f)
                    out.graph.features(i, f) += prompt.p[f];
            break;
        }
        case PromptKind::GpfPlus: {
            if (graph_index >= prompt.q.rows())
                throw std::out_of_range("apply_prompt: graph_index beyond Q rows");
            out.graph = g;
            std::vector<double> shift(g.feature_dim(), 0.0);
            for (std::size_t a = 0; a < prompt.k; ++a) {
                double qa = prompt.q(graph_index, a);
                for (std::size_t f = 0; f < g.feature_dim(); ++f)
                    shift[f] += qa * prompt.tokens(a, f);
            }
            for (std::size_t i = 0; i < g.n_nodes; ++i)
                for (std::size_t f = 0; f < g.feature_dim(); ++f)
                    out.graph.features(i, f) += shift[f];
            break;
        }
        case PromptKind::AllInOne: {
            if (graph_index >= prompt.cross_raw.size())
                throw std::out_of_range("apply_prompt: graph_index beyond cross blocks");
            const Matrix& cr = prompt.cross_raw[graph_index];
            if (cr.cols() != g.n_nodes)
                throw std::invalid_argument("apply_prompt: cross block sized for a different graph");
            const std::size_t n = g.n_nodes, k = prompt.k;
            out.graph.n_nodes = n + k;
            out.graph.adjacency = Matrix(n + k, n + k);
            out.graph.features = Matrix(n + k, g.feature_dim());
            out.n_prompt_nodes = k;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) out.graph.adjacency(i, j) = g.adjacency(i, j);
                for (std::size_t f = 0; f < g.feature_dim(); ++f)
                    out.graph.features(i, f) = g.features(i, f);
            }
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t f = 0; f < g.feature_dim(); ++f)
                    out.graph.features(n + a, f) = prompt.tokens(a, f);
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t i = 0; i < n; ++i) {
                    double w = softplus(cr(a, i));
                    out.graph.adjacency(n + a, i) = w;
                    out.graph.adjacency(i, n + a) = w;
                }
            if (prompt.inner_mode == InnerMode::InnerProductSigmoid) {
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = a + 1; b < k; ++b) {
                        double dot = 0.0;
                        for (std::size_t f = 0; f < g.feature_dim(); ++f)
                            dot += prompt.tokens(a, f) * prompt.tokens(b, f);
                        double w = sigmoid(dot);
                        out.graph.adjacency(n + a, n + b) = w;
                        out.graph.adjacency(n + b, n + a) = w;
                    }
            }
            break;
        }
    }
    return out;
}

std::string to_string(PromptKind k) {
    switch (k) {
        case PromptKind::Gpf: return "gpf";
        case PromptKind::GpfPlus: return "gpf_plus";
        case PromptKind::AllInOne: return "all_in_one";
    }
    return "?";
}

PromptKind prompt_kind_from_string(const std::string& s) {
    if (s == "gpf") return PromptKind::Gpf;
    if (s == "gpf_plus") return PromptKind::GpfPlus;
    if (s == "all_in_one") return PromptKind::AllInOne;
    throw std::invalid_argument("unknown prompt kind: " + s);
}

} // namespace gplab

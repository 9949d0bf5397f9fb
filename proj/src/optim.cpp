#include "gplab/optim.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

namespace gplab {

using nlohmann::json;

namespace {

struct Grads {
    std::vector<double> p;
    Matrix tokens;
    Matrix q;
    std::vector<Matrix> cross_raw;

    explicit Grads(const Prompt& pr) {
        switch (pr.kind) {
            case PromptKind::Gpf:
                p.assign(pr.p.size(), 0.0);
                break;
            case PromptKind::GpfPlus:
                tokens = Matrix(pr.tokens.rows(), pr.tokens.cols());
                q = Matrix(pr.q.rows(), pr.q.cols());
                break;
            case PromptKind::AllInOne:
                tokens = Matrix(pr.tokens.rows(), pr.tokens.cols());
                for (const auto& c : pr.cross_raw) cross_raw.emplace_back(c.rows(), c.cols());
                break;
        }
    }

    std::vector<double> flatten(const Prompt& pr) const {
        std::vector<double> v;
        v.reserve(pr.param_count());
        switch (pr.kind) {
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
};

Matrix readout_backward(const Readout& readout, std::size_t n_rows,
                        const std::vector<double>& dr) {
    const std::size_t f = dr.size();
    Matrix dh(n_rows, f);
    switch (readout.kind) {
        case ReadoutKind::Mean: {
            const double inv = 1.0 / static_cast<double>(n_rows);
            for (std::size_t i = 0; i < n_rows; ++i)
                for (std::size_t j = 0; j < f; ++j) dh(i, j) = dr[j] * inv;
            break;
        }
        case ReadoutKind::Sum:
            for (std::size_t i = 0; i < n_rows; ++i)
                for (std::size_t j = 0; j < f; ++j) dh(i, j) = dr[j];
            break;
        case ReadoutKind::Weighted:
            for (std::size_t i = 0; i < n_rows; ++i)
                for (std::size_t j = 0; j < f; ++j) dh(i, j) = readout.weights[i] * dr[j];
            break;
    }
    return dh;
}

/// dS -> dA for S = D^{-1/2} (A+I) D^{-1/2}; entries of dA on the diagonal
/// are meaningless (self loops are constant) and ignored by callers.
Matrix sym_normalized_backward(const Matrix& ds, const Matrix& adjacency) {
    const std::size_t n = adjacency.rows();
    Matrix atil = adjacency;
    for (std::size_t i = 0; i < n; ++i) atil(i, i) += 1.0;
    std::vector<double> d(n, 0.0), dinvsq(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) d[i] += atil(i, j);
        dinvsq[i] = 1.0 / std::sqrt(d[i]);
    }
    // sensitivity to each degree
    std::vector<double> gdeg(n, 0.0);
    for (std::size_t p = 0; p < n; ++p) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            s += (ds(p, j) * atil(p, j) + ds(j, p) * atil(j, p)) * dinvsq[j];
        gdeg[p] = -0.5 * s * dinvsq[p] / d[p]; // -1/2 d_p^{-3/2} * sum
    }
    Matrix da(n, n);
    for (std::size_t p = 0; p < n; ++p)
        for (std::size_t q = 0; q < n; ++q)
            da(p, q) = ds(p, q) * dinvsq[p] * dinvsq[q] + gdeg[p];
    return da;
}

/// One graph's contribution to the squared loss and to the parameter
/// gradients. weight is the d(loss)/d(eps^2) factor (1/M for batches).
double accumulate_graph(const FrozenModel& model, const Prompt& prompt, const Graph& g,
                        std::size_t graph_index, const std::vector<double>& target,
                        double weight, Grads& acc) {
    PromptedGraph pg = apply_prompt(prompt, g, graph_index);
    const Matrix& x = pg.graph.features;
    const Matrix& adj = pg.graph.adjacency;
    ForwardCache cache = forward_pass(model, adj, x);

    const std::size_t f = model.feature_dim();
    if (target.size() != f) throw std::invalid_argument("target length != feature dimension");
    std::vector<double> dr(f);
    double eps_sq = 0.0;
    for (std::size_t j = 0; j < f; ++j) {
        double diff = cache.output[j] - target[j];
        eps_sq += diff * diff;
        dr[j] = 2.0 * weight * diff;
    }

    const std::size_t nrows = x.rows();
    const bool linear = model.arch == Arch::GcnLinear;
    const bool need_ds =
        model.arch == Arch::Gat || (prompt.kind == PromptKind::AllInOne && model.arch != Arch::Gat);

    Matrix dh = readout_backward(model.readout, nrows, dr);
    Matrix ds(need_ds ? nrows : 0, need_ds ? nrows : 0);
    Matrix st = cache.s.transpose();

    for (std::size_t li = model.n_layers(); li-- > 0;) {
        Matrix dz(nrows, f);
        for (std::size_t i = 0; i < nrows; ++i)
            for (std::size_t j = 0; j < f; ++j)
                dz(i, j) = dh(i, j) * activation_grad(cache.z[li](i, j), model.leaky_slope, linear);
        if (need_ds) ds += matmul(dz, cache.y[li].transpose());
        Matrix dy = matmul(st, dz);
        dh = matmul(dy, model.layers[li].transpose());
    }
    Matrix dx = std::move(dh); // gradient wrt prompted features

    if (model.arch == Arch::Gat) {
        // masked softmax backward, then E = X X^T
        Matrix de(nrows, nrows);
        for (std::size_t i = 0; i < nrows; ++i) {
            double rowdot = 0.0;
            for (std::size_t kk = 0; kk < nrows; ++kk) rowdot += ds(i, kk) * cache.s(i, kk);
            for (std::size_t j = 0; j < nrows; ++j) {
                if (i != j && adj(i, j) == 0.0) continue;
                de(i, j) = cache.s(i, j) * (ds(i, j) - rowdot);
            }
        }
        Matrix dxe = matmul(de, x);
        Matrix dxet = matmul(de.transpose(), x);
        dx += dxe;
        dx += dxet;
    }

    switch (prompt.kind) {
        case PromptKind::Gpf:
            for (std::size_t i = 0; i < nrows; ++i)
                for (std::size_t j = 0; j < f; ++j) acc.p[j] += dx(i, j);
            break;
        case PromptKind::GpfPlus: {
            std::vector<double> u(f, 0.0);
            for (std::size_t i = 0; i < nrows; ++i)
                for (std::size_t j = 0; j < f; ++j) u[j] += dx(i, j);
            for (std::size_t a = 0; a < prompt.k; ++a) {
                double dq = 0.0;
                for (std::size_t j = 0; j < f; ++j) {
                    dq += prompt.tokens(a, j) * u[j];
                    acc.tokens(a, j) += prompt.q(graph_index, a) * u[j];
                }
                acc.q(graph_index, a) += dq;
            }
            break;
        }
        case PromptKind::AllInOne: {
            const std::size_t n = g.n_nodes, k = prompt.k;
            for (std::size_t a = 0; a < k; ++a)
                for (std::size_t j = 0; j < f; ++j) acc.tokens(a, j) += dx(n + a, j);
            if (model.arch != Arch::Gat) {
                Matrix da = (model.scheme == DiffusionScheme::RawSelfLoop)
                                ? ds
                                : sym_normalized_backward(ds, adj);
                const Matrix& cr = prompt.cross_raw[graph_index];
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t i = 0; i < n; ++i)
                        acc.cross_raw[graph_index](a, i) +=
                            (da(i, n + a) + da(n + a, i)) * sigmoid(cr(a, i));
                if (prompt.inner_mode == InnerMode::InnerProductSigmoid) {
                    for (std::size_t a = 0; a < k; ++a)
                        for (std::size_t b = a + 1; b < k; ++b) {
                            double dot = 0.0;
                            for (std::size_t j = 0; j < f; ++j)
                                dot += prompt.tokens(a, j) * prompt.tokens(b, j);
                            double w = sigmoid(dot);
                            double ddot = (da(n + a, n + b) + da(n + b, n + a)) * w * (1.0 - w);
                            for (std::size_t j = 0; j < f; ++j) {
                                acc.tokens(a, j) += ddot * prompt.tokens(b, j);
                                acc.tokens(b, j) += ddot * prompt.tokens(a, j);
                            }
                        }
                }
            }
            break;
        }
    }
    return eps_sq;
}

double loss_and_gradient(const FrozenModel& model, const Prompt& prompt,
                         const std::vector<Graph>& graphs,
                         const std::vector<std::vector<double>>& targets,
                         std::vector<double>* grad_out) {
    if (graphs.empty()) throw std::invalid_argument("empty graph batch");
    if (graphs.size() != targets.size())
        throw std::invalid_argument("graphs/targets length mismatch");
    const double weight = 1.0 / static_cast<double>(graphs.size());
    Grads acc(prompt);
    double sumsq = 0.0;
    for (std::size_t i = 0; i < graphs.size(); ++i)
        sumsq += accumulate_graph(model, prompt, graphs[i], i, targets[i], weight, acc);
    if (grad_out) *grad_out = acc.flatten(prompt);
    return sumsq * weight; // mean squared epsilon
}

} // namespace

double epsilon_loss(const FrozenModel& model, const PromptedGraph& pg,
                    const std::vector<double>& target) {
    if (target.size() != model.feature_dim())
        throw std::invalid_argument("epsilon_loss: target length mismatch");
    std::vector<double> out = model_output(model, pg.graph);
    double s = 0.0;
    for (std::size_t j = 0; j < out.size(); ++j) {
        double d = out[j] - target[j];
        s += d * d;
    }
    return std::sqrt(s);
}

double batch_rmse_loss(const FrozenModel& model, const std::vector<PromptedGraph>& pgs,
                       const std::vector<std::vector<double>>& targets) {
    if (pgs.empty()) throw std::invalid_argument("batch_rmse_loss: empty batch");
    if (pgs.size() != targets.size())
        throw std::invalid_argument("batch_rmse_loss: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < pgs.size(); ++i) {
        double e = epsilon_loss(model, pgs[i], targets[i]);
        s += e * e;
    }
    return std::sqrt(s / static_cast<double>(pgs.size()));
}

double prompt_loss(const FrozenModel& model, const Prompt& prompt,
                   const std::vector<Graph>& graphs,
                   const std::vector<std::vector<double>>& targets) {
    return std::sqrt(loss_and_gradient(model, prompt, graphs, targets, nullptr));
}

std::vector<double> prompt_gradient(const FrozenModel& model, const Prompt& prompt,
                                    const std::vector<Graph>& graphs,
                                    const std::vector<std::vector<double>>& targets) {
    std::vector<double> grad;
    loss_and_gradient(model, prompt, graphs, targets, &grad);
    for (double g : grad)
        if (!std::isfinite(g)) throw std::runtime_error("prompt_gradient: non-finite gradient");
    return grad;
}

std::vector<double> finite_diff_gradient(const FrozenModel& model, const Prompt& prompt,
                                         const std::vector<Graph>& graphs,
                                         const std::vector<std::vector<double>>& targets,
                                         double step) {
    if (step <= 0.0) throw std::invalid_argument("finite_diff_gradient: step must be > 0");
    Prompt work = prompt;
    std::vector<double> params = prompt.to_vector();
    std::vector<double> grad(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        double orig = params[i];
        params[i] = orig + step;
        work.from_vector(params);
        double lp = loss_and_gradient(model, work, graphs, targets, nullptr);
        params[i] = orig - step;
        work.from_vector(params);
        double lm = loss_and_gradient(model, work, graphs, targets, nullptr);
        params[i] = orig;
        grad[i] = (lp - lm) / (2.0 * step);
    }
    return grad;
}

TrialRecord train_prompt(const FrozenModel& model, const std::vector<Graph>& graphs,
                         const std::vector<std::vector<double>>& targets, PromptKind kind,
                         std::size_t k, const Hyperparams& hp, RngStream& rng) {
    std::vector<std::size_t> node_counts;
    node_counts.reserve(graphs.size());
    for (const auto& g : graphs) node_counts.push_back(g.n_nodes);
    Prompt prompt =
        init_prompt(kind, k, model.feature_dim(), graphs.size(), node_counts, rng);

    std::vector<double> params = prompt.to_vector();
    std::vector<double> m(params.size(), 0.0), v(params.size(), 0.0), grad;

    TrialRecord rec;
    rec.seed = rng.stream_id();
    rec.best_prompt = prompt;
    double best = std::numeric_limits<double>::infinity();
    std::size_t last_improve = 0;

    for (std::size_t epoch = 0; epoch < hp.max_epochs; ++epoch) {
        prompt.from_vector(params);
        double loss_sq = loss_and_gradient(model, prompt, graphs, targets, &grad);
        double loss = std::sqrt(loss_sq);
        rec.loss_trace.push_back(loss);
        rec.epochs_run = epoch + 1;
        if (!std::isfinite(loss)) {
            rec.diverged = true;
            rec.final_epsilon = best;
            return rec;
        }
        if (loss < best - hp.improvement_tol) last_improve = epoch;
        if (loss < best) {
            best = loss;
            rec.best_prompt = prompt;
        }
        if (best <= hp.stop_tol) break;
        if (epoch - last_improve >= hp.patience) break;

        const double b1 = hp.adam_beta1, b2 = hp.adam_beta2;
        const double bc1 = 1.0 - std::pow(b1, static_cast<double>(epoch + 1));
        const double bc2 = 1.0 - std::pow(b2, static_cast<double>(epoch + 1));
        for (std::size_t i = 0; i < params.size(); ++i) {
            m[i] = b1 * m[i] + (1.0 - b1) * grad[i];
            v[i] = b2 * v[i] + (1.0 - b2) * grad[i] * grad[i];
            double mhat = m[i] / bc1;
            double vhat = v[i] / bc2;
            params[i] -= hp.learning_rate * (mhat / (std::sqrt(vhat) + hp.adam_eps) +
                                             hp.weight_decay * params[i]);
        }
    }
    rec.final_epsilon = best;
    return rec;
}

MultiRestartResult multi_restart_train(const FrozenModel& model, const std::vector<Graph>& graphs,
                                       const std::vector<std::vector<double>>& targets,
                                       PromptKind kind, std::size_t k, const Hyperparams& hp,
                                       const RngStream& root) {
    if (hp.restarts < 1) throw std::invalid_argument("multi_restart_train: restarts must be >= 1");
    MultiRestartResult out;
    for (std::size_t r = 0; r < hp.restarts; ++r) {
        RngStream rng = root.derive(r);
        out.all.push_back(train_prompt(model, graphs, targets, kind, k, hp, rng));
    }
    std::size_t best_idx = 0;
    for (std::size_t r = 1; r < out.all.size(); ++r)
        if (out.all[r].final_epsilon < out.all[best_idx].final_epsilon) best_idx = r;
    out.best = out.all[best_idx];
    return out;
}

namespace {

/// w^T S^n 1: the scalar gain a uniform feature shift picks up through the
/// diffusion stack and readout of a linear model.
double shift_gain(const FrozenModel& model, const Graph& g) {
    Matrix s = diffusion_matrix(g, model.scheme);
    std::vector<double> sn1(g.n_nodes, 1.0);
    for (std::size_t l = 0; l < model.n_layers(); ++l) sn1 = matvec(s, sn1);
    double lambda = 0.0;
    switch (model.readout.kind) {
        case ReadoutKind::Mean:
            for (double x : sn1) lambda += x;
            lambda /= static_cast<double>(g.n_nodes);
            break;
        case ReadoutKind::Sum:
            for (double x : sn1) lambda += x;
            break;
        case ReadoutKind::Weighted:
            for (std::size_t i = 0; i < g.n_nodes; ++i) lambda += model.readout.weights[i] * sn1[i];
            break;
    }
    return lambda;
}

} // namespace

LinearSolveResult linear_gpf_solve(const FrozenModel& model, const Graph& g,
                                   const std::vector<double>& target) {
    if (model.arch != Arch::GcnLinear)
        throw std::invalid_argument("linear_gpf_solve: model must be gcn_linear");
    const std::size_t f = model.feature_dim();
    if (target.size() != f) throw std::invalid_argument("linear_gpf_solve: target length mismatch");

    std::vector<double> base = model_output(model, g);
    double lambda = shift_gain(model, g);

    Matrix wbar = model.layers[0];
    for (std::size_t l = 1; l < model.n_layers(); ++l) wbar = matmul(wbar, model.layers[l]);

    std::vector<double> rhs(f);
    for (std::size_t j = 0; j < f; ++j) rhs[j] = (target[j] - base[j]) / lambda;

    LinearSolveResult out;
    out.p = solve_row_system(wbar, rhs); // p^T wbar = rhs^T, least squares if singular

    Prompt pr;
    pr.kind = PromptKind::Gpf;
    pr.k = 1;
    pr.feature_dim = f;
    pr.n_graphs = 1;
    pr.p = out.p;
    out.residual = epsilon_loss(model, apply_prompt(pr, g), target);
    return out;
}

LinearSolveResult linear_gpf_batch_solve(const FrozenModel& model,
                                         const std::vector<Graph>& graphs,
                                         const std::vector<std::vector<double>>& targets) {
    if (model.arch != Arch::GcnLinear)
        throw std::invalid_argument("linear_gpf_batch_solve: model must be gcn_linear");
    if (graphs.empty() || graphs.size() != targets.size())
        throw std::invalid_argument("linear_gpf_batch_solve: batch mismatch");
    const std::size_t f = model.feature_dim();
    const std::size_t m = graphs.size();

    // Batch objective: sum_i || d_i - lambda_i W^T p ||^2 with d_i the shift
    // each graph needs. Writing mu = W^T p, the unconstrained optimum is the
    // lambda-weighted centroid mu* = sum(lambda_i d_i) / sum(lambda_i^2); the
    // least-squares row solve then picks the achievable mu closest to mu*.
    std::vector<double> centroid(f, 0.0);
    double lambda_sq = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        if (targets[i].size() != f)
            throw std::invalid_argument("linear_gpf_batch_solve: target length mismatch");
        std::vector<double> base = model_output(model, graphs[i]);
        double lambda = shift_gain(model, graphs[i]);
        for (std::size_t j = 0; j < f; ++j)
            centroid[j] += lambda * (targets[i][j] - base[j]);
        lambda_sq += lambda * lambda;
    }
    for (double& x : centroid) x /= lambda_sq;

    Matrix wbar = model.layers[0];
    for (std::size_t l = 1; l < model.n_layers(); ++l) wbar = matmul(wbar, model.layers[l]);

    LinearSolveResult out;
    out.p = solve_row_system(wbar, centroid);

    Prompt pr;
    pr.kind = PromptKind::Gpf;
    pr.k = 1;
    pr.feature_dim = f;
    pr.n_graphs = m;
    pr.p = out.p;
    std::vector<PromptedGraph> pgs;
    pgs.reserve(m);
    for (std::size_t i = 0; i < m; ++i) pgs.push_back(apply_prompt(pr, graphs[i], i));
    out.residual = batch_rmse_loss(model, pgs, targets);
    return out;
}

std::string TrialRecord::to_json() const {
    json j;
    j["seed"] = seed;
    j["config"] = config;
    j["loss_trace"] = loss_trace;
    j["final_epsilon"] = final_epsilon;
    j["epochs_run"] = epochs_run;
    j["diverged"] = diverged;
    return j.dump();
}

} // namespace gplab

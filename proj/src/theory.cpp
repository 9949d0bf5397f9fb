#include "gplab/theory.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <json.hpp>

namespace gplab {

using nlohmann::json;

namespace {

void check_targets(const std::vector<std::vector<double>>& targets) {
    if (targets.empty()) throw std::invalid_argument("empty target list");
    for (const auto& t : targets)
        if (t.size() != targets.front().size())
            throw std::invalid_argument("targets have mixed dimensions");
}

/// mean of chi_r at unit scale: sqrt(2) Gamma((r+1)/2) / Gamma(r/2)
double chi_mean_factor(double r) {
    if (r <= 0.0) return 0.0;
    return std::sqrt(2.0) * std::exp(std::lgamma((r + 1.0) / 2.0) - std::lgamma(r / 2.0));
}

/// Gram-Schmidt on the columns of a; near-dependent columns are replaced
/// with fresh Gaussian draws so the frame always has full column rank.
void orthonormalize_columns(Matrix& a, RngStream& rng) {
    const std::size_t n = a.rows(), k = a.cols();
    for (std::size_t c = 0; c < k; ++c) {
        for (int attempt = 0; attempt < 64; ++attempt) {
            for (std::size_t prev = 0; prev < c; ++prev) {
                double dot = 0.0;
                for (std::size_t i = 0; i < n; ++i) dot += a(i, c) * a(i, prev);
                for (std::size_t i = 0; i < n; ++i) a(i, c) -= dot * a(i, prev);
            }
            double norm = 0.0;
            for (std::size_t i = 0; i < n; ++i) norm += a(i, c) * a(i, c);
            norm = std::sqrt(norm);
            if (norm > 1e-10) {
                for (std::size_t i = 0; i < n; ++i) a(i, c) /= norm;
                break;
            }
            for (std::size_t i = 0; i < n; ++i) a(i, c) = rng.normal();
        }
    }
}

} // namespace

SinglePromptBound single_prompt_lower_bound(const std::vector<std::vector<double>>& targets,
                                            const std::vector<double>& lambdas) {
    check_targets(targets);
    if (lambdas.size() != targets.size())
        throw std::invalid_argument("single_prompt_lower_bound: lambda count mismatch");
    for (double l : lambdas)
        if (l <= 0.0) throw std::invalid_argument("single_prompt_lower_bound: lambdas must be > 0");

    const std::size_t m = targets.size(), f = targets.front().size();
    double denom = 0.0;
    for (double l : lambdas) denom += l * l;

    SinglePromptBound out;
    out.p_star.assign(f, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < f; ++j) out.p_star[j] += lambdas[i] * targets[i][j];
    for (double& x : out.p_star) x /= denom;

    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < f; ++j) {
            double d = targets[i][j] - lambdas[i] * out.p_star[j];
            out.j_min += d * d;
        }
    out.rmse_bound = std::sqrt(out.j_min / static_cast<double>(m));
    return out;
}

MultiPromptBound multi_prompt_upper_bound(const std::vector<std::vector<double>>& targets,
                                          std::size_t k) {
    check_targets(targets);
    const std::size_t m = targets.size(), f = targets.front().size();
    Matrix v(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = i; j < m; ++j) {
            double dot = 0.0;
            for (std::size_t a = 0; a < f; ++a) dot += targets[i][a] * targets[j][a];
            v(i, j) = dot;
            v(j, i) = dot;
        }
    MultiPromptBound out;
    out.eigenvalues = sym_eig(v).eigenvalues;
    // eigenvalues below the numerical-rank threshold are noise; clamping them
    // keeps the tail exactly zero once k reaches rank(V)
    const double floor_tol =
        out.eigenvalues.empty() ? 0.0 : 1e-12 * std::max(1.0, out.eigenvalues.front());
    double tail = 0.0;
    for (std::size_t i = k; i < out.eigenvalues.size(); ++i)
        if (out.eigenvalues[i] > floor_tol) tail += out.eigenvalues[i];
    out.epsilon_star = std::sqrt(tail / static_cast<double>(m));
    return out;
}

double subspace_residual_oracle(const std::vector<std::vector<double>>& targets, std::size_t k,
                                std::size_t iterations, RngStream& rng) {
    check_targets(targets);
    if (iterations < 1) throw std::invalid_argument("subspace_residual_oracle: iterations >= 1");
    const std::size_t m = targets.size(), f = targets.front().size();

    double total = 0.0;
    for (const auto& t : targets)
        for (double x : t) total += x * x;
    if (k == 0) return total;
    if (k >= f) return 0.0;

    // F x F Gram matrix of the target bundle
    Matrix gram(f, f);
    for (const auto& t : targets)
        for (std::size_t a = 0; a < f; ++a)
            for (std::size_t b = 0; b < f; ++b) gram(a, b) += t[a] * t[b];

    Matrix w(f, k);
    for (double& x : w.data()) x = rng.normal();
    orthonormalize_columns(w, rng);
    for (std::size_t it = 0; it < iterations; ++it) {
        w = matmul(gram, w);
        orthonormalize_columns(w, rng);
    }

    double captured = 0.0;
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t c = 0; c < k; ++c) {
            double dot = 0.0;
            for (std::size_t a = 0; a < f; ++a) dot += targets[i][a] * w(a, c);
            captured += dot * dot;
        }
    return std::max(0.0, total - captured);
}

void chi_moments(const ResidualModel& rm, double& mean, double& variance) {
    if (rm.c <= 0.0) throw std::invalid_argument("chi_moments: scale must be > 0");
    if (rm.r == 0) {
        mean = 0.0;
        variance = 0.0;
        return;
    }
    const double r = static_cast<double>(rm.r);
    const double m1 = chi_mean_factor(r);
    mean = rm.c * m1;
    variance = rm.c * rm.c * (r - m1 * m1);
}

std::vector<double> gaussian_projection_samples(std::size_t feature_dim, std::size_t r, double c,
                                                std::size_t n_samples, RngStream& rng) {
    if (r > feature_dim)
        throw std::invalid_argument("gaussian_projection_samples: r must be <= feature dim");
    if (c <= 0.0) throw std::invalid_argument("gaussian_projection_samples: scale must be > 0");
    std::vector<double> out(n_samples, 0.0);
    if (r == 0) return out;

    Matrix basis(feature_dim, r); // orthonormal basis of the residual subspace
    for (double& x : basis.data()) x = rng.normal();
    orthonormalize_columns(basis, rng);

    std::vector<double> varsigma(feature_dim);
    for (std::size_t s = 0; s < n_samples; ++s) {
        for (double& x : varsigma) x = c * rng.normal();
        double sq = 0.0;
        for (std::size_t col = 0; col < r; ++col) {
            double dot = 0.0;
            for (std::size_t i = 0; i < feature_dim; ++i) dot += basis(i, col) * varsigma[i];
            sq += dot * dot;
        }
        out[s] = std::sqrt(sq);
    }
    return out;
}

double regularized_gamma_p(double a, double x) {
    if (a <= 0.0) throw std::invalid_argument("regularized_gamma_p: a must be > 0");
    if (x < 0.0) throw std::invalid_argument("regularized_gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    const double lg = std::lgamma(a);
    if (x < a + 1.0) {
        // series expansion
        double term = 1.0 / a, sum = term, ap = a;
        for (int n = 0; n < 500; ++n) {
            ap += 1.0;
            term *= x / ap;
            sum += term;
            if (std::fabs(term) < std::fabs(sum) * 1e-15) break;
        }
        return sum * std::exp(-x + a * std::log(x) - lg);
    }
    // continued fraction for Q, then P = 1 - Q  (Lentz's method)
    const double tiny = 1e-300;
    double b = x + 1.0 - a, cc = 1.0 / tiny, d = 1.0 / b, h = d;
    for (int i = 1; i < 500; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        cc = b + an / cc;
        if (std::fabs(cc) < tiny) cc = tiny;
        d = 1.0 / d;
        double delta = d * cc;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-15) break;
    }
    double q = std::exp(-x + a * std::log(x) - lg) * h;
    return 1.0 - q;
}

double kolmogorov_q(double t) {
    if (t <= 0.0) return 1.0;
    double sum = 0.0;
    for (int j = 1; j <= 200; ++j) {
        double term = std::exp(-2.0 * j * j * t * t);
        sum += (j % 2 == 1) ? term : -term;
        if (term < 1e-16) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

namespace {

/// CDF of the fitted family at x, given the parameter map.
double fitted_cdf(DistFamily family, const std::map<std::string, double>& params, double x) {
    if (x <= 0.0) return 0.0;
    switch (family) {
        case DistFamily::Exponential:
            return 1.0 - std::exp(-params.at("rate") * x);
        case DistFamily::Gamma:
            return regularized_gamma_p(params.at("shape"), x / params.at("scale"));
        case DistFamily::ChiSquared:
            return regularized_gamma_p(params.at("dof") / 2.0,
                                       x / (2.0 * params.at("scale")));
        case DistFamily::Chi: {
            double c = params.at("scale");
            return regularized_gamma_p(params.at("dof") / 2.0, x * x / (2.0 * c * c));
        }
    }
    return 0.0;
}

/// Solve var/mean^2 = r/m1(r)^2 - 1 for r; the ratio is strictly
/// decreasing in r, so bisection works.
double chi_dof_from_moments(double mean, double var) {
    const double target = var / (mean * mean);
    auto ratio = [](double r) {
        double m1 = chi_mean_factor(r);
        return r / (m1 * m1) - 1.0;
    };
    double lo = 1e-6, hi = 1.0;
    while (ratio(hi) > target && hi < 1e9) hi *= 2.0;
    if (hi >= 1e9) return hi;
    if (ratio(lo) < target) return lo;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (ratio(mid) > target)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

FitReport fit_error_distribution(const std::vector<double>& samples, DistFamily family,
                                 double fixed_dof) {
    if (samples.size() < 30)
        throw std::invalid_argument("fit_error_distribution: need at least 30 samples");
    for (double s : samples)
        if (!(s > 0.0)) throw std::invalid_argument("fit_error_distribution: samples must be > 0");

    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= n;
    double var = 0.0;
    for (double s : samples) var += (s - mean) * (s - mean);
    var /= n;
    if (var <= 0.0) throw std::invalid_argument("fit_error_distribution: zero-variance samples");

    FitReport rep;
    rep.family = family;
    switch (family) {
        case DistFamily::Exponential:
            rep.params["rate"] = 1.0 / mean;
            break;
        case DistFamily::Gamma:
            rep.params["shape"] = mean * mean / var;
            rep.params["scale"] = var / mean;
            break;
        case DistFamily::ChiSquared:
            rep.params["dof"] = 2.0 * mean * mean / var;
            rep.params["scale"] = var / (2.0 * mean);
            break;
        case DistFamily::Chi: {
            double dof = fixed_dof > 0.0 ? fixed_dof : chi_dof_from_moments(mean, var);
            rep.params["dof"] = dof;
            rep.params["scale"] = mean / chi_mean_factor(dof);
            break;
        }
    }

    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double cdf = fitted_cdf(family, rep.params, sorted[i]);
        double lo = static_cast<double>(i) / n;
        double hi = static_cast<double>(i + 1) / n;
        d = std::max(d, std::max(std::fabs(cdf - lo), std::fabs(hi - cdf)));
    }
    rep.ks_statistic = d;
    rep.p_value = kolmogorov_q(std::sqrt(n) * d);
    return rep;
}

double modulus_estimate(const std::vector<double>& epsilons,
                        const std::vector<double>& target_norms) {
    if (epsilons.size() != target_norms.size() || epsilons.empty())
        throw std::invalid_argument("modulus_estimate: length mismatch or empty input");
    double best = 0.0;
    for (std::size_t i = 0; i < epsilons.size(); ++i) {
        if (target_norms[i] <= 0.0)
            throw std::invalid_argument("modulus_estimate: target norms must be > 0");
        best = std::max(best, epsilons[i] / target_norms[i]);
    }
    return best;
}

std::string BoundReport::to_json() const {
    json j;
    j["bound_kind"] = bound_kind;
    j["theoretical_value"] = theoretical_value;
    j["empirical_value"] = empirical_value;
    j["ratio"] = ratio;
    j["config"] = config;
    return j.dump();
}

std::string FitReport::to_json() const {
    json j;
    j["family"] = to_string(family);
    j["params"] = params;
    j["ks_statistic"] = ks_statistic;
    j["p_value"] = p_value;
    return j.dump();
}

std::string to_string(DistFamily f) {
    switch (f) {
        case DistFamily::Chi: return "chi";
        case DistFamily::Gamma: return "gamma";
        case DistFamily::ChiSquared: return "chi_squared";
        case DistFamily::Exponential: return "exponential";
    }
    return "?";
}

DistFamily dist_family_from_string(const std::string& s) {
    if (s == "chi") return DistFamily::Chi;
    if (s == "gamma") return DistFamily::Gamma;
    if (s == "chi_squared") return DistFamily::ChiSquared;
    if (s == "exponential") return DistFamily::Exponential;
    throw std::invalid_argument("unknown distribution family: " + s);
}

} // namespace gplab

#pragma once

#include <map>
#include <string>
#include <vector>

#include "gplab/matrix.hpp"
#include "gplab/rng.hpp"

namespace gplab {

struct BoundReport {
    std::string bound_kind; // single_lower | multi_upper | modulus
    double theoretical_value = 0.0;
    double empirical_value = 0.0;
    double ratio = 0.0; // empirical / theoretical (0 when theoretical is 0)
    std::string config;

    std::string to_json() const;
};

enum class DistFamily { Chi, Gamma, ChiSquared, Exponential };

struct FitReport {
    DistFamily family = DistFamily::Chi;
    std::map<std::string, double> params;
    double ks_statistic = 0.0;
    double p_value = 1.0;

    std::string to_json() const;
};

struct ResidualModel {
    std::size_t r = 0; // rank loss count
    double c = 1.0;    // per-component noise scale
};

struct SinglePromptBound {
    std::vector<double> p_star;
    double j_min = 0.0;
    double rmse_bound = 0.0; // sqrt(j_min / M)
};

/// Closed-form minimizer of J(p) = sum_i || C_i - lambda_i p ||^2:
/// p* = sum_i lambda_i C_i / sum_i lambda_i^2. Returns J_min and the
/// induced RMSE floor for a single shared prompt vector.
SinglePromptBound single_prompt_lower_bound(const std::vector<std::vector<double>>& targets,
                                            const std::vector<double>& lambdas);

struct MultiPromptBound {
    double epsilon_star = 0.0;
    std::vector<double> eigenvalues; // of V = S^T S, descending
};

/// PCA tail bound for k independent prompt directions:
/// epsilon* = sqrt(sum_{i>k} eig_i(V) / M) with V = S^T S,
/// S = [C_1 ... C_M].
MultiPromptBound multi_prompt_upper_bound(const std::vector<std::vector<double>>& targets,
                                          std::size_t k);

/// Minimum of sum_i ||C_i - proj_W C_i||^2 over orthonormal k-frames W,
/// found by orthogonal iteration on the F x F Gram matrix. Shares no code
/// with the Jacobi eigensolver, so it can referee it.
double subspace_residual_oracle(const std::vector<std::vector<double>>& targets, std::size_t k,
                                std::size_t iterations, RngStream& rng);

/// Mean and variance of c * chi_r. r = 0 degenerates to (0, 0).
void chi_moments(const ResidualModel& rm, double& mean, double& variance);

/// Norms of N(0, c^2 I) vectors projected onto a random r-dimensional
/// subspace of R^F; the sampling counterpart of chi_moments.
std::vector<double> gaussian_projection_samples(std::size_t feature_dim, std::size_t r, double c,
                                                std::size_t n_samples, RngStream& rng);

/// Fit one family to positive samples (exponential by maximum likelihood,
/// the rest by moment matching) and score it with a one-sample
/// Kolmogorov-Smirnov test. fixed_dof > 0 pins the chi degrees of freedom
/// instead of estimating them.
FitReport fit_error_distribution(const std::vector<double>& samples, DistFamily family,
                                 double fixed_dof = 0.0);

/// sup_i epsilon_i / ||C_i||: empirical stand-in for the modulus factor in
/// the rank-deficient error bound.
double modulus_estimate(const std::vector<double>& epsilons,
                        const std::vector<double>& target_norms);

/// Regularized lower incomplete gamma P(a, x).
double regularized_gamma_p(double a, double x);

/// Kolmogorov limit distribution tail Q(t) = 2 sum_j (-1)^{j-1} e^{-2 j^2 t^2}.
double kolmogorov_q(double t);

std::string to_string(DistFamily f);
DistFamily dist_family_from_string(const std::string& s);

} // namespace gplab

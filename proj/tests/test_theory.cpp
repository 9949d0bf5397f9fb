#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "gplab/theory.hpp"

using namespace gplab;

TEST_CASE("single_prompt_lower_bound closed-form cases") {
    // symmetric two-point case
    auto b1 = single_prompt_lower_bound({{1, 0}, {0, 1}}, {1, 1});
    CHECK(b1.p_star[0] == doctest::Approx(0.5));
    CHECK(b1.p_star[1] == doctest::Approx(0.5));
    CHECK(b1.j_min == doctest::Approx(1.0));
    CHECK(b1.rmse_bound == doctest::Approx(std::sqrt(0.5)));

    // weighted case
    auto b2 = single_prompt_lower_bound({{2, 0}, {0, 1}}, {2, 1});
    CHECK(b2.p_star[0] == doctest::Approx(0.8));
    CHECK(b2.p_star[1] == doctest::Approx(0.2));
    CHECK(b2.j_min == doctest::Approx(1.6));
    CHECK(b2.rmse_bound == doctest::Approx(std::sqrt(0.8)));

    // single point is met exactly
    auto b3 = single_prompt_lower_bound({{3, -1, 2}}, {2});
    CHECK(b3.p_star[0] == doctest::Approx(1.5));
    CHECK(b3.j_min == doctest::Approx(0.0).epsilon(1e-12));

    CHECK_THROWS(single_prompt_lower_bound({}, {}));
    CHECK_THROWS(single_prompt_lower_bound({{1, 0}}, {0.0}));
}

TEST_CASE("single_prompt_lower_bound is a global minimum") {
    RngStream rng(31, 0);
    std::vector<std::vector<double>> targets;
    std::vector<double> lambdas;
    for (int i = 0; i < 6; ++i) {
        std::vector<double> t(4);
        for (double& x : t) x = rng.normal();
        targets.push_back(t);
        lambdas.push_back(0.5 + rng.uniform());
    }
    auto b = single_prompt_lower_bound(targets, lambdas);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> p = b.p_star;
        for (double& x : p) x += 0.1 * rng.normal();
        double j = 0.0;
        for (std::size_t i = 0; i < targets.size(); ++i)
            for (std::size_t f = 0; f < 4; ++f) {
                double d = targets[i][f] - lambdas[i] * p[f];
                j += d * d;
            }
        CHECK(j >= b.j_min - 1e-9);
    }
}

TEST_CASE("multi_prompt_upper_bound closed-form cases") {
    std::vector<std::vector<double>> t = {{2, 0, 0}, {0, 1, 0}, {0, 0, 0}};
    auto b = multi_prompt_upper_bound(t, 1);
    CHECK(b.eigenvalues[0] == doctest::Approx(4.0));
    CHECK(b.eigenvalues[1] == doctest::Approx(1.0));
    CHECK(b.eigenvalues[2] == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(b.epsilon_star == doctest::Approx(std::sqrt(1.0 / 3.0)));

    // k = 0: trace identity
    auto b0 = multi_prompt_upper_bound(t, 0);
    CHECK(b0.epsilon_star == doctest::Approx(std::sqrt(5.0 / 3.0)));

    // k >= M: zero
    CHECK(multi_prompt_upper_bound(t, 3).epsilon_star == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(multi_prompt_upper_bound(t, 10).epsilon_star == doctest::Approx(0.0).epsilon(1e-9));

    // nonincreasing in k
    RngStream rng(32, 0);
    std::vector<std::vector<double>> rt;
    for (int i = 0; i < 7; ++i) {
        std::vector<double> v(5);
        for (double& x : v) x = rng.normal();
        rt.push_back(v);
    }
    double prev = 1e18;
    for (std::size_t k = 0; k <= 7; ++k) {
        double e = multi_prompt_upper_bound(rt, k).epsilon_star;
        CHECK(e <= prev + 1e-12);
        prev = e;
    }
}

TEST_CASE("subspace oracle agrees with the eigenvalue tail") {
    RngStream rng(33, 0);
    for (int inst = 0; inst < 10; ++inst) {
        std::size_t m = 4 + rng.uniform_int(9); // <= 12
        std::size_t f = 3 + rng.uniform_int(6); // <= 8
        std::vector<std::vector<double>> targets;
        for (std::size_t i = 0; i < m; ++i) {
            std::vector<double> t(f);
            for (double& x : t) x = rng.normal();
            targets.push_back(t);
        }
        std::size_t k = rng.uniform_int(f);
        double closed = 0.0;
        auto b = multi_prompt_upper_bound(targets, k);
        for (std::size_t i = k; i < b.eigenvalues.size(); ++i)
            closed += std::max(0.0, b.eigenvalues[i]);
        RngStream orng(33, 100 + inst);
        double oracle = subspace_residual_oracle(targets, k, 300, orng);
        CHECK(oracle >= closed - 1e-6); // cannot beat the optimum
        double denom = std::max(closed, 1e-9);
        if (closed > 1e-9) CHECK(std::fabs(oracle - closed) / denom < 1e-3);

        // trivial ends
        RngStream o2(33, 200 + inst);
        double total = 0.0;
        for (const auto& t : targets)
            for (double x : t) total += x * x;
        CHECK(subspace_residual_oracle(targets, 0, 10, o2) == doctest::Approx(total));
        CHECK(subspace_residual_oracle(targets, f, 10, o2) == doctest::Approx(0.0));
    }
}

TEST_CASE("chi moments match the known special cases") {
    double mean, var;
    chi_moments({1, 1.0}, mean, var);
    CHECK(mean == doctest::Approx(std::sqrt(2.0 / M_PI)).epsilon(1e-6));
    CHECK(var == doctest::Approx(1.0 - 2.0 / M_PI).epsilon(1e-6));
    chi_moments({2, 1.0}, mean, var);
    CHECK(mean == doctest::Approx(std::sqrt(M_PI / 2.0)).epsilon(1e-6));
    CHECK(var == doctest::Approx(2.0 - M_PI / 2.0).epsilon(1e-6));
    chi_moments({0, 1.0}, mean, var);
    CHECK(mean == 0.0);
    CHECK(var == 0.0);
    chi_moments({3, 2.0}, mean, var); // scale doubles the mean
    double m1, v1;
    chi_moments({3, 1.0}, m1, v1);
    CHECK(mean == doctest::Approx(2.0 * m1));
    CHECK(var == doctest::Approx(4.0 * v1));
}

TEST_CASE("gaussian projection samples track the chi moments") {
    RngStream rng(35, 0);
    auto zero = gaussian_projection_samples(6, 0, 1.0, 100, rng);
    for (double s : zero) CHECK(s == 0.0);

    auto samples = gaussian_projection_samples(12, 5, 1.0, 20000, rng);
    double mean = 0.0;
    for (double s : samples) mean += s;
    mean /= samples.size();
    double tmean, tvar;
    chi_moments({5, 1.0}, tmean, tvar);
    CHECK(std::fabs(mean - tmean) / tmean < 0.02);

    CHECK_THROWS(gaussian_projection_samples(4, 5, 1.0, 10, rng));
}

TEST_CASE("incomplete gamma and kolmogorov series") {
    // P(1, x) = 1 - e^-x
    for (double x : {0.1, 1.0, 3.0, 10.0})
        CHECK(regularized_gamma_p(1.0, x) == doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-10));
    // P(1/2, x) = erf(sqrt(x))
    for (double x : {0.2, 1.0, 4.0})
        CHECK(regularized_gamma_p(0.5, x) == doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-10));
    CHECK(regularized_gamma_p(2.5, 0.0) == 0.0);

    CHECK(kolmogorov_q(0.0) == doctest::Approx(1.0));
    CHECK(kolmogorov_q(5.0) < 1e-10);
    double prev = 1.0;
    for (double t = 0.1; t < 3.0; t += 0.1) {
        double q = kolmogorov_q(t);
        CHECK(q <= prev + 1e-15); // monotone decreasing
        prev = q;
    }
}

TEST_CASE("distribution fitting recovers known families") {
    RngStream rng(37, 0);
    // |N(0,1)| is chi with one degree of freedom
    std::vector<double> halfnormal;
    for (int i = 0; i < 2000; ++i) halfnormal.push_back(std::fabs(rng.normal()) + 1e-12);
    FitReport chi = fit_error_distribution(halfnormal, DistFamily::Chi);
    CHECK(chi.p_value > 0.05);
    CHECK(chi.params.at("dof") == doctest::Approx(1.0).epsilon(0.25));

    // exponential data: the exponential fit beats the chi-squared moment fit
    std::vector<double> expo;
    for (int i = 0; i < 2000; ++i) expo.push_back(-std::log(1.0 - rng.uniform()) + 1e-12);
    FitReport fe = fit_error_distribution(expo, DistFamily::Exponential);
    CHECK(fe.p_value > 0.01);
    CHECK(fe.params.at("rate") == doctest::Approx(1.0).epsilon(0.1));

    // fixed-dof mode pins the parameter
    FitReport fixed = fit_error_distribution(halfnormal, DistFamily::Chi, 1.0);
    CHECK(fixed.params.at("dof") == doctest::Approx(1.0));

    CHECK_THROWS(fit_error_distribution({1.0, 2.0}, DistFamily::Chi)); // too few
    std::vector<double> bad(50, 1.0);
    bad[10] = -1.0;
    CHECK_THROWS(fit_error_distribution(bad, DistFamily::Chi));
}

TEST_CASE("modulus estimate") {
    CHECK(modulus_estimate({0.0, 0.0}, {1.0, 2.0}) == 0.0);
    CHECK(modulus_estimate({1.0, 2.0}, {2.0, 10.0}) == doctest::Approx(0.5));
    CHECK(modulus_estimate({2.0, 4.0}, {4.0, 20.0}) == doctest::Approx(0.5)); // scale invariant
    CHECK_THROWS(modulus_estimate({1.0}, {0.0}));
    CHECK_THROWS(modulus_estimate({1.0}, {1.0, 2.0}));
}

TEST_CASE("reports serialize") {
    BoundReport b;
    b.bound_kind = "multi_upper";
    b.theoretical_value = 2.0;
    b.empirical_value = 1.5;
    b.ratio = 0.75;
    CHECK(b.to_json().find("multi_upper") != std::string::npos);
    FitReport f;
    f.params["dof"] = 3.0;
    CHECK(f.to_json().find("\"dof\":3.0") != std::string::npos);
    CHECK(to_string(dist_family_from_string("chi_squared")) == "chi_squared");
    CHECK_THROWS(dist_family_from_string("nope"));
}

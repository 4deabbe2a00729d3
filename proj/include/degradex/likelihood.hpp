#pragma once

// Exact multivariate-normal log-likelihood of degradation panels. Each
// unit's readings are jointly normal with mean mu_Y0 + mu_a*e(s)*t^beta and
// covariance
//   Sigma_uv = sigma_Y0^2 + sigma_a^2 e(s)^2 t_u^b t_v^b
//              + sigma^2 min(t_u, t_v) + delta_uv sigma_eps^2.
// Evaluation goes through a dense Cholesky factorization; non-PD points are
// mapped to a large negative penalty so a derivative-free optimizer can
// probe the whole box without exception plumbing.

#include <cmath>
#include <cstddef>
#include <vector>

#include "degradex/core.hpp"
#include "degradex/parallel.hpp"
#include "degradex/types.hpp"

namespace degradex {

inline constexpr double penalty_loglik = -1e300;

// Symmetric covariance matrix, row-major.
struct CovarianceMatrix {
    std::size_t dim = 0;
    std::vector<double> entries;

    double& at(std::size_t u, std::size_t v) { return entries[u * dim + v]; }
    double at(std::size_t u, std::size_t v) const { return entries[u * dim + v]; }
};

inline CovarianceMatrix covariance_matrix(const ModelParams& p, const ModelVariant& variant,
                                          const StressVector& stress,
                                          const StressNormalization& norm,
                                          const std::vector<double>& times) {
    double e = rate(p, variant, stress, norm);
    std::size_t m = times.size();
    std::vector<double> tb(m);
    for (std::size_t j = 0; j < m; ++j) tb[j] = std::pow(times[j], p.beta);

    CovarianceMatrix cov;
    cov.dim = m;
    cov.entries.resize(m * m);
    double sy2 = p.sigma_y0 * p.sigma_y0;
    double sa2e2 = p.sigma_a * p.sigma_a * e * e;
    double sb2 = p.sigma_bm * p.sigma_bm;
    double se2 = p.sigma_eps * p.sigma_eps;
    for (std::size_t u = 0; u < m; ++u) {
        for (std::size_t v = 0; v <= u; ++v) {
            double s = sy2 + sa2e2 * tb[u] * tb[v] + sb2 * times[v];  // v <= u so min = t_v
            if (u == v) s += se2;
            cov.at(u, v) = s;
            cov.at(v, u) = s;
        }
    }
    return cov;
}

namespace detail {

// In-place lower Cholesky. Returns false if the matrix is not (numerically)
// positive definite.
inline bool cholesky_in_place(std::vector<double>& a, std::size_t m) {
    for (std::size_t j = 0; j < m; ++j) {
        double d = a[j * m + j];
        for (std::size_t k = 0; k < j; ++k) d -= a[j * m + k] * a[j * m + k];
        if (!(d > 0.0)) return false;
        double l = std::sqrt(d);
        a[j * m + j] = l;
        for (std::size_t i = j + 1; i < m; ++i) {
            double s = a[i * m + j];
            for (std::size_t k = 0; k < j; ++k) s -= a[i * m + k] * a[j * m + k];
            a[i * m + j] = s / l;
        }
    }
    return true;
}

// Factors Sigma, retrying once with a trace-scaled diagonal jitter.
inline bool factor_with_jitter(CovarianceMatrix& cov) {
    std::vector<double> saved = cov.entries;
    if (cholesky_in_place(cov.entries, cov.dim)) return true;
    double trace = 0.0;
    for (std::size_t j = 0; j < cov.dim; ++j) trace += saved[j * cov.dim + j];
    double jitter = 1e-10 * trace / static_cast<double>(cov.dim);
    cov.entries = saved;
    for (std::size_t j = 0; j < cov.dim; ++j) cov.entries[j * cov.dim + j] += jitter;
    return cholesky_in_place(cov.entries, cov.dim);
}

// Log-likelihood of one residual vector given the factored covariance.
inline double loglik_from_factor(const std::vector<double>& chol, std::size_t m,
                                 std::vector<double>& resid) {
    // forward solve L z = r (in place)
    for (std::size_t i = 0; i < m; ++i) {
        double s = resid[i];
        for (std::size_t k = 0; k < i; ++k) s -= chol[i * m + k] * resid[k];
        resid[i] = s / chol[i * m + i];
    }
    double quad = 0.0;
    double logdet = 0.0;
    for (std::size_t i = 0; i < m; ++i) {
        quad += resid[i] * resid[i];
        logdet += 2.0 * std::log(chol[i * m + i]);
    }
    constexpr double ln_2pi = 1.8378770664093453;
    return -0.5 * (static_cast<double>(m) * ln_2pi + logdet + quad);
}

}  // namespace detail

// Log-likelihood of one unit's measurement series.
inline double unit_loglik(const ModelParams& p, const ModelVariant& variant,
                          const StressVector& stress, const StressNormalization& norm,
                          const std::vector<double>& times, const std::vector<double>& values) {
    if (times.empty() || times.size() != values.size())
        throw input_error("unit_loglik: times and values must be non-empty and equal length");
    if (!p.valid()) return penalty_loglik;

    CovarianceMatrix cov = covariance_matrix(p, variant, stress, norm, times);
    if (!detail::factor_with_jitter(cov)) return penalty_loglik;

    double e = rate(p, variant, stress, norm);
    std::size_t m = times.size();
    std::vector<double> resid(m);
    for (std::size_t j = 0; j < m; ++j)
        resid[j] = values[j] - p.mu_y0 - p.mu_a * e * std::pow(times[j], p.beta);
    return detail::loglik_from_factor(cov.entries, m, resid);
}

// Log-likelihood of the whole panel: sum over levels and units. Units that
// share a measurement grid within a level share one factorization. Per-unit
// terms are accumulated by pairwise summation in a fixed order, so the
// result is bit-stable.
inline double total_loglik(const ModelParams& p, const ModelVariant& variant,
                           const DegradationDataset& data, const StressNormalization& norm) {
    if (data.levels.empty()) throw input_error("total_loglik: empty dataset");
    if (!p.valid()) return penalty_loglik;

    std::vector<double> terms;
    terms.reserve(64);
    for (const auto& level : data.levels) {
        double e = rate(p, variant, level.stress, norm);
        // index of the first unit sharing each distinct grid
        std::vector<std::size_t> grid_of(level.units.size());
        std::vector<std::size_t> distinct;
        for (std::size_t i = 0; i < level.units.size(); ++i) {
            grid_of[i] = distinct.size();
            for (std::size_t d = 0; d < distinct.size(); ++d) {
                if (level.units[distinct[d]].times == level.units[i].times) {
                    grid_of[i] = d;
                    break;
                }
            }
            if (grid_of[i] == distinct.size()) distinct.push_back(i);
        }

        std::vector<CovarianceMatrix> factors(distinct.size());
        std::vector<std::vector<double>> means(distinct.size());
        for (std::size_t d = 0; d < distinct.size(); ++d) {
            const auto& times = level.units[distinct[d]].times;
            factors[d] = covariance_matrix(p, variant, level.stress, norm, times);
            if (!detail::factor_with_jitter(factors[d])) return penalty_loglik;
            means[d].resize(times.size());
            for (std::size_t j = 0; j < times.size(); ++j)
                means[d][j] = p.mu_y0 + p.mu_a * e * std::pow(times[j], p.beta);
        }

        for (std::size_t i = 0; i < level.units.size(); ++i) {
            const auto& u = level.units[i];
            std::size_t d = grid_of[i];
            std::vector<double> resid(u.values.size());
            for (std::size_t j = 0; j < resid.size(); ++j) resid[j] = u.values[j] - means[d][j];
            terms.push_back(
                detail::loglik_from_factor(factors[d].entries, resid.size(), resid));
        }
    }
    return pairwise_sum(terms);
}

}  // namespace degradex

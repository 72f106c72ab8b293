#pragma once

#include <optional>
#include <string>
#include <vector>

namespace peck {

// One proportion observation. Bins are the within-subject fixed effect;
// the chick identifier names the random-intercept group.
struct Observation {
  std::string chick_id;
  int bin = 1;
  double y = 0.0;
};

struct ModelData {
  std::vector<Observation> obs;
  double chance = 0.5;

  std::size_t n_obs() const { return obs.size(); }
};

// Model parameters on the unconstrained scale. beta is the fixed-effect
// vector (intercept for the reference bin, then one treatment contrast per
// remaining bin in ascending bin order).
struct BetaMixedParams {
  std::vector<double> beta;
  double log_phi = 0.0;
  double log_sigma = 0.0;
};

struct ModelFit {
  std::vector<double> beta;
  std::vector<int> bins;  // distinct bins ascending; bins[0] is the reference
  double log_phi = 0.0;
  double log_sigma = 0.0;
  std::vector<std::vector<double>> vcov;  // fixed-effect covariance, p x p
  bool vcov_ok = false;
  double loglik = 0.0;
  double aic = 0.0;
  bool converged = false;
  double grad_max_norm = 0.0;
  int n_quad = 15;
  long n_obs = 0;
  long n_chicks = 0;
  long clamp_events = 0;  // times mu had to be clamped away from {0,1}
  int n_starts = 0;
  int best_start = -1;
  int iterations = 0;
};

struct WaldResult {
  double chi2 = 0.0;
  int df = 0;
  double p = 1.0;
};

struct BinEmm {
  int bin = 0;
  double eta = 0.0;      // link scale
  double se_eta = 0.0;
  double mean = 0.0;     // response scale
  double se_mean = 0.0;  // delta method
  double z_vs_chance = 0.0;
  double p_vs_chance = 1.0;
};

struct EmmResult {
  std::vector<BinEmm> bins;
  double overall_eta = 0.0;
  double overall_se_eta = 0.0;
  double overall_mean = 0.0;
  double overall_se_mean = 0.0;
  double z_vs_chance = 0.0;
  double p_vs_chance = 1.0;
  double chance = 0.5;
  bool response_scale_average = false;
};

// Smithson-Verkuilen squeeze y' = (y (n-1) + 0.5) / n, mapping [0,1] into
// (0,1). n is the number of observations entering the model. Requires n >= 2.
double sv_transform(double y, long n);
double sv_inverse(double y_prime, long n);

// Apply sv_transform to every observation with n = data.n_obs().
ModelData sv_transform_data(const ModelData& data);

// Adaptive Gauss-Hermite approximation of the marginal log-likelihood: the
// per-chick random intercept is integrated out of the product of Beta
// densities, with the quadrature centered and scaled at each chick's
// conditional mode. n_quad must be odd; n_quad = 1 is the Laplace
// approximation. Requires all y strictly inside (0,1).
double marginal_loglik(const BetaMixedParams& params, const ModelData& data, int n_quad);

struct FitOptions {
  int n_quad = 15;
  int n_starts = 5;  // moment-based start plus deterministic perturbations
  int max_iter = 500;
  double grad_tol = 1e-6;
  double f_rel_tol = 1e-10;
};

// Maximum-likelihood fit by quasi-Newton ascent with central-difference
// gradients and multiple deterministic starts. Requires >= 2 chicks, >= 2
// distinct bins, and SV-transformed responses. Never throws on
// non-convergence: the flag reports it and partial results are returned.
ModelFit fit_beta_mixed(const ModelData& data, const FitOptions& opts = {});

// Type III Wald chi-squared test that all bin contrasts are zero.
WaldResult wald_type3(const ModelFit& fit);

// Estimated marginal means per bin and overall (averaged on the link scale by
// default), back-transformed to the response scale, with z tests against the
// chance level on the link scale.
EmmResult emmeans_vs_chance(const ModelFit& fit, double chance,
                            bool response_scale_average = false);

}  // namespace peck

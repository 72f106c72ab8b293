#include "peck/betamm.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <stdexcept>

#include "peck/errors.hpp"
#include "peck/gauss_hermite.hpp"
#include "peck/optim.hpp"
#include "peck/special.hpp"

namespace peck {

double sv_transform(double y, long n) {
  if (n < 2) throw std::invalid_argument("sv_transform: n must be >= 2");
  if (y < 0.0 || y > 1.0) throw std::invalid_argument("sv_transform: y must be in [0,1]");
  return (y * static_cast<double>(n - 1) + 0.5) / static_cast<double>(n);
}

double sv_inverse(double y_prime, long n) {
  if (n < 2) throw std::invalid_argument("sv_inverse: n must be >= 2");
  return (y_prime * static_cast<double>(n) - 0.5) / static_cast<double>(n - 1);
}

ModelData sv_transform_data(const ModelData& data) {
  ModelData out = data;
  const long n = static_cast<long>(data.obs.size());
  for (Observation& o : out.obs) o.y = sv_transform(o.y, n);
  return out;
}

namespace {

constexpr double kMuEps = 1e-12;
constexpr double kSigmaFloor = 1e-8;
const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

struct GroupedData {
  std::vector<std::string> chick_ids;  // first-appearance order
  std::vector<int> bins;               // distinct bins ascending; bins[0] = reference
  int p = 0;                           // fixed-effect count
  std::vector<int> chick_start;        // m+1 offsets into the obs arrays
  std::vector<int> design_col;         // 0 for reference bin, else contrast column
  std::vector<double> y;
  std::vector<double> ystar;           // logit(y)
};

GroupedData group_data(const ModelData& data) {
  if (data.obs.empty()) throw DataError("model data is empty");
  GroupedData g;
  std::set<int> bin_set;
  std::map<std::string, std::vector<std::size_t>> by_chick;
  std::vector<std::string> order;
  std::set<std::pair<std::string, int>> seen;
  for (std::size_t i = 0; i < data.obs.size(); ++i) {
    const Observation& o = data.obs[i];
    if (!(o.y > 0.0 && o.y < 1.0)) {
      throw std::invalid_argument("fit/marginal_loglik: responses must be SV-transformed "
                                  "(strictly inside (0,1))");
    }
    if (!seen.insert({o.chick_id, o.bin}).second) {
      throw DataError("duplicate (chick, bin) observation: " + o.chick_id);
    }
    bin_set.insert(o.bin);
    auto [it, inserted] = by_chick.try_emplace(o.chick_id);
    if (inserted) order.push_back(o.chick_id);
    it->second.push_back(i);
  }
  g.bins.assign(bin_set.begin(), bin_set.end());
  g.p = static_cast<int>(g.bins.size());
  g.chick_ids = order;
  g.chick_start.push_back(0);
  for (const std::string& id : order) {
    for (std::size_t i : by_chick[id]) {
      const Observation& o = data.obs[i];
      const int bin_pos = static_cast<int>(
          std::lower_bound(g.bins.begin(), g.bins.end(), o.bin) - g.bins.begin());
      g.design_col.push_back(bin_pos);  // 0 means intercept only
      g.y.push_back(o.y);
      g.ystar.push_back(std::log(o.y / (1.0 - o.y)));
    }
    g.chick_start.push_back(static_cast<int>(g.y.size()));
  }
  return g;
}

// Beta log-density and its first two derivatives with respect to the linear
// predictor, all at mu = inv_logit(eta) clamped away from {0,1}.
struct BetaDensityTerms {
  double logf = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

class Evaluator {
 public:
  Evaluator(const ModelData& data, int n_quad)
      : g_(group_data(data)), rule_(gauss_hermite(n_quad)), n_quad_(n_quad) {
    mode_cache_.assign(g_.chick_ids.size(), 0.0);
    eta_fixed_.assign(g_.y.size(), 0.0);
    for (std::size_t k = 0; k < rule_.nodes.size(); ++k) {
      log_w_plus_z2_.push_back(std::log(rule_.weights[k]) +
                               rule_.nodes[k] * rule_.nodes[k]);
    }
  }

  const GroupedData& grouped() const { return g_; }
  long last_clamp_events() const { return clamp_events_; }

  double loglik(const BetaMixedParams& params) {
    const int p = g_.p;
    if (static_cast<int>(params.beta.size()) != p) {
      throw std::invalid_argument("beta has the wrong length for the bin structure");
    }
    clamp_events_ = 0;
    const double phi = std::exp(params.log_phi);
    const double sigma = std::max(std::exp(params.log_sigma), kSigmaFloor);
    lgamma_phi_ = std::lgamma(phi);

    for (std::size_t j = 0; j < g_.y.size(); ++j) {
      const int c = g_.design_col[j];
      eta_fixed_[j] = params.beta[0] + (c > 0 ? params.beta[c] : 0.0);
    }

    // Kahan summation keeps the total independent of tiny rounding drift.
    double total = 0.0, comp = 0.0;
    const int m = static_cast<int>(g_.chick_ids.size());
    for (int i = 0; i < m; ++i) {
      const double li = chick_loglik(i, phi, sigma);
      const double yk = li - comp;
      const double tk = total + yk;
      comp = (tk - total) - yk;
      total = tk;
    }
    return total;
  }

 private:
  double clamp_mu(double mu) {
    if (mu < kMuEps) {
      ++clamp_events_;
      return kMuEps;
    }
    if (mu > 1.0 - kMuEps) {
      ++clamp_events_;
      return 1.0 - kMuEps;
    }
    return mu;
  }

  double beta_logf(double y, double mu, double phi) const {
    const double a = mu * phi;
    const double b = (1.0 - mu) * phi;
    return lgamma_phi_ - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(y) +
           (b - 1.0) * std::log1p(-y);
  }

  BetaDensityTerms beta_terms(double ystar, double y, double mu, double phi) const {
    BetaDensityTerms t;
    const double a = mu * phi;
    const double b = (1.0 - mu) * phi;
    const double s = mu * (1.0 - mu);
    const double mustar = digamma(a) - digamma(b);
    t.logf = lgamma_phi_ - std::lgamma(a) - std::lgamma(b) + (a - 1.0) * std::log(y) +
             (b - 1.0) * std::log1p(-y);
    t.d1 = phi * s * (ystar - mustar);
    t.d2 = phi * s * ((1.0 - 2.0 * mu) * (ystar - mustar) -
                      phi * s * (trigamma(a) + trigamma(b)));
    return t;
  }

  // Joint log-density of one chick's observations and its random intercept u.
  double joint_logdens(int i, double u, double phi, double sigma) {
    double val = -kLogSqrt2Pi - std::log(sigma) - 0.5 * (u / sigma) * (u / sigma);
    for (int j = g_.chick_start[i]; j < g_.chick_start[i + 1]; ++j) {
      const double mu = clamp_mu(inv_logit(eta_fixed_[j] + u));
      val += beta_logf(g_.y[j], mu, phi);
    }
    return val;
  }

  // First and second u-derivatives of joint_logdens.
  void joint_derivs(int i, double u, double phi, double sigma, double& d1, double& d2) {
    d1 = -u / (sigma * sigma);
    d2 = -1.0 / (sigma * sigma);
    for (int j = g_.chick_start[i]; j < g_.chick_start[i + 1]; ++j) {
      const double mu = clamp_mu(inv_logit(eta_fixed_[j] + u));
      const BetaDensityTerms t = beta_terms(g_.ystar[j], g_.y[j], mu, phi);
      d1 += t.d1;
      d2 += t.d2;
    }
  }

  // Safeguarded Newton/bisection for the conditional mode of chick i.
  double find_mode(int i, double phi, double sigma) {
    double gp, gpp;
    double u = mode_cache_[i];
    joint_derivs(i, u, phi, sigma, gp, gpp);

    // Bracket a sign change of the derivative around the current point.
    double step = std::max(sigma, 0.25);
    double lo = u, hi = u, gp_lo = gp, gp_hi = gp;
    for (int k = 0; k < 200 && gp_lo <= 0.0; ++k) {
      lo -= step;
      step *= 2.0;
      joint_derivs(i, lo, phi, sigma, gp_lo, gpp);
    }
    step = std::max(sigma, 0.25);
    for (int k = 0; k < 200 && gp_hi >= 0.0; ++k) {
      hi += step;
      step *= 2.0;
      joint_derivs(i, hi, phi, sigma, gp_hi, gpp);
    }
    if (!(gp_lo > 0.0 && gp_hi < 0.0)) {
      throw std::runtime_error("marginal_loglik: mode-finding failure");
    }

    u = std::clamp(u, lo, hi);
    for (int it = 0; it < 200; ++it) {
      joint_derivs(i, u, phi, sigma, gp, gpp);
      if (std::fabs(gp) < 1e-8) break;
      if (gp > 0.0) lo = u; else hi = u;
      double u_new = (gpp < 0.0) ? u - gp / gpp : 0.5 * (lo + hi);
      if (!(u_new > lo && u_new < hi)) u_new = 0.5 * (lo + hi);
      if (std::fabs(u_new - u) < 1e-13 * (1.0 + std::fabs(u))) {
        u = u_new;
        break;
      }
      u = u_new;
    }
    mode_cache_[i] = u;
    return u;
  }

  double chick_loglik(int i, double phi, double sigma) {
    const double mode = find_mode(i, phi, sigma);
    double gp, gpp;
    joint_derivs(i, mode, phi, sigma, gp, gpp);
    const double curvature = (gpp < 0.0) ? -gpp : 1.0 / (sigma * sigma);
    const double scale = 1.0 / std::sqrt(curvature);

    // AGHQ: integral exp(g(u)) du ~= sqrt(2)*scale * sum w_k exp(z_k^2) g(u_k)
    // evaluated in log space.
    const std::size_t nq = rule_.nodes.size();
    double max_term = -std::numeric_limits<double>::infinity();
    term_buf_.resize(nq);
    for (std::size_t k = 0; k < nq; ++k) {
      const double u = mode + std::numbers::sqrt2 * scale * rule_.nodes[k];
      const double t = log_w_plus_z2_[k] + joint_logdens(i, u, phi, sigma);
      term_buf_[k] = t;
      max_term = std::max(max_term, t);
    }
    double acc = 0.0;
    for (std::size_t k = 0; k < nq; ++k) acc += std::exp(term_buf_[k] - max_term);
    return 0.5 * std::log(2.0) + std::log(scale) + max_term + std::log(acc);
  }

  GroupedData g_;
  GaussHermiteRule rule_;
  int n_quad_;
  std::vector<double> log_w_plus_z2_;
  std::vector<double> mode_cache_;
  std::vector<double> eta_fixed_;
  std::vector<double> term_buf_;
  double lgamma_phi_ = 0.0;
  long clamp_events_ = 0;
};

void check_n_quad(int n_quad) {
  if (n_quad < 1 || n_quad % 2 == 0) {
    throw std::invalid_argument("n_quad must be odd and >= 1");
  }
}

std::vector<double> pack(const BetaMixedParams& params) {
  std::vector<double> theta = params.beta;
  theta.push_back(params.log_phi);
  theta.push_back(params.log_sigma);
  return theta;
}

BetaMixedParams unpack(const std::vector<double>& theta, int p) {
  BetaMixedParams params;
  params.beta.assign(theta.begin(), theta.begin() + p);
  params.log_phi = theta[p];
  params.log_sigma = theta[p + 1];
  return params;
}

// Moment-based start: bin means on the logit scale, method-of-moments
// precision, between-chick spread of mean logits.
BetaMixedParams moment_start(const GroupedData& g) {
  const int p = g.p;
  std::vector<double> bin_sum(p, 0.0);
  std::vector<long> bin_n(p, 0);
  for (std::size_t j = 0; j < g.y.size(); ++j) {
    bin_sum[g.design_col[j]] += g.y[j];
    ++bin_n[g.design_col[j]];
  }
  auto safe_logit = [](double v) { return logit(std::clamp(v, 0.02, 0.98)); };
  std::vector<double> bin_mean(p, 0.5);
  for (int c = 0; c < p; ++c) {
    if (bin_n[c] > 0) bin_mean[c] = bin_sum[c] / static_cast<double>(bin_n[c]);
  }
  BetaMixedParams start;
  start.beta.resize(p);
  start.beta[0] = safe_logit(bin_mean[0]);
  for (int c = 1; c < p; ++c) start.beta[c] = safe_logit(bin_mean[c]) - start.beta[0];

  double ss = 0.0, sv = 0.0;
  for (std::size_t j = 0; j < g.y.size(); ++j) {
    const double mu = std::clamp(bin_mean[g.design_col[j]], 0.02, 0.98);
    ss += (g.y[j] - mu) * (g.y[j] - mu);
    sv += mu * (1.0 - mu);
  }
  const double n = static_cast<double>(g.y.size());
  const double resid_var = std::max(ss / n, 1e-6);
  const double phi = std::clamp(sv / n / resid_var - 1.0, 2.0, 500.0);
  start.log_phi = std::log(phi);

  // Spread of per-chick mean residual logits.
  const int m = static_cast<int>(g.chick_ids.size());
  std::vector<double> chick_dev(m, 0.0);
  for (int i = 0; i < m; ++i) {
    double acc = 0.0;
    int cnt = 0;
    for (int j = g.chick_start[i]; j < g.chick_start[i + 1]; ++j) {
      acc += safe_logit(g.y[j]) - safe_logit(bin_mean[g.design_col[j]]);
      ++cnt;
    }
    chick_dev[i] = cnt > 0 ? acc / cnt : 0.0;
  }
  double mean_dev = 0.0;
  for (double d : chick_dev) mean_dev += d;
  mean_dev /= m;
  double var_dev = 0.0;
  for (double d : chick_dev) var_dev += (d - mean_dev) * (d - mean_dev);
  var_dev /= std::max(m - 1, 1);
  start.log_sigma = std::log(std::clamp(std::sqrt(var_dev), 0.05, 3.0));
  return start;
}

std::vector<BetaMixedParams> make_starts(const BetaMixedParams& base, int n_starts) {
  std::vector<BetaMixedParams> starts{base};
  // Deterministic perturbation table.
  const struct {
    double d_beta0, beta_scale, d_log_phi, d_log_sigma;
  } table[] = {
      {0.0, 1.0, 0.0, 0.7},
      {0.0, 1.0, 0.7, -0.7},
      {0.3, 1.0, -0.7, 0.0},
      {0.0, 0.5, -0.3, 0.3},
  };
  for (int k = 0; k < n_starts - 1 && k < 4; ++k) {
    BetaMixedParams s = base;
    for (double& b : s.beta) b *= table[k].beta_scale;
    s.beta[0] += table[k].d_beta0;
    s.log_phi += table[k].d_log_phi;
    s.log_sigma += table[k].d_log_sigma;
    starts.push_back(std::move(s));
  }
  return starts;
}

Eigen::MatrixXd central_difference_hessian(const ObjectiveFn& f, const std::vector<double>& x) {
  const int n = static_cast<int>(x.size());
  Eigen::MatrixXd hess(n, n);
  std::vector<double> xp = x;
  const double f0 = f(x);
  std::vector<double> h(n);
  for (int i = 0; i < n; ++i) h[i] = 5e-3 * std::max(1.0, std::fabs(x[i]));
  for (int i = 0; i < n; ++i) {
    xp[i] = x[i] + h[i];
    const double fp = f(xp);
    xp[i] = x[i] - h[i];
    const double fm = f(xp);
    xp[i] = x[i];
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h[i] * h[i]);
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      xp[i] = x[i] + h[i];
      xp[j] = x[j] + h[j];
      const double fpp = f(xp);
      xp[j] = x[j] - h[j];
      const double fpm = f(xp);
      xp[i] = x[i] - h[i];
      const double fmm = f(xp);
      xp[j] = x[j] + h[j];
      const double fmp = f(xp);
      xp[i] = x[i];
      xp[j] = x[j];
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h[i] * h[j]);
    }
  }
  return hess;
}

}  // namespace

double marginal_loglik(const BetaMixedParams& params, const ModelData& data, int n_quad) {
  check_n_quad(n_quad);
  Evaluator eval(data, n_quad);
  return eval.loglik(params);
}

ModelFit fit_beta_mixed(const ModelData& data, const FitOptions& opts) {
  check_n_quad(opts.n_quad);
  Evaluator eval(data, opts.n_quad);
  const GroupedData& g = eval.grouped();
  if (g.chick_ids.size() < 2) throw DataError("fit_beta_mixed: need at least 2 chicks");
  if (g.p < 2) throw DataError("fit_beta_mixed: need at least 2 distinct bins");

  const int p = g.p;
  ObjectiveFn objective = [&eval, p](const std::vector<double>& theta) {
    const double ll = eval.loglik(unpack(theta, p));
    return std::isfinite(ll) ? -ll : 1e12;
  };

  OptimOptions oopts;
  oopts.max_iter = opts.max_iter;
  oopts.grad_tol = opts.grad_tol;
  oopts.f_rel_tol = opts.f_rel_tol;

  const auto starts = make_starts(moment_start(g), opts.n_starts);
  OptimResult best;
  int best_start = -1;
  int total_iterations = 0;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    const OptimResult r = bfgs_minimize(objective, pack(starts[s]), oopts);
    total_iterations += r.iterations;
    if (best_start < 0 || r.f < best.f) {
      best = r;
      best_start = static_cast<int>(s);
    }
  }

  ModelFit fit;
  fit.bins = g.bins;
  const BetaMixedParams est = unpack(best.x, p);
  fit.beta = est.beta;
  fit.log_phi = est.log_phi;
  fit.log_sigma = est.log_sigma;
  fit.loglik = eval.loglik(est);
  fit.clamp_events = eval.last_clamp_events();
  fit.aic = 2.0 * (p + 2) - 2.0 * fit.loglik;
  fit.converged = best.converged;
  fit.n_quad = opts.n_quad;
  fit.n_obs = static_cast<long>(g.y.size());
  fit.n_chicks = static_cast<long>(g.chick_ids.size());
  fit.n_starts = static_cast<int>(starts.size());
  fit.best_start = best_start;
  fit.iterations = total_iterations;

  const std::vector<double> grad = central_difference_gradient(objective, best.x, 1e-6);
  fit.grad_max_norm = 0.0;
  for (double gv : grad) fit.grad_max_norm = std::max(fit.grad_max_norm, std::fabs(gv));

  // Observed-information covariance: invert the full-parameter Hessian of the
  // negative log-likelihood, then keep the fixed-effect block.
  const Eigen::MatrixXd hess = central_difference_hessian(objective, best.x);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(hess);
  if (lu.isInvertible()) {
    const Eigen::MatrixXd cov = lu.inverse();
    bool ok = true;
    for (int i = 0; i < p; ++i) {
      if (!std::isfinite(cov(i, i)) || cov(i, i) <= 0.0) ok = false;
    }
    if (ok) {
      fit.vcov.assign(p, std::vector<double>(p, 0.0));
      for (int i = 0; i < p; ++i) {
        for (int j = 0; j < p; ++j) fit.vcov[i][j] = cov(i, j);
      }
      fit.vcov_ok = true;
    }
  }
  return fit;
}

WaldResult wald_type3(const ModelFit& fit) {
  if (!fit.vcov_ok) throw DataError("wald_type3: covariance unavailable");
  const int p = static_cast<int>(fit.beta.size());
  WaldResult res;
  res.df = p - 1;
  if (res.df == 0) {
    res.chi2 = 0.0;
    res.p = 1.0;
    return res;
  }
  Eigen::VectorXd c(res.df);
  Eigen::MatrixXd v(res.df, res.df);
  for (int i = 0; i < res.df; ++i) {
    c(i) = fit.beta[i + 1];
    for (int j = 0; j < res.df; ++j) v(i, j) = fit.vcov[i + 1][j + 1];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(v);
  if (!lu.isInvertible()) throw DataError("wald_type3: singular contrast covariance");
  res.chi2 = c.dot(lu.solve(c));
  if (res.chi2 < 0.0) res.chi2 = 0.0;
  res.p = chi2_sf(res.chi2, res.df);
  return res;
}

EmmResult emmeans_vs_chance(const ModelFit& fit, double chance, bool response_scale_average) {
  if (!fit.vcov_ok) throw DataError("emmeans_vs_chance: covariance unavailable");
  if (!(chance > 0.0 && chance < 1.0)) {
    throw std::invalid_argument("emmeans_vs_chance: chance must be in (0,1)");
  }
  const int p = static_cast<int>(fit.beta.size());
  Eigen::Map<const Eigen::VectorXd> beta(fit.beta.data(), p);
  Eigen::MatrixXd v(p, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j < p; ++j) v(i, j) = fit.vcov[i][j];
  }
  const double eta_chance = logit(chance);

  EmmResult res;
  res.chance = chance;
  res.response_scale_average = response_scale_average;

  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(p, p);  // one EMM row per bin
  for (int b = 0; b < p; ++b) {
    rows(b, 0) = 1.0;
    if (b > 0) rows(b, b) = 1.0;
  }
  const auto quad_form = [&v](const Eigen::VectorXd& r) { return r.dot(v * r); };
  for (int b = 0; b < p; ++b) {
    BinEmm bin;
    bin.bin = fit.bins[b];
    const Eigen::VectorXd row = rows.row(b).transpose();
    bin.eta = row.dot(beta);
    bin.se_eta = std::sqrt(quad_form(row));
    bin.mean = inv_logit(bin.eta);
    bin.se_mean = bin.mean * (1.0 - bin.mean) * bin.se_eta;
    bin.z_vs_chance = (bin.eta - eta_chance) / bin.se_eta;
    bin.p_vs_chance = normal_two_sided_p(bin.z_vs_chance);
    res.bins.push_back(bin);
  }

  if (!response_scale_average) {
    const Eigen::VectorXd avg = rows.colwise().mean().transpose();
    res.overall_eta = avg.dot(beta);
    res.overall_se_eta = std::sqrt(quad_form(avg));
    res.overall_mean = inv_logit(res.overall_eta);
    res.overall_se_mean = res.overall_mean * (1.0 - res.overall_mean) * res.overall_se_eta;
    res.z_vs_chance = (res.overall_eta - eta_chance) / res.overall_se_eta;
  } else {
    // Sensitivity option: average the back-transformed bin means; the z test
    // then compares on the response scale with a delta-method SE.
    double mean = 0.0;
    Eigen::VectorXd grad_vec = Eigen::VectorXd::Zero(p);
    for (int b = 0; b < p; ++b) {
      const double mu = res.bins[b].mean;
      mean += mu / p;
      grad_vec += (mu * (1.0 - mu) / p) * rows.row(b).transpose();
    }
    res.overall_mean = mean;
    res.overall_se_mean = std::sqrt(grad_vec.dot(v * grad_vec));
    res.overall_eta = logit(std::clamp(mean, 1e-12, 1.0 - 1e-12));
    res.overall_se_eta = res.overall_se_mean / std::max(mean * (1.0 - mean), 1e-12);
    res.z_vs_chance = (res.overall_mean - chance) / res.overall_se_mean;
  }
  res.p_vs_chance = normal_two_sided_p(res.z_vs_chance);
  return res;
}

}  // namespace peck

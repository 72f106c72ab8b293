#pragma once

// Scalar special functions used by the Beta mixed-model machinery.
// All functions are pure and finite for the argument ranges documented.

namespace peck {

// log(p / (1-p)) for p in (0,1).
double logit(double p);

// Numerically stable inverse logit; maps R -> (0,1).
double inv_logit(double eta);

// Digamma psi(x), x > 0. Recurrence below 6, asymptotic series above.
double digamma(double x);

// Trigamma psi'(x), x > 0.
double trigamma(double x);

// log Beta function, a > 0, b > 0.
double log_beta(double a, double b);

// Beta log-density in mean/precision form: y ~ Beta(mu*phi, (1-mu)*phi),
// y in (0,1), mu in (0,1), phi > 0.
double log_beta_pdf(double y, double mu, double phi);

// Regularized lower incomplete gamma P(a,x), a > 0, x >= 0.
double gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a,x) = 1 - P(a,x).
double gamma_q(double a, double x);

// Upper tail of the chi-squared distribution with df degrees of freedom.
double chi2_sf(double x, int df);

// Upper tail of the standard normal.
double normal_sf(double z);

// Two-sided normal p-value of a z statistic.
double normal_two_sided_p(double z);

}  // namespace peck

#pragma once

namespace mnstm {

// log(1 + exp(x)) without overflow for large |x|.
double log1p_exp(double x);

// logistic function 1/(1+exp(-x)), saturating safely at the tails.
double sigmoid(double x);

double logit(double p);

// First and second derivatives of log-gamma, x > 0.
// Relative error below 1e-12 over the positive axis.
double digamma(double x);
double trigamma(double x);

// log of the binomial coefficient C(n, k).
double log_choose(double n, double k);

// log Beta(a, b) = lgamma(a) + lgamma(b) - lgamma(a + b).
double log_beta(double a, double b);

}  // namespace mnstm

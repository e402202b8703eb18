#ifndef RIFT_KERNELS_HPP
#define RIFT_KERNELS_HPP

#include <functional>
#include <span>
#include <vector>

#include "rift/gmm.hpp"
#include "rift/rule.hpp"

namespace rift {
namespace kernels {

// The per-rule inner loops, each in a serial reference version and an
// OpenMP version. Every slot is computed independently and reductions
// happen outside the parallel region, so both versions produce
// bit-identical results; the tests hold them to that.

// Spatial firing plus the tentative recurrent blend for every rule.
void firing_pass_serial(std::span<const Rule> rules, const Vec& x,
                        std::span<IntervalFiring> out);
void firing_pass_parallel(std::span<const Rule> rules, const Vec& x,
                          std::span<IntervalFiring> out);
void firing_pass(std::span<const Rule> rules, const Vec& x, std::span<IntervalFiring> out,
                 bool parallel);

// Consequent rows beta[i][o] = x_ext . weights_i[:,o] and their norms.
void consequent_pass_serial(std::span<const Rule> rules, const Vec& x_ext, Mat& beta,
                            Vec& beta_norm);
void consequent_pass_parallel(std::span<const Rule> rules, const Vec& x_ext, Mat& beta,
                              Vec& beta_norm);
void consequent_pass(std::span<const Rule> rules, const Vec& x_ext, Mat& beta, Vec& beta_norm,
                     bool parallel);

// Per-rule significance scores against the input density.
void significance_pass_serial(std::span<const Rule> rules, std::span<const double> beta_norm,
                              double q, const GmmDensity& gmm, double u, std::span<double> out);
void significance_pass_parallel(std::span<const Rule> rules, std::span<const double> beta_norm,
                                double q, const GmmDensity& gmm, double u, std::span<double> out);
void significance_pass(std::span<const Rule> rules, std::span<const double> beta_norm, double q,
                       const GmmDensity& gmm, double u, std::span<double> out, bool parallel);

// Weighted RLS across rules; rules with negligible weight are skipped.
// Returns the number of rules whose update was dropped as non-finite.
int rls_pass_serial(std::span<Rule> rules, const Vec& x_ext, const Vec& target,
                    std::span<const double> firing_weight, double weight_decay);
int rls_pass_parallel(std::span<Rule> rules, const Vec& x_ext, const Vec& target,
                      std::span<const double> firing_weight, double weight_decay);
int rls_pass(std::span<Rule> rules, const Vec& x_ext, const Vec& target,
             std::span<const double> firing_weight, double weight_decay, bool parallel);

// Generic index loop used for batch prediction and cross-validation folds.
void run_indexed(int n, bool parallel, const std::function<void(int)>& body);

}  // namespace kernels
}  // namespace rift

#endif

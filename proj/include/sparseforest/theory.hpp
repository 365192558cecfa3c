// Copyright 2026 The sparseforest Authors. All Rights Reserved.
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//     http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "sparseforest/models.hpp"
#include "sparseforest/tree.hpp"

namespace sparseforest::theory {

/// One checked inequality lhs <= rhs. Estimated quantities carry a standard
/// error and pass within three of them; exact checks use stderr = 0 and may
/// carry a floating-point rounding allowance instead.
struct BoundReport {
  std::string name;
  std::string params;  // "N=..;p=..;..." key/value list
  double lhs = 0.0;
  double std_error = 0.0;
  double rhs = 0.0;
  double margin = 0.0;  // rhs - lhs
  double rounding = 0.0;
  bool pass = false;  // lhs <= rhs + 3 stderr + rounding
};

BoundReport make_report(std::string name, std::string params, double lhs, double std_error,
                        double rhs, double rounding = 0.0);

/// Relative rounding allowance for bounds checked by exact enumeration in
/// double precision; several of them are attained up to terms far below one ulp.
inline constexpr double kEnumerationRounding = 1e-12;

// ---- binomial technical lemmas ------------------------------------------------

/// E[1/(1+Z)], E[(1/Z) 1{Z>=1}], E[1/(1+Z^2)] for Z ~ Binomial(N,p), against
/// 1/((N+1)p), 2/((N+1)p) and 3/((N+1)(N+2)p^2).
std::array<BoundReport, 3> lemma51_check(std::size_t N, double p);

/// phi(z) = E[z^(Z1-Z2)] in closed form.
std::complex<double> phi(std::complex<double> z, std::size_t N, double p);

/// P(Z1 - Z2 = j) for j = -N..N (index j + N), by exact convolution.
std::vector<double> difference_pmf(std::size_t N, double p);

/// P(Z1 - Z2 = j) from the Cauchy integral of phi(z)/z^(j+1) on the unit
/// circle, by the trapezoid rule with `nodes` points.
double difference_pmf_contour(std::size_t N, double p, long j, std::size_t nodes);

/// Exact E[2^(-d (Z1-Z2)_+)].
double positive_part_moment(std::size_t N, double p, std::size_t d);

/// (24/pi) min(1, sqrt(pi / (16 N p (1-p)))).
double prop53_bound(std::size_t N, double p);

/// (24/pi) * int_0^1 exp(-4 N p (1-p) t^2) dt.
double lemma52_integral_bound(std::size_t N, double p);

/// The (24/pi) min(1, sqrt(pi / (16 N p (1-p)))) bound on E[2^(-d(Z1-Z2)_+)], the integral
/// bound, and two identities of phi: phi(1) = 1 and phi(1/2) equal to the
/// brute-force expectation.
std::vector<BoundReport> lemma52_prop53_check(std::size_t N, double p, std::size_t d);

// ---- variance and bias bounds --------------------------------------------------

/// C = (288/pi)(pi log 2 / 16)^(S/2d).
double variance_constant(std::size_t S, std::size_t d);

/// 1 + xi_n = prod_{j in S} [(1+xi_j)^-1 (1 - xi_j/(S-1))^-1]^(1/2d).
double one_plus_xi(std::span<const double> xi_strong, std::size_t d);

/// ((S-1)/(S^2 a (1-b)))^(S/2d), valid whenever a < p_j < b on the strong set.
double one_plus_xi_envelope(double a, double b, std::size_t S, std::size_t d);

/// C sigma^2 (S^2/(S-1))^(S/2d) (1+xi_n) k_n / (n (log k_n)^(S/2d)).
double variance_bound_value(std::size_t n, std::size_t k_n, std::size_t S, std::size_t d,
                            double sigma2, std::span<const double> xi_strong);

/// 2 S L^2 / k_n^(0.75/(S log 2) (1+gamma)) + sup r^2 exp(-n / (2 k_n)).
double bias_bound_value(std::size_t n, std::size_t k_n, std::size_t S, double L,
                        double sup_r2, double gamma);

/// xi_j = S p_j - 1 for the strong coordinates.
std::vector<double> xi_from_probs(const SplitProbabilities& probs,
                                  std::span<const std::size_t> strong);

// ---- population split criterion ------------------------------------------------

/// Weighted conditional variance decrease V[Y|A] P(A) - V[Y|A_L] P(A_L) -
/// V[Y|A_R] P(A_R) for X uniform on [0,1]^d, when the box A is cut at
/// x_j = position. Integrals by tensor Gauss-Legendre quadrature; additive
/// noise cancels in the difference and is omitted.
double population_split_decrease(const std::function<double(std::span<const double>)>& r,
                                 const Cell& node, std::size_t j, double position,
                                 std::size_t panels = 8);

/// Idealized selection with a known strong set: draw m_try coordinates with
/// replacement, cut a random strong one if any was drawn, otherwise a random
/// drawn one. Returns the empirical frequency of coordinate 0 (strong).
double simulate_ideal_selection(std::size_t S, std::size_t d, std::size_t m_try,
                                std::size_t draws, std::uint64_t seed);

// ---- Monte-Carlo checks --------------------------------------------------------

struct Decomposition {
  double variance = 0.0, variance_se = 0.0;  // E[rbar - rtilde]^2
  double bias = 0.0, bias_se = 0.0;          // E[rtilde - r]^2
  double total = 0.0, total_se = 0.0;        // E[rbar - r]^2, estimated directly
  double cross = 0.0, cross_se = 0.0;        // total - variance - bias
};

struct DecompositionSetup {
  SyntheticModel model;
  std::size_t n = 500;
  std::size_t k_n = 8;
  SplitProbabilities probs;
  std::size_t trees = 100;
  std::size_t replicates = 40;
  std::size_t queries = 200;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Per replicate: fresh training sample, purely random forest, fresh query
/// points; rtilde reuses the same trees with Y replaced by r(X_i).
Decomposition empirical_decomposition(const DecompositionSetup& setup);

struct ConsistencySetup {
  std::size_t n = 100;
  std::size_t k_n = 4;
  SplitProbabilities probs;
  std::size_t replicates = 4000;
  std::vector<std::size_t> small_counts{1, 2, 5};
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// P(N_n < M) <= 2 M k_n/(n+1), P(empty cell) <= exp(-n/(2 k_n)), and
/// E[V_j] = (1 - p_j/2)^ceil(log2 k_n) (two-sided, reported as |diff| <= 0).
std::vector<BoundReport> consistency_diagnostics(const ConsistencySetup& setup);

// ---- suite ---------------------------------------------------------------------

struct SuiteOptions {
  std::size_t lemma51_max_N = 64;
  std::size_t prop53_max_N = 128;
  std::size_t prop53_max_d = 8;
  std::size_t inversion_max_N = 12;
  bool monte_carlo = true;
  std::size_t decomposition_trees = 100;
  std::size_t decomposition_replicates = 40;
  std::size_t decomposition_queries = 200;
  std::size_t consistency_replicates = 4000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// p grid 0.05, 0.10, ..., 0.95.
std::vector<double> probability_grid();

/// Every exact-enumeration and Monte-Carlo check, in a deterministic order.
std::vector<BoundReport> run_suite(const SuiteOptions& options);

void write_reports(const std::vector<BoundReport>& reports, const std::string& path);

}  // namespace sparseforest::theory

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

#include "sparseforest/theory.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <utility>

#include "sparseforest/csv.hpp"
#include "sparseforest/errors.hpp"
#include "sparseforest/forest.hpp"
#include "sparseforest/parallel.hpp"
#include "sparseforest/stats.hpp"

namespace sparseforest::theory {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

std::string params(std::initializer_list<std::pair<const char*, double>> kv) {
  std::string out;
  for (const auto& [key, value] : kv) {
    if (!out.empty()) out += ';';
    out += key;
    out += '=';
    out += csv::format_double(value);
  }
  return out;
}

void check_probability(double p, bool allow_one) {
  if (!(p > 0.0 && (allow_one ? p <= 1.0 : p < 1.0)))
    throw DomainError("probability " + std::to_string(p) + " outside the admissible range");
}

}  // namespace

BoundReport make_report(std::string name, std::string params, double lhs, double std_error,
                        double rhs, double rounding) {
  BoundReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  r.lhs = lhs;
  r.std_error = std_error;
  r.rhs = rhs;
  r.margin = rhs - lhs;
  r.rounding = rounding;
  r.pass = lhs <= rhs + 3.0 * std_error + rounding;
  return r;
}

// ---- binomial lemmas ----------------------------------------------------------

std::array<BoundReport, 3> lemma51_check(std::size_t N, double p) {
  check_probability(p, true);
  const auto pmf = binomial_pmf(N, p);
  double inv_one_plus = 0.0, inv_positive = 0.0, inv_one_plus_sq = 0.0;
  for (std::size_t k = 0; k <= N; ++k) {
    const double z = static_cast<double>(k);
    inv_one_plus += pmf[k] / (1.0 + z);
    if (k >= 1) inv_positive += pmf[k] / z;
    inv_one_plus_sq += pmf[k] / (1.0 + z * z);
  }
  const double n1 = static_cast<double>(N) + 1.0;
  const auto tag = params({{"N", static_cast<double>(N)}, {"p", p}});
  auto check = [&](const char* name, double lhs, double rhs) {
    return make_report(name, tag, lhs, 0.0, rhs, kEnumerationRounding * rhs);
  };
  return {check("lemma51_i", inv_one_plus, 1.0 / (n1 * p)),
          check("lemma51_ii", inv_positive, 2.0 / (n1 * p)),
          check("lemma51_iii", inv_one_plus_sq, 3.0 / (n1 * (n1 + 1.0) * p * p))};
}

std::complex<double> phi(std::complex<double> z, std::size_t N, double p) {
  const double v = p * (1.0 - p);
  const std::complex<double> base = v * (z + 1.0 / z) + (1.0 - 2.0 * v);
  return std::pow(base, static_cast<double>(N));
}

std::vector<double> difference_pmf(std::size_t N, double p) {
  const auto pmf = binomial_pmf(N, p);
  std::vector<double> out(2 * N + 1, 0.0);
  for (std::size_t a = 0; a <= N; ++a)
    for (std::size_t b = 0; b <= N; ++b) out[a + N - b] += pmf[a] * pmf[b];
  return out;
}

double difference_pmf_contour(std::size_t N, double p, long j, std::size_t nodes) {
  if (nodes == 0) throw DomainError("contour quadrature needs nodes");
  // z = e^{i t}: (1/2 pi i) \oint phi(z) z^{-j-1} dz = (1/2 pi) \int phi(e^{it}) e^{-ijt} dt
  std::complex<double> acc = 0.0;
  for (std::size_t k = 0; k < nodes; ++k) {
    const double t = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(nodes);
    const std::complex<double> z = std::polar(1.0, t);
    acc += phi(z, N, p) * std::polar(1.0, -static_cast<double>(j) * t);
  }
  return acc.real() / static_cast<double>(nodes);
}

double positive_part_moment(std::size_t N, double p, std::size_t d) {
  const auto diff = difference_pmf(N, p);
  double acc = 0.0;
  for (std::size_t idx = 0; idx < diff.size(); ++idx) {
    const long j = static_cast<long>(idx) - static_cast<long>(N);
    acc += j > 0 ? std::ldexp(diff[idx], -static_cast<int>(d) * static_cast<int>(j)) : diff[idx];
  }
  return acc;
}

double prop53_bound(std::size_t N, double p) {
  const double v = 16.0 * static_cast<double>(N) * p * (1.0 - p);
  return 24.0 / kPi * std::min(1.0, std::sqrt(kPi / v));
}

double lemma52_integral_bound(std::size_t N, double p) {
  const double a = 4.0 * static_cast<double>(N) * p * (1.0 - p);
  if (a == 0.0) return 24.0 / kPi;
  const double ra = std::sqrt(a);
  return 24.0 / kPi * (std::sqrt(kPi) / (2.0 * ra)) * std::erf(ra);
}

std::vector<BoundReport> lemma52_prop53_check(std::size_t N, double p, std::size_t d) {
  if (N < 1) throw DomainError("positive-part moment check needs N >= 1");
  if (d < 1) throw DomainError("positive-part moment check needs d >= 1");
  check_probability(p, false);
  const auto tag =
      params({{"N", static_cast<double>(N)}, {"p", p}, {"d", static_cast<double>(d)}});
  const double moment = positive_part_moment(N, p, d);
  std::vector<BoundReport> out;
  const double b53 = prop53_bound(N, p), b52 = lemma52_integral_bound(N, p);
  out.push_back(make_report("prop53", tag, moment, 0.0, b53, kEnumerationRounding * b53));
  out.push_back(make_report("lemma52_iii", tag, moment, 0.0, b52, kEnumerationRounding * b52));

  const double at_one = phi(1.0, N, p).real();
  out.push_back(make_report("lemma52_i_phi_one", tag, std::abs(at_one - 1.0), 0.0, 1e-12));

  // E[(1/2)^(Z1-Z2)] by the double sum over both binomial masses.
  const auto pmf = binomial_pmf(N, p);
  double brute = 0.0;
  for (std::size_t a = 0; a <= N; ++a)
    for (std::size_t b = 0; b <= N; ++b)
      brute += pmf[a] * pmf[b] * std::ldexp(1.0, static_cast<int>(b) - static_cast<int>(a));
  const double closed = phi(0.5, N, p).real();
  out.push_back(
      make_report("lemma52_i_phi_half", tag, std::abs(closed - brute) / brute, 0.0, 1e-10));
  return out;
}

// ---- bounds -------------------------------------------------------------------

double variance_constant(std::size_t S, std::size_t d) {
  if (d == 0) throw DomainError("dimension must be positive");
  const double e = static_cast<double>(S) / (2.0 * static_cast<double>(d));
  return 288.0 / kPi * std::pow(kPi * kLn2 / 16.0, e);
}

double one_plus_xi(std::span<const double> xi_strong, std::size_t d) {
  const std::size_t S = xi_strong.size();
  if (S < 2) throw DomainError("the variance bound needs S >= 2");
  double prod = 1.0;
  for (double xi : xi_strong) {
    const double a = 1.0 + xi;
    const double b = 1.0 - xi / static_cast<double>(S - 1);
    if (!(a > 0.0 && b > 0.0)) throw DomainError("xi outside the range of a probability");
    prod *= std::pow(1.0 / (a * b), 1.0 / (2.0 * static_cast<double>(d)));
  }
  return prod;
}

double one_plus_xi_envelope(double a, double b, std::size_t S, std::size_t d) {
  if (S < 2) throw DomainError("the variance bound needs S >= 2");
  if (!(0.0 < a && a < b && b < 1.0)) throw DomainError("need 0 < a < b < 1");
  const double s = static_cast<double>(S);
  return std::pow((s - 1.0) / (s * s * a * (1.0 - b)), s / (2.0 * static_cast<double>(d)));
}

double variance_bound_value(std::size_t n, std::size_t k_n, std::size_t S, std::size_t d,
                            double sigma2, std::span<const double> xi_strong) {
  if (S < 2) throw DomainError("the variance bound needs S >= 2");
  if (k_n < 2 || n < 1) throw DomainError("the variance bound needs k_n >= 2 and n >= 1");
  if (xi_strong.size() != S) throw DimensionError("one xi per strong coordinate required");
  const double s = static_cast<double>(S);
  const double e = s / (2.0 * static_cast<double>(d));
  const double k = static_cast<double>(k_n);
  return variance_constant(S, d) * sigma2 * std::pow(s * s / (s - 1.0), e) *
         one_plus_xi(xi_strong, d) * k / (static_cast<double>(n) * std::pow(std::log(k), e));
}

double bias_bound_value(std::size_t n, std::size_t k_n, std::size_t S, double L, double sup_r2,
                        double gamma) {
  if (S < 2) throw DomainError("the bias bound needs S >= 2");
  if (k_n < 2) throw DomainError("the bias bound needs k_n >= 2");
  const double s = static_cast<double>(S);
  const double k = static_cast<double>(k_n);
  const double exponent = 0.75 / (s * kLn2) * (1.0 + gamma);
  return 2.0 * s * L * L / std::pow(k, exponent) +
         sup_r2 * std::exp(-static_cast<double>(n) / (2.0 * k));
}

std::vector<double> xi_from_probs(const SplitProbabilities& probs,
                                  std::span<const std::size_t> strong) {
  std::vector<double> xi;
  for (auto j : strong) {
    if (j >= probs.size()) throw DimensionError("strong coordinate out of range");
    xi.push_back(static_cast<double>(strong.size()) * probs[j] - 1.0);
  }
  return xi;
}

// ---- population criterion -----------------------------------------------------

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGlNode{-0.9602898564975362, -0.7966664774136267,
                                        -0.525532409916329,  -0.18343464249564978,
                                        0.18343464249564978, 0.525532409916329,
                                        0.7966664774136267,  0.9602898564975362};
constexpr std::array<double, 8> kGlWeight{0.10122853629037669, 0.22238103445337434,
                                          0.31370664587788705, 0.36268378337836177,
                                          0.36268378337836177, 0.31370664587788705,
                                          0.22238103445337434, 0.10122853629037669};

struct Moments {
  double m0 = 0.0, m1 = 0.0, m2 = 0.0;
  // V[Y | X in box] * P(X in box) for uniform X.
  double weighted_variance() const { return m0 > 0.0 ? m2 - m1 * m1 / m0 : 0.0; }
};

Moments integrate(const std::function<double(std::span<const double>)>& r, const Cell& box,
                  std::size_t panels) {
  const std::size_t d = box.d();
  // Per-dimension abscissae and weights.
  std::vector<std::vector<std::pair<double, double>>> rule(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double width = (box.hi[j] - box.lo[j]) / static_cast<double>(panels);
    for (std::size_t q = 0; q < panels; ++q) {
      const double a = box.lo[j] + width * static_cast<double>(q);
      for (std::size_t g = 0; g < kGlNode.size(); ++g)
        rule[j].emplace_back(a + 0.5 * width * (kGlNode[g] + 1.0), 0.5 * width * kGlWeight[g]);
    }
  }
  Moments m;
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  for (;;) {
    double w = 1.0;
    for (std::size_t j = 0; j < d; ++j) {
      x[j] = rule[j][idx[j]].first;
      w *= rule[j][idx[j]].second;
    }
    const double v = r(x);
    m.m0 += w;
    m.m1 += w * v;
    m.m2 += w * v * v;
    std::size_t j = 0;
    while (j < d && ++idx[j] == rule[j].size()) idx[j++] = 0;
    if (j == d) break;
  }
  return m;
}

}  // namespace

double population_split_decrease(const std::function<double(std::span<const double>)>& r,
                                 const Cell& node, std::size_t j, double position,
                                 std::size_t panels) {
  if (j >= node.d()) throw DimensionError("split coordinate out of range");
  if (!(position > node.lo[j] && position < node.hi[j]))
    throw DomainError("split position outside the node");
  Cell left = node, right = node;
  left.hi[j] = position;
  right.lo[j] = position;
  return integrate(r, node, panels).weighted_variance() -
         integrate(r, left, panels).weighted_variance() -
         integrate(r, right, panels).weighted_variance();
}

double simulate_ideal_selection(std::size_t S, std::size_t d, std::size_t m_try,
                                std::size_t draws, std::uint64_t seed) {
  if (S == 0 || S > d || m_try == 0) throw DomainError("need 1 <= S <= d and m_try >= 1");
  Rng rng(seed);
  std::size_t hits = 0;
  std::vector<std::size_t> strong, weak;
  for (std::size_t t = 0; t < draws; ++t) {
    strong.clear();
    weak.clear();
    for (std::size_t k = 0; k < m_try; ++k) {
      const auto j = rng.index(d);
      (j < S ? strong : weak).push_back(j);
    }
    auto& pool = strong.empty() ? weak : strong;
    std::sort(pool.begin(), pool.end());
    pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
    if (pool[rng.index(pool.size())] == 0) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

// ---- Monte Carlo --------------------------------------------------------------

Decomposition empirical_decomposition(const DecompositionSetup& setup) {
  setup.model.validate();
  const std::size_t d = setup.model.d;
  const SplitProbabilities probs =
      setup.probs.empty() ? SplitProbabilities::uniform(d) : setup.probs;
  if (probs.size() != d) throw DimensionError("split probabilities and model dimension differ");
  if (setup.replicates < 2 || setup.queries < 1) throw ConfigError("need >= 2 replicates");

  std::vector<double> var(setup.replicates), bias(setup.replicates), total(setup.replicates),
      cross(setup.replicates);
  parallel_for(setup.replicates, setup.threads, [&](std::size_t rep) {
    Rng data_rng(derive_seed(setup.seed, {rep, 0}));
    const Dataset data = generate(setup.model, setup.n, data_rng);
    ForestConfig config;
    config.k_n = setup.k_n;
    config.trees = setup.trees;
    config.policy = SplitPolicy::purely_random();
    config.probs = probs;
    config.seed = derive_seed(setup.seed, {rep, 1});
    const Forest forest = fit(config, data);
    std::vector<double> r_at_data(data.n());
    for (std::size_t i = 0; i < data.n(); ++i) r_at_data[i] = truth(setup.model, data.row(i));
    const Forest oracle = forest.reweighted(r_at_data);

    Rng query_rng(derive_seed(setup.seed, {rep, 2}));
    std::vector<double> x(d);
    double sv = 0.0, sb = 0.0, st = 0.0;
    for (std::size_t q = 0; q < setup.queries; ++q) {
      for (auto& v : x) v = query_rng.uniform();
      const double rbar = forest.predict(x);
      const double rtilde = oracle.predict(x);
      const double r = truth(setup.model, x);
      sv += (rbar - rtilde) * (rbar - rtilde);
      sb += (rtilde - r) * (rtilde - r);
      st += (rbar - r) * (rbar - r);
    }
    const double qn = static_cast<double>(setup.queries);
    var[rep] = sv / qn;
    bias[rep] = sb / qn;
    total[rep] = st / qn;
    cross[rep] = total[rep] - var[rep] - bias[rep];
  });
  Decomposition out;
  const auto v = mean_se(var), b = mean_se(bias), t = mean_se(total), c = mean_se(cross);
  out.variance = v.mean;
  out.variance_se = v.se;
  out.bias = b.mean;
  out.bias_se = b.se;
  out.total = t.mean;
  out.total_se = t.se;
  out.cross = c.mean;
  out.cross_se = c.se;
  return out;
}

std::vector<BoundReport> consistency_diagnostics(const ConsistencySetup& setup) {
  if (setup.probs.empty()) throw ConfigError("consistency diagnostics need split probabilities");
  if (setup.replicates < 2) throw ConfigError("need >= 2 replicates");
  const std::size_t d = setup.probs.size();
  const unsigned levels = ceil_log2(setup.k_n);
  ForestConfig config;
  config.k_n = setup.k_n;
  config.policy = SplitPolicy::purely_random();
  config.probs = setup.probs;
  config.validate(d);

  const std::size_t R = setup.replicates;
  std::vector<std::size_t> occupancy(R);
  std::vector<std::vector<double>> side(d, std::vector<double>(R));
  parallel_for(R, setup.threads, [&](std::size_t rep) {
    Rng rng(derive_seed(setup.seed, rep));
    const RandomTree tree = build_tree(config, Dataset(d), rng);
    std::vector<double> x(d);
    for (auto& v : x) v = rng.uniform();
    const auto target = tree.leaf_index(x);
    const auto K = tree.path_split_counts(x);
    for (std::size_t j = 0; j < d; ++j) side[j][rep] = std::ldexp(1.0, -static_cast<int>(K[j]));
    std::vector<double> point(d);
    std::size_t count = 0;
    for (std::size_t i = 0; i < setup.n; ++i) {
      for (auto& v : point) v = rng.uniform();
      if (tree.leaf_index(point) == target) ++count;
    }
    occupancy[rep] = count;
  });

  const double n = static_cast<double>(setup.n);
  const double k = static_cast<double>(setup.k_n);
  const double reps = static_cast<double>(R);
  auto frequency = [&](auto pred) {
    const double hits =
        static_cast<double>(std::count_if(occupancy.begin(), occupancy.end(), pred));
    const double f = hits / reps;
    return std::pair{f, std::sqrt(f * (1.0 - f) / reps)};
  };

  std::vector<BoundReport> out;
  for (auto M : setup.small_counts) {
    const auto [f, se] = frequency([M](std::size_t c) { return c < M; });
    out.push_back(make_report("consistency_small_count",
                              params({{"n", n}, {"k_n", k}, {"M", static_cast<double>(M)}}), f,
                              se, 2.0 * static_cast<double>(M) * k / (n + 1.0)));
  }
  {
    const auto [f, se] = frequency([](std::size_t c) { return c == 0; });
    out.push_back(make_report("consistency_empty_cell", params({{"n", n}, {"k_n", k}}), f, se,
                              std::exp(-n / (2.0 * k))));
  }
  for (std::size_t j = 0; j < d; ++j) {
    const auto stats = mean_se(side[j]);
    const double exact = std::pow(1.0 - setup.probs[j] / 2.0, static_cast<double>(levels));
    out.push_back(make_report(
        "consistency_side_length",
        params({{"n", n}, {"k_n", k}, {"j", static_cast<double>(j + 1)}, {"p", setup.probs[j]}}),
        std::abs(stats.mean - exact), stats.se, 0.0));
  }
  return out;
}

// ---- suite --------------------------------------------------------------------

std::vector<double> probability_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 19; ++i) grid.push_back(0.05 * i);
  return grid;
}

namespace {

template <class Fn>
std::size_t count_monotone_violations(std::size_t from, std::size_t to, bool increasing, Fn f) {
  std::size_t bad = 0;
  double prev = f(from);
  for (std::size_t k = from + 1; k <= to; ++k) {
    const double cur = f(k);
    if (increasing ? !(cur > prev) : !(cur < prev)) ++bad;
    prev = cur;
  }
  return bad;
}

}  // namespace

std::vector<BoundReport> run_suite(const SuiteOptions& o) {
  std::vector<BoundReport> out;
  const auto grid = probability_grid();

  for (std::size_t N = 0; N <= o.lemma51_max_N; ++N)
    for (double p : grid)
      for (auto& r : lemma51_check(N, p)) out.push_back(std::move(r));

  for (std::size_t N = 1; N <= o.prop53_max_N; ++N)
    for (double p : grid)
      for (std::size_t d = 1; d <= o.prop53_max_d; ++d) {
        auto reports = lemma52_prop53_check(N, p, d);
        // phi identities do not depend on d
        if (d > 1) reports.resize(2);
        for (auto& r : reports) out.push_back(std::move(r));
      }

  for (std::size_t N = 1; N <= o.inversion_max_N; ++N)
    for (double p : grid) {
      const auto conv = difference_pmf(N, p);
      double worst = 0.0;
      for (long j = -static_cast<long>(N); j <= static_cast<long>(N); ++j)
        worst = std::max(worst, std::abs(difference_pmf_contour(N, p, j, 4 * N + 4) -
                                         conv[static_cast<std::size_t>(j + static_cast<long>(N))]));
      out.push_back(make_report("lemma52_ii_inversion",
                                params({{"N", static_cast<double>(N)}, {"p", p}}), worst, 0.0,
                                1e-10));
    }

  {
    Rng rng(derive_seed(o.seed, 101));
    for (int t = 0; t < 200; ++t) {
      const std::size_t S = 2 + rng.index(9);
      const std::size_t d = S + rng.index(60);
      const double a = 0.01 + 0.9 * rng.uniform();
      const double b = a + (0.99 - a) * rng.uniform_pos();
      std::vector<double> xi(S);
      for (auto& v : xi) {
        const double p = a + (b - a) * (0.001 + 0.998 * rng.uniform());
        v = static_cast<double>(S) * p - 1.0;
      }
      const double envelope = one_plus_xi_envelope(a, b, S, d);
      out.push_back(make_report("remark1_envelope",
                                params({{"S", static_cast<double>(S)},
                                        {"d", static_cast<double>(d)},
                                        {"a", a},
                                        {"b", b}}),
                                one_plus_xi(xi, d), 0.0, envelope,
                                kEnumerationRounding * envelope));
    }
  }

  {
    const std::vector<double> xi0(2, 0.0);
    const auto bad_var_k = count_monotone_violations(2, 4096, true, [&](std::size_t k) {
      return variance_bound_value(1000, k, 2, 10, 1.0, xi0);
    });
    out.push_back(make_report("variance_bound_increasing_in_kn", "S=2;d=10;n=1000",
                              static_cast<double>(bad_var_k), 0.0, 0.0));
    const auto bad_var_s = count_monotone_violations(1, 100, true, [&](std::size_t s) {
      return variance_bound_value(1000, 64, 2, 10, 0.1 * static_cast<double>(s), xi0);
    });
    out.push_back(make_report("variance_bound_increasing_in_sigma2", "S=2;d=10;n=1000;k_n=64",
                              static_cast<double>(bad_var_s), 0.0, 0.0));
    const auto bad_bias = count_monotone_violations(2, 4096, false, [&](std::size_t k) {
      return bias_bound_value(1000, k, 2, 1.0, 0.0, 0.0);
    });
    out.push_back(make_report("bias_bound_decreasing_in_kn", "S=2;L=1",
                              static_cast<double>(bad_bias), 0.0, 0.0));
  }

  {
    auto linear = [](std::span<const double> x) { return 2.0 * x[0]; };
    const Cell root = Cell::unit(2);
    double best = -1.0, best_pos = 0.0, weak = 0.0;
    for (int k = 1; k <= 999; ++k) {
      const double s = k / 1000.0;
      const double dec = population_split_decrease(linear, root, 0, s);
      if (dec > best) {
        best = dec;
        best_pos = s;
      }
      weak = std::max(weak, std::abs(population_split_decrease(linear, root, 1, s)));
    }
    out.push_back(make_report("split_decrease_strong_max", "a=2", std::abs(best - 0.25), 0.0, 1e-6));
    out.push_back(
        make_report("split_decrease_strong_argmax", "a=2", std::abs(best_pos - 0.5), 0.0, 1e-3));
    out.push_back(make_report("split_decrease_weak", "a=2", weak, 0.0, 1e-9));
  }

  if (o.monte_carlo) {
    {
      const std::size_t draws = 200000;
      const double f = simulate_ideal_selection(5, 100, 20, draws, derive_seed(o.seed, 102));
      const double exact = ideal_cut_probability(5, 100, 20);
      out.push_back(make_report("ideal_cut_probability", "S=5;d=100;m_try=20",
                                std::abs(f - exact),
                                std::sqrt(exact * (1.0 - exact) / static_cast<double>(draws)), 0.0));
    }
    const SyntheticModel model = SyntheticModel::sinus_linear(5, 1.0);
    const SplitProbabilities probs({0.4, 0.4, 0.2 / 3.0, 0.2 / 3.0, 0.2 / 3.0});
    const auto strong = model.strong();
    const auto xi = xi_from_probs(probs, strong);
    const double gamma = *std::min_element(xi.begin(), xi.end());
    for (std::size_t n : {500, 2000})
      for (std::size_t k : {8, 32, 128}) {
        DecompositionSetup setup;
        setup.model = model;
        setup.n = n;
        setup.k_n = k;
        setup.probs = probs;
        setup.trees = o.decomposition_trees;
        setup.replicates = o.decomposition_replicates;
        setup.queries = o.decomposition_queries;
        setup.seed = derive_seed(o.seed, {103, n, k});
        setup.threads = o.threads;
        const auto dec = empirical_decomposition(setup);
        const auto tag = params({{"n", static_cast<double>(n)},
                                 {"k_n", static_cast<double>(k)},
                                 {"S", 2.0},
                                 {"d", 5.0},
                                 {"sigma2", 1.0}});
        out.push_back(make_report("variance_term", tag, dec.variance, dec.variance_se,
                                  variance_bound_value(n, k, 2, 5, 1.0, xi)));
        out.push_back(make_report(
            "bias_term", tag, dec.bias, dec.bias_se,
            bias_bound_value(n, k, 2, model.lipschitz(), model.sup_square(), gamma)));
        out.push_back(
            make_report("decomposition_additivity", tag, std::abs(dec.cross), dec.cross_se, 0.0));
      }
    const auto uniform4 = SplitProbabilities::uniform(4);
    for (std::size_t n : {100, 1000})
      for (std::size_t k : {4, 16, 64}) {
        ConsistencySetup setup;
        setup.n = n;
        setup.k_n = k;
        setup.probs = uniform4;
        setup.replicates = o.consistency_replicates;
        setup.seed = derive_seed(o.seed, {104, n, k});
        setup.threads = o.threads;
        for (auto& r : consistency_diagnostics(setup)) out.push_back(std::move(r));
      }
  }
  return out;
}

void write_reports(const std::vector<BoundReport>& reports, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write " + path);
  csv::write_row(out, {"name", "params", "lhs", "stderr", "rhs", "margin", "pass"});
  for (const auto& r : reports)
    csv::write_row(out, {r.name, r.params, csv::format_double(r.lhs),
                         csv::format_double(r.std_error), csv::format_double(r.rhs),
                         csv::format_double(r.margin), r.pass ? "true" : "false"});
}

}  // namespace sparseforest::theory

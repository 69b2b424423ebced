/*
 * Copyright (c) 2026 The lecopt Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "lecopt/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lecopt/error.hpp"

namespace lecopt {
namespace {

constexpr double kRenormalizeSlack = 1e-6;
// Below this the sum is treated as already normalized, so that serialized
// distributions reload bit-for-bit.
constexpr double kNoiseSlack = 1e-12;

std::string describe(std::size_t i) {
  return "bucket " + std::to_string(i);
}

double next_up(double v) {
  return std::nextafter(v, std::numeric_limits<double>::infinity());
}

// Returns the factor to divide probabilities by, or throws.
double normalizer(double sum, const std::string& what) {
  if (!std::isfinite(sum) || std::abs(sum - 1.0) > kRenormalizeSlack) {
    throw ValidationError(what + " probabilities sum to " +
                          std::to_string(sum) + ", expected 1");
  }
  return std::abs(sum - 1.0) > kNoiseSlack ? sum : 1.0;
}

} // namespace

Distribution::Distribution(std::vector<Bucket> buckets)
    : buckets_(std::move(buckets)) {
  if (buckets_.empty()) {
    throw ValidationError("distribution has no buckets");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < buckets_.size(); ++i) {
    const Bucket& b = buckets_[i];
    if (!std::isfinite(b.lo) || !std::isfinite(b.rep) ||
        std::isnan(b.hi) || b.hi == -std::numeric_limits<double>::infinity()) {
      throw ValidationError(describe(i) + " has a non-finite bound");
    }
    if (!(b.lo <= b.rep && b.rep < b.hi)) {
      throw ValidationError(describe(i) + " violates lo <= rep < hi");
    }
    if (!std::isfinite(b.prob) || b.prob < 0.0) {
      throw ValidationError(describe(i) + " has a negative probability");
    }
    if (i > 0 && buckets_[i - 1].hi > b.lo) {
      throw ValidationError(describe(i) +
                            " overlaps or precedes the previous bucket");
    }
    sum += b.prob;
  }
  const double norm = normalizer(sum, "distribution");
  if (norm != 1.0) {
    for (Bucket& b : buckets_) {
      b.prob /= norm;
    }
  }
}

std::vector<double> Distribution::reps() const {
  std::vector<double> out;
  out.reserve(buckets_.size());
  for (const Bucket& b : buckets_) {
    out.push_back(b.rep);
  }
  return out;
}

Distribution discrete(std::vector<std::pair<double, double>> masses) {
  std::stable_sort(masses.begin(), masses.end(),
                   [](const auto& x, const auto& y) { return x.first < y.first; });
  std::vector<Bucket> buckets;
  buckets.reserve(masses.size());
  for (const auto& [value, prob] : masses) {
    if (!std::isfinite(value)) {
      throw ValidationError("point mass at a non-finite value");
    }
    if (!buckets.empty() && buckets.back().rep == value) {
      buckets.back().prob += prob;
      continue;
    }
    buckets.push_back(Bucket{value, next_up(value), value, prob});
  }
  return Distribution(std::move(buckets));
}

Distribution discrete(std::initializer_list<std::pair<double, double>> masses) {
  return discrete(std::vector<std::pair<double, double>>(masses));
}

Distribution point(double value) {
  if (!std::isfinite(value) || value < 0.0) {
    throw DomainError("point mass requires a finite non-negative value, got " +
                      std::to_string(value));
  }
  return Distribution({Bucket{value, next_up(value), value, 1.0}});
}

double expectation(const Distribution& d) {
  double mean = 0.0;
  for (const Bucket& b : d.buckets()) {
    mean += b.rep * b.prob;
  }
  return mean;
}

double snap_integral(double x) {
  const double r = std::round(x);
  if (r != 0.0 && r != x && std::abs(x - r) <= 1e-9 * std::abs(r)) {
    return r;
  }
  return x;
}

TransitionModel::TransitionModel(std::vector<double> states,
                                 std::vector<std::vector<double>> matrix)
    : states_(std::move(states)), matrix_(std::move(matrix)) {
  const std::size_t n = states_.size();
  if (n == 0) {
    throw ValidationError("transition model has no states");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(states_[i])) {
      throw ValidationError("state " + std::to_string(i) + " is not finite");
    }
    if (i > 0 && !(states_[i - 1] < states_[i])) {
      throw ValidationError("states must be strictly increasing");
    }
  }
  if (matrix_.size() != n) {
    throw ValidationError("transition matrix must have one row per state");
  }
  for (std::size_t i = 0; i < n; ++i) {
    auto& row = matrix_[i];
    const std::string where = "transition row " + std::to_string(i);
    if (row.size() != n) {
      throw ValidationError(where + " must have one entry per state");
    }
    double sum = 0.0;
    for (double p : row) {
      if (!std::isfinite(p) || p < 0.0) {
        throw ValidationError(where + " has a negative entry");
      }
      sum += p;
    }
    const double norm = normalizer(sum, where);
    if (norm != 1.0) {
      for (double& p : row) {
        p /= norm;
      }
    }
  }
}

TransitionModel TransitionModel::identity(std::vector<double> states) {
  const std::size_t n = states.size();
  std::vector<std::vector<double>> m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    m[i][i] = 1.0;
  }
  return TransitionModel(std::move(states), std::move(m));
}

Distribution advance(const Distribution& d, const TransitionModel& t) {
  const std::size_t n = t.size();
  if (d.size() != n) {
    throw UsageError("distribution has " + std::to_string(d.size()) +
                     " buckets but the transition model has " +
                     std::to_string(n) + " states");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i].rep != t.states()[i]) {
      throw UsageError("distribution representative " +
                       std::to_string(d[i].rep) +
                       " does not match transition state " +
                       std::to_string(t.states()[i]));
    }
  }
  std::vector<Bucket> out(d.buckets().begin(), d.buckets().end());
  for (std::size_t j = 0; j < n; ++j) {
    double p = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      p += d[i].prob * t(i, j);
    }
    out[j].prob = p;
  }
  return Distribution(std::move(out));
}

Distribution advance(const Distribution& d, const TransitionModel& t,
                     std::size_t steps) {
  Distribution cur = d;
  for (std::size_t s = 0; s < steps; ++s) {
    cur = advance(cur, t);
  }
  return cur;
}

Distribution product_distribution(const Distribution& a,
                                  const Distribution& b,
                                  const Distribution& sigma) {
  std::vector<std::pair<double, double>> masses;
  masses.reserve(a.size() * b.size() * sigma.size());
  for (const Bucket& x : a.buckets()) {
    for (const Bucket& y : b.buckets()) {
      for (const Bucket& s : sigma.buckets()) {
        masses.emplace_back(snap_integral(x.rep * y.rep * s.rep),
                            x.prob * y.prob * s.prob);
      }
    }
  }
  return discrete(std::move(masses));
}

Distribution rebucket(const Distribution& d, std::size_t k) {
  if (k == 0) {
    throw UsageError("rebucket budget must be at least 1");
  }
  if (d.size() <= k) {
    return d;
  }
  // Bucket i joins group floor(k * midpoint of its cumulative-mass interval);
  // groups are contiguous and there are at most k of them.
  std::vector<Bucket> out;
  double cum = 0.0;
  std::size_t current = k;  // no group yet
  double mass = 0.0, moment = 0.0, first_rep = 0.0, last_rep = 0.0;
  auto flush = [&]() {
    if (current == k) {
      return;
    }
    Bucket& g = out.back();
    g.prob = mass;
    double rep = mass > 0.0 ? moment / mass : first_rep;
    g.rep = std::clamp(rep, first_rep, last_rep);
  };
  for (const Bucket& b : d.buckets()) {
    const double mid = cum + 0.5 * b.prob;
    cum += b.prob;
    const auto group = std::min<std::size_t>(
        k - 1, static_cast<std::size_t>(std::max(0.0, std::floor(mid * k))));
    if (group != current) {
      flush();
      current = group;
      out.push_back(Bucket{b.lo, b.hi, b.rep, 0.0});
      mass = moment = 0.0;
      first_rep = b.rep;
    }
    out.back().hi = b.hi;
    last_rep = b.rep;
    mass += b.prob;
    moment += b.prob * b.rep;
  }
  flush();
  return Distribution(std::move(out));
}

Cumulative::Cumulative(const Distribution& d) {
  const std::size_t n = d.size();
  reps_.reserve(n);
  probs_.reserve(n);
  mass_below_.assign(n + 1, 0.0);
  moment_below_.assign(n + 1, 0.0);
  mass_from_.assign(n + 1, 0.0);
  moment_from_.assign(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    reps_.push_back(d[i].rep);
    probs_.push_back(d[i].prob);
    mass_below_[i + 1] = mass_below_[i] + d[i].prob;
    moment_below_[i + 1] = moment_below_[i] + d[i].prob * d[i].rep;
  }
  for (std::size_t i = n; i-- > 0;) {
    mass_from_[i] = mass_from_[i + 1] + d[i].prob;
    moment_from_[i] = moment_from_[i + 1] + d[i].prob * d[i].rep;
  }
}

std::size_t Cumulative::Cursor::seek(double t) {
  const auto& reps = table_->reps_;
  if (visits_ != nullptr) {
    ++*visits_;
  }
  while (pos_ < reps.size() && (strict_ ? reps[pos_] < t : reps[pos_] <= t)) {
    ++pos_;
    if (visits_ != nullptr) {
      ++*visits_;
    }
  }
  return pos_;
}

double PrefixTables::geq_at(double rep) const {
  auto it = std::lower_bound(reps.begin(), reps.end(), rep);
  if (it == reps.end() || *it != rep) {
    throw UsageError("value " + std::to_string(rep) +
                     " is not a representative of the distribution");
  }
  return geq[static_cast<std::size_t>(it - reps.begin())];
}

std::size_t PrefixTables::threshold_index(double t) const {
  auto it = std::lower_bound(thresholds.begin(), thresholds.end(), t);
  if (it == thresholds.end() || *it != t) {
    throw UsageError("threshold " + std::to_string(t) + " was not tabulated");
  }
  return static_cast<std::size_t>(it - thresholds.begin());
}

PrefixTables prefix_tables(const Distribution& d,
                           std::span<const double> thresholds) {
  if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
    throw UsageError("prefix_tables requires thresholds sorted ascending");
  }
  PrefixTables out;
  const Cumulative cum(d);
  out.visits += cum.size();
  out.reps = cum.reps();
  out.geq.resize(cum.size());
  for (std::size_t i = 0; i < cum.size(); ++i) {
    out.geq[i] = cum.mass_from(i);
  }
  out.thresholds.assign(thresholds.begin(), thresholds.end());
  auto le = cum.cursor_le(&out.visits);
  auto lt = cum.cursor_lt(&out.visits);
  for (double t : thresholds) {
    const std::size_t below = le.seek(t);
    const double p_le = cum.mass_below(below);
    out.leq_at.push_back(p_le);
    out.cond_mean_leq.push_back(
        p_le > 0.0 ? std::optional(cum.moment_below(below) / p_le)
                   : std::nullopt);
    const std::size_t from = lt.seek(t);
    const double p_ge = cum.mass_from(from);
    out.cond_mean_geq.push_back(
        p_ge > 0.0 ? std::optional(cum.moment_from(from) / p_ge)
                   : std::nullopt);
  }
  return out;
}

} // namespace lecopt

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

#pragma once

#include <cstddef>
#include <initializer_list>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace lecopt {

/// One interval of a bucketed parameter. `rep` stands in for every value
/// in [lo, hi); `hi` may be +infinity for the last bucket.
struct Bucket {
  double lo = 0.0;
  double hi = 0.0;
  double rep = 0.0;
  double prob = 0.0;

  bool operator==(const Bucket&) const = default;
};

/// Discrete approximation of a random parameter (pages, memory, selectivity).
///
/// Buckets are sorted by `lo` and do not overlap, each satisfies
/// lo <= rep < hi, and probabilities are non-negative and sum to one.
/// Inputs whose mass is within 1e-6 of one are renormalized; anything
/// further off is rejected. Values are immutable once constructed.
class Distribution {
 public:
  /// Validates and (if needed) renormalizes. Throws ValidationError.
  explicit Distribution(std::vector<Bucket> buckets);

  std::span<const Bucket> buckets() const noexcept { return buckets_; }
  std::size_t size() const noexcept { return buckets_.size(); }
  const Bucket& operator[](std::size_t i) const { return buckets_[i]; }

  std::vector<double> reps() const;
  double min_rep() const { return buckets_.front().rep; }
  double max_rep() const { return buckets_.back().rep; }
  bool is_point() const noexcept { return buckets_.size() == 1; }

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<Bucket> buckets_;
};

/// Point masses at the given (value, probability) pairs. Each mass becomes
/// a degenerate bucket [v, next(v)); equal values are merged.
Distribution discrete(std::vector<std::pair<double, double>> masses);
Distribution discrete(std::initializer_list<std::pair<double, double>> masses);

/// Single bucket at `value` with probability one. Throws DomainError for
/// negative or non-finite values; every parameter modelled here is
/// non-negative.
Distribution point(double value);

double expectation(const Distribution& d);

/// Rounds `x` to the nearest integer when it is within a relative 1e-9 of
/// a non-zero integer. Products of page counts and selectivities pick up
/// floating noise (3000.0000000000005) that would otherwise leak into
/// integral cost values.
double snap_integral(double x);

/// Time-homogeneous Markov chain over the representatives of a memory
/// distribution. matrix[i][j] is the probability of moving from states[i]
/// to states[j] between two phases.
class TransitionModel {
 public:
  TransitionModel(std::vector<double> states,
                  std::vector<std::vector<double>> matrix);

  const std::vector<double>& states() const noexcept { return states_; }
  const std::vector<std::vector<double>>& matrix() const noexcept {
    return matrix_;
  }
  std::size_t size() const noexcept { return states_.size(); }
  double operator()(std::size_t from, std::size_t to) const {
    return matrix_[from][to];
  }

  static TransitionModel identity(std::vector<double> states);

  bool operator==(const TransitionModel&) const = default;

 private:
  std::vector<double> states_;
  std::vector<std::vector<double>> matrix_;
};

/// One step of the chain: probabilities become the row vector d times the
/// matrix; bucket bounds and representatives are unchanged.
/// Throws UsageError when d's representatives differ from the chain's states.
Distribution advance(const Distribution& d, const TransitionModel& t);

/// `steps` applications of advance().
Distribution advance(const Distribution& d, const TransitionModel& t,
                     std::size_t steps);

/// Distribution of a*b*sigma for independent factors. Every triple of
/// representatives contributes a point mass; equal values are coalesced.
/// The result is exact (no rebucketing); callers rebucket if they need a
/// budget.
Distribution product_distribution(const Distribution& a,
                                  const Distribution& b,
                                  const Distribution& sigma);

/// Coalesces adjacent buckets into at most `k` groups of roughly equal
/// probability. A merged bucket spans its members and its representative is
/// their probability-weighted mean, so total mass and the mean are kept.
/// Returns `d` unchanged when it already has at most k buckets.
/// Throws UsageError for k == 0.
Distribution rebucket(const Distribution& d, std::size_t k);

/// Prefix sums of mass and first moment over a distribution's
/// representatives, with cursors for monotone threshold sweeps. Building
/// is O(n); a cursor that is only moved forward costs O(n) in total.
class Cumulative {
 public:
  explicit Cumulative(const Distribution& d);

  std::size_t size() const noexcept { return reps_.size(); }
  const std::vector<double>& reps() const noexcept { return reps_; }
  const std::vector<double>& probs() const noexcept { return probs_; }

  // Sums over the first `i` buckets / from bucket `i` on. Suffix sums are
  // accumulated separately so tail probabilities never come from 1 - x.
  double mass_below(std::size_t i) const { return mass_below_[i]; }
  double moment_below(std::size_t i) const { return moment_below_[i]; }
  double mass_from(std::size_t i) const { return mass_from_[i]; }
  double moment_from(std::size_t i) const { return moment_from_[i]; }

  /// Monotone pointer: the number of representatives <= t (or < t when
  /// `strict`). Thresholds passed to one cursor must be non-decreasing.
  class Cursor {
   public:
    Cursor(const Cumulative& table, bool strict, std::size_t* visits)
        : table_(&table), strict_(strict), visits_(visits) {}

    std::size_t seek(double t);

   private:
    const Cumulative* table_;
    bool strict_;
    std::size_t* visits_;
    std::size_t pos_ = 0;
  };

  Cursor cursor_le(std::size_t* visits = nullptr) const {
    return Cursor(*this, false, visits);
  }
  Cursor cursor_lt(std::size_t* visits = nullptr) const {
    return Cursor(*this, true, visits);
  }

 private:
  std::vector<double> reps_;
  std::vector<double> probs_;
  std::vector<double> mass_below_;
  std::vector<double> moment_below_;
  std::vector<double> mass_from_;
  std::vector<double> moment_from_;
};

/// Lookup tables over one distribution X for a sorted list of thresholds.
struct PrefixTables {
  /// Representatives of X, ascending, with geq[i] = Pr(X >= reps[i]).
  std::vector<double> reps;
  std::vector<double> geq;
  /// Thresholds t, ascending, with leq_at[i] = Pr(X <= t). Conditional means
  /// over an empty event are absent.
  std::vector<double> thresholds;
  std::vector<double> leq_at;
  std::vector<std::optional<double>> cond_mean_leq;  // E(X : X <= t)
  std::vector<std::optional<double>> cond_mean_geq;  // E(X : X >= t)
  /// Element visits spent building the tables.
  std::size_t visits = 0;

  /// Pr(X >= rep) for a representative of X. Throws UsageError otherwise.
  double geq_at(double rep) const;
  /// Index of threshold `t`. Throws UsageError when t was not tabulated.
  std::size_t threshold_index(double t) const;
};

/// Builds PrefixTables in one sweep. Throws UsageError for unsorted
/// thresholds.
PrefixTables prefix_tables(const Distribution& d,
                           std::span<const double> thresholds);

} // namespace lecopt

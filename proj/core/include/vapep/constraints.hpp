#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "vapep/relation.hpp"
#include "vapep/types.hpp"

namespace vapep {

/// Monotone penalty f with f(z) = 0 for z <= 0 and f(z) > 0 otherwise.
///
/// linear(p):            f(z) = p * max(0, z)
/// table(values, tail):  f(z) = values[z-1] for 1 <= z <= len, then grows
///                       by `tail` per unit beyond len.
class PenaltySpec {
 public:
  static PenaltySpec linear(Weight slope);
  static PenaltySpec table(std::vector<Weight> values, Weight tail_slope);

  Weight operator()(std::int64_t z) const;

  bool is_linear() const { return values_.empty(); }
  /// Slope of a linear spec, or the tail slope of a table.
  Weight slope() const { return slope_; }
  const std::vector<Weight>& table_values() const { return values_; }

  friend bool operator==(const PenaltySpec&, const PenaltySpec&) = default;

 private:
  PenaltySpec(std::vector<Weight> values, Weight slope) : values_(std::move(values)), slope_(slope) {}

  std::vector<Weight> values_;
  Weight slope_ = 1;
};

/// Universal separation of duty: f(|A(r1) ∩ A(r2)|).
struct SodU {
  int r1 = 0;
  int r2 = 0;
  PenaltySpec f = PenaltySpec::linear(1);
};

/// Universal binding of duty: f(maxdiff(A, r1, r2)).
struct BodU {
  int r1 = 0;
  int r2 = 0;
  PenaltySpec f = PenaltySpec::linear(1);
};

/// Existential separation of duty: ell when A(r1) = A(r2).
struct SodE {
  int r1 = 0;
  int r2 = 0;
  Weight ell = 1;
};

/// Existential binding of duty: ell when A(r1) ∩ A(r2) = ∅.
struct BodE {
  int r1 = 0;
  int r2 = 0;
  Weight ell = 1;
};

/// f(|A(r)| - t).
struct CardUB {
  int r = 0;
  int t = 1;
  PenaltySpec f = PenaltySpec::linear(1);
};

/// f(t - |A(r)|).
struct CardLB {
  int r = 0;
  int t = 1;
  PenaltySpec f = PenaltySpec::linear(1);
};

/// f_Π(|A(R)|): coef * z^2 or slope * z.
struct UserCount {
  enum class Shape { quadratic, linear };
  Shape shape = Shape::quadratic;
  Weight coef = 1;
};

/// User-defined constraint. Supplying the weight as a function of the user
/// profile is what declares it user-independent; the profile solver relies on
/// that. Monotone shrink behaviour is not assumed, so no bounds are derived.
struct CustomConstraint {
  std::string label;
  std::function<Weight(const UserProfile&)> weight;
};

using WeightedConstraint = std::variant<SodU, BodU, SodE, BodE, CardUB, CardLB, UserCount, CustomConstraint>;

/// Legend buckets used in reports.
enum class ConstraintCategory { sod, bod, cardinality, user_count, custom };

ConstraintCategory category_of(const WeightedConstraint& c);
std::string family_name(const WeightedConstraint& c);

/// Throws DomainError unless every scope index lies in [0, k) and the
/// per-family invariants hold (r1 != r2, t >= 1, ell >= 1, coef >= 1).
void validate_constraint(const WeightedConstraint& c, int k);

/// w_c(A) computed directly from the sets A(r).
Weight eval_relation(const WeightedConstraint& c, const AuthorizationRelation& a, int k);

/// The aggregates of a profile that every built-in family depends on.
struct ProfileAggregates {
  int k = 0;
  std::vector<std::int64_t> degree;        ///< |A(r)|
  std::vector<std::int64_t> intersection;  ///< |A(r) ∩ A(r')|, row-major k×k, symmetric
  std::int64_t active = 0;                 ///< |A(R)|

  explicit ProfileAggregates(int k_ = 0)
      : k(k_), degree(static_cast<std::size_t>(k_), 0), intersection(static_cast<std::size_t>(k_ * k_), 0) {}

  std::int64_t inter(int r1, int r2) const { return intersection[static_cast<std::size_t>(r1 * k + r2)]; }

  /// Adds `copies` users holding exactly `t`.
  void add(ResourceSet t, std::int64_t copies);
};

ProfileAggregates aggregates_of(const UserProfile& usr);

/// w_c computed from profile aggregates. CustomConstraint needs the full
/// profile, so `usr` may be null only when no custom constraint is present.
Weight eval_aggregates(const WeightedConstraint& c, const ProfileAggregates& agg, const UserProfile* usr);

/// w_c computed from the user profile alone.
Weight eval_profile(const WeightedConstraint& c, const UserProfile& usr);

/// User cap ℓ for the profile solver, derived from the constraint set:
///
///  * SoD_U / CardLB(linear) / UserCount(quadratic) only: removing one active
///    user changes the weight by at most Σ p_Card - coef(2|A(R)| - 1), so an
///    optimum never needs more than ⌈0.5 (Σ p_Card / coef + 1)⌉ users.
///  * Table-1 families only: 3 τ C(k,2) with τ the largest CardLB threshold
///    (1 when absent), and never below τ.
///  * anything else: n.
///
/// The result is clamped to [min(k, n), n]: a complete relation can always
/// be thinned to k users without losing coverage.
std::size_t wbound_suggestion(const std::vector<WeightedConstraint>& constraints, int k, std::size_t n);

}  // namespace vapep

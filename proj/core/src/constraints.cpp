#include "vapep/constraints.hpp"

#include <algorithm>
#include <cmath>

#include "vapep/relation.hpp"

namespace vapep {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// ---------------------------------------------------------------------------
// PenaltySpec

PenaltySpec PenaltySpec::linear(Weight slope) {
  if (slope <= 0) throw DomainError("linear penalty slope must be positive");
  return PenaltySpec({}, slope);
}

PenaltySpec PenaltySpec::table(std::vector<Weight> values, Weight tail_slope) {
  if (values.empty()) throw DomainError("penalty table must not be empty");
  if (values.front() <= 0) throw DomainError("penalty table must start with a positive value");
  if (!std::is_sorted(values.begin(), values.end())) throw DomainError("penalty table must be non-decreasing");
  if (tail_slope <= 0) throw DomainError("penalty table tail slope must be positive");
  return PenaltySpec(std::move(values), tail_slope);
}

Weight PenaltySpec::operator()(std::int64_t z) const {
  if (z <= 0) return 0;
  if (values_.empty()) return checked_mul(slope_, z);
  const auto len = static_cast<std::int64_t>(values_.size());
  if (z <= len) return values_[static_cast<std::size_t>(z - 1)];
  return checked_add(values_.back(), checked_mul(slope_, z - len));
}

// ---------------------------------------------------------------------------
// Catalog metadata

ConstraintCategory category_of(const WeightedConstraint& c) {
  return std::visit(overloaded{
                        [](const SodU&) { return ConstraintCategory::sod; },
                        [](const SodE&) { return ConstraintCategory::sod; },
                        [](const BodU&) { return ConstraintCategory::bod; },
                        [](const BodE&) { return ConstraintCategory::bod; },
                        [](const CardUB&) { return ConstraintCategory::cardinality; },
                        [](const CardLB&) { return ConstraintCategory::cardinality; },
                        [](const UserCount&) { return ConstraintCategory::user_count; },
                        [](const CustomConstraint&) { return ConstraintCategory::custom; },
                    },
                    c);
}

std::string family_name(const WeightedConstraint& c) {
  return std::visit(overloaded{
                        [](const SodU&) -> std::string { return "sod_u"; },
                        [](const SodE&) -> std::string { return "sod_e"; },
                        [](const BodU&) -> std::string { return "bod_u"; },
                        [](const BodE&) -> std::string { return "bod_e"; },
                        [](const CardUB&) -> std::string { return "card_ub"; },
                        [](const CardLB&) -> std::string { return "card_lb"; },
                        [](const UserCount&) -> std::string { return "user_count"; },
                        [](const CustomConstraint& x) -> std::string { return "custom:" + x.label; },
                    },
                    c);
}

namespace {

void check_resource(int r, int k, const char* family) {
  if (r < 0 || r >= k) {
    throw DomainError(std::string(family) + ": resource index " + std::to_string(r) + " outside [0, " +
                      std::to_string(k) + ")");
  }
}

void check_pair(int r1, int r2, int k, const char* family) {
  check_resource(r1, k, family);
  check_resource(r2, k, family);
  if (r1 == r2) throw DomainError(std::string(family) + ": scope needs two distinct resources");
}

}  // namespace

void validate_constraint(const WeightedConstraint& c, int k) {
  std::visit(overloaded{
                 [k](const SodU& x) { check_pair(x.r1, x.r2, k, "sod_u"); },
                 [k](const BodU& x) { check_pair(x.r1, x.r2, k, "bod_u"); },
                 [k](const SodE& x) {
                   check_pair(x.r1, x.r2, k, "sod_e");
                   if (x.ell <= 0) throw DomainError("sod_e: ell must be positive");
                 },
                 [k](const BodE& x) {
                   check_pair(x.r1, x.r2, k, "bod_e");
                   if (x.ell <= 0) throw DomainError("bod_e: ell must be positive");
                 },
                 [k](const CardUB& x) {
                   check_resource(x.r, k, "card_ub");
                   if (x.t < 1) throw DomainError("card_ub: t must be at least 1");
                 },
                 [k](const CardLB& x) {
                   check_resource(x.r, k, "card_lb");
                   if (x.t < 1) throw DomainError("card_lb: t must be at least 1");
                 },
                 [](const UserCount& x) {
                   if (x.coef <= 0) throw DomainError("user_count: coefficient must be positive");
                 },
                 [](const CustomConstraint& x) {
                   if (!x.weight) throw DomainError("custom constraint '" + x.label + "' has no weight function");
                 },
             },
             c);
}

// ---------------------------------------------------------------------------
// Relation-level evaluation

namespace {

std::size_t intersection_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

std::size_t difference_size(const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
  std::vector<std::size_t> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out.size();
}

Weight user_count_penalty(const UserCount& x, std::int64_t z) {
  if (x.shape == UserCount::Shape::linear) return checked_mul(x.coef, z);
  return checked_mul(x.coef, checked_mul(z, z));
}

std::int64_t as_int(std::size_t v) { return static_cast<std::int64_t>(v); }

}  // namespace

Weight eval_relation(const WeightedConstraint& c, const AuthorizationRelation& a, int k) {
  validate_constraint(c, k);
  return std::visit(
      overloaded{
          [&](const SodU& x) { return x.f(as_int(intersection_size(a.users_of(x.r1), a.users_of(x.r2)))); },
          [&](const BodU& x) {
            const auto s1 = a.users_of(x.r1);
            const auto s2 = a.users_of(x.r2);
            return x.f(as_int(std::max(difference_size(s1, s2), difference_size(s2, s1))));
          },
          [&](const SodE& x) { return a.users_of(x.r1) == a.users_of(x.r2) ? x.ell : Weight{0}; },
          [&](const BodE& x) {
            return intersection_size(a.users_of(x.r1), a.users_of(x.r2)) == 0 ? x.ell : Weight{0};
          },
          [&](const CardUB& x) { return x.f(as_int(a.users_of(x.r).size()) - x.t); },
          [&](const CardLB& x) { return x.f(x.t - as_int(a.users_of(x.r).size())); },
          [&](const UserCount& x) { return user_count_penalty(x, as_int(a.active_user_count())); },
          [&](const CustomConstraint& x) { return x.weight(profile_of(a, k)); },
      },
      c);
}

// ---------------------------------------------------------------------------
// Profile-level evaluation

void ProfileAggregates::add(ResourceSet t, std::int64_t copies) {
  if (copies == 0) return;
  if (t != 0) active += copies;
  for (int r = 0; r < k; ++r) {
    if (!contains(t, r)) continue;
    degree[static_cast<std::size_t>(r)] += copies;
    for (int s = 0; s < k; ++s) {
      if (contains(t, s)) intersection[static_cast<std::size_t>(r * k + s)] += copies;
    }
  }
}

ProfileAggregates aggregates_of(const UserProfile& usr) {
  ProfileAggregates agg(usr.resource_count());
  for (const auto& [t, c] : usr.entries()) agg.add(t, static_cast<std::int64_t>(c));
  return agg;
}

Weight eval_aggregates(const WeightedConstraint& c, const ProfileAggregates& agg, const UserProfile* usr) {
  auto deg = [&](int r) { return agg.degree[static_cast<std::size_t>(r)]; };
  return std::visit(overloaded{
                        [&](const SodU& x) { return x.f(agg.inter(x.r1, x.r2)); },
                        [&](const BodU& x) {
                          const auto common = agg.inter(x.r1, x.r2);
                          return x.f(std::max(deg(x.r1) - common, deg(x.r2) - common));
                        },
                        [&](const SodE& x) {
                          const auto common = agg.inter(x.r1, x.r2);
                          return deg(x.r1) == common && deg(x.r2) == common ? x.ell : Weight{0};
                        },
                        [&](const BodE& x) { return agg.inter(x.r1, x.r2) >= 1 ? Weight{0} : x.ell; },
                        [&](const CardUB& x) { return x.f(deg(x.r) - x.t); },
                        [&](const CardLB& x) { return x.f(x.t - deg(x.r)); },
                        [&](const UserCount& x) { return user_count_penalty(x, agg.active); },
                        [&](const CustomConstraint& x) {
                          if (usr == nullptr) throw DomainError("custom constraint evaluation needs the full profile");
                          return x.weight(*usr);
                        },
                    },
                    c);
}

Weight eval_profile(const WeightedConstraint& c, const UserProfile& usr) {
  validate_constraint(c, usr.resource_count());
  return eval_aggregates(c, aggregates_of(usr), &usr);
}

// ---------------------------------------------------------------------------
// User cap

std::size_t wbound_suggestion(const std::vector<WeightedConstraint>& constraints, int k, std::size_t n) {
  bool table1_only = true;
  bool sod_card_usercount_only = true;
  bool has_quadratic_user_count = false;
  Weight user_count_coef = 0;
  Weight card_slope_sum = 0;
  std::int64_t tau = 1;

  for (const auto& c : constraints) {
    std::visit(overloaded{
                   [&](const SodU&) {},
                   [&](const CardLB& x) {
                     tau = std::max<std::int64_t>(tau, x.t);
                     if (x.f.is_linear()) {
                       card_slope_sum = checked_add(card_slope_sum, x.f.slope());
                     } else {
                       sod_card_usercount_only = false;
                     }
                   },
                   [&](const UserCount& x) {
                     table1_only = false;
                     if (x.shape != UserCount::Shape::quadratic || has_quadratic_user_count) {
                       sod_card_usercount_only = false;
                     }
                     has_quadratic_user_count = true;
                     user_count_coef = x.coef;
                   },
                   [&](const CustomConstraint&) {
                     table1_only = false;
                     sod_card_usercount_only = false;
                   },
                   [&](const auto&) { sod_card_usercount_only = false; },
               },
               c);
  }

  const std::size_t floor_cap = std::min<std::size_t>(static_cast<std::size_t>(k), n);
  auto clamp = [&](std::uint64_t cap) {
    return static_cast<std::size_t>(std::clamp<std::uint64_t>(cap, floor_cap, n));
  };

  if (has_quadratic_user_count && sod_card_usercount_only) {
    // ⌈0.5 (S / coef + 1)⌉ = ⌈(S + coef) / (2 coef)⌉ with S = Σ p_Card.
    const auto num = static_cast<std::uint64_t>(checked_add(card_slope_sum, user_count_coef));
    const auto den = static_cast<std::uint64_t>(2 * user_count_coef);
    return clamp((num + den - 1) / den);
  }
  if (table1_only) {
    const std::uint64_t pairs = static_cast<std::uint64_t>(k) * static_cast<std::uint64_t>(k - 1) / 2;
    const std::uint64_t bound = std::max<std::uint64_t>(3 * static_cast<std::uint64_t>(tau) * pairs,
                                                        static_cast<std::uint64_t>(tau));
    return clamp(bound);
  }
  return n;
}

}  // namespace vapep

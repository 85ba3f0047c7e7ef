#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vapep/model.hpp"

namespace vapep {

enum class VarKind { binary, continuous };
enum class Sense { le, eq, ge };

struct Variable {
  std::string name;
  VarKind kind = VarKind::continuous;
  Weight lower = 0;
  std::optional<Weight> upper;  ///< none means +inf
};

struct Term {
  std::size_t var = 0;
  Weight coef = 0;
};

struct LinearConstraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::ge;
  Weight rhs = 0;
};

/// Solver-agnostic minimisation model with integer data.
class Formulation {
 public:
  /// Throws DomainError on a duplicate name.
  std::size_t add_variable(std::string name, VarKind kind, Weight lower = 0, std::optional<Weight> upper = {});
  void add_constraint(LinearConstraint row);
  void add_objective(std::size_t var, Weight coef);

  std::optional<std::size_t> find(std::string_view name) const;
  std::size_t index_of(std::string_view name) const;

  const std::vector<Variable>& variables() const { return variables_; }
  std::vector<Variable>& variables() { return variables_; }
  const std::vector<LinearConstraint>& constraints() const { return rows_; }
  const std::vector<Term>& objective() const { return objective_; }

  std::size_t count(VarKind kind) const;
  /// Variables whose name starts with `prefix`.
  std::size_t count_prefix(std::string_view prefix) const;

 private:
  std::vector<Variable> variables_;
  std::unordered_map<std::string, std::size_t> by_name_;
  std::vector<LinearConstraint> rows_;
  std::vector<Term> objective_;
};

/// Binary x_r{i}_u{j} per (resource, user). Supports SoD_U, CardLB and
/// CardUB with linear penalties and UserCount; throws DomainError otherwise
/// or for a custom authorization cost.
Formulation build_naive(const Instance& inst);

inline constexpr std::size_t kMaxUpVariables = 10'000'000;

/// Binary xT{mask}_u{j} per (subset, user) with one subset per user. Same
/// families as build_naive; throws GuardError when 2^k · n exceeds
/// kMaxUpVariables.
Formulation build_up(const Instance& inst);

/// Cut offsets of the z^2 envelope for n users: i ∈ [1, n-1], plus i = 0
/// when n = 1 so z = 1 is still tight.
std::vector<std::int64_t> parabola_cut_indices(std::size_t n);

/// max(0, max_i (2i+1)z − (i+1)i) over parabola_cut_indices(n).
std::int64_t parabola_envelope(std::size_t n, std::int64_t z);

/// Objective at the point where x follows A (x_r{i}_u{j} = 1 iff r_i ∈ A(u_j);
/// xT{m}_u{j} = 1 iff A(u_j) = m) and every other variable takes its least
/// value allowed by the rows, read in order with the first term as the
/// dependent variable. Throws std::logic_error if the point is infeasible.
Weight eval_at(const Formulation& f, const AuthorizationRelation& a);

/// LP text: Minimize / Subject To / Bounds / Binary / End. Rows keep
/// insertion order; Bounds and Binary list variables sorted by name.
std::string export_lp(const Formulation& f);

/// Reads the subset of the LP format export_lp writes, plus comments and the
/// usual section aliases. Throws DomainError on bad input.
Formulation parse_lp(std::string_view text);

}  // namespace vapep

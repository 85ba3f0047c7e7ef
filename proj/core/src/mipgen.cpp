#include "vapep/mipgen.hpp"

#include <algorithm>
#include <charconv>
#include <stdexcept>

namespace vapep {

std::size_t Formulation::add_variable(std::string name, VarKind kind, Weight lower, std::optional<Weight> upper) {
  if (by_name_.count(name)) throw DomainError("formulation: duplicate variable " + name);
  if (kind == VarKind::binary) {
    lower = 0;
    upper = 1;
  }
  const std::size_t id = variables_.size();
  by_name_.emplace(name, id);
  variables_.push_back(Variable{std::move(name), kind, lower, upper});
  return id;
}

void Formulation::add_constraint(LinearConstraint row) {
  for (const Term& t : row.terms) {
    if (t.var >= variables_.size()) throw DomainError("formulation: row " + row.name + " uses an undeclared variable");
  }
  rows_.push_back(std::move(row));
}

void Formulation::add_objective(std::size_t var, Weight coef) {
  if (var >= variables_.size()) throw DomainError("formulation: objective uses an undeclared variable");
  objective_.push_back(Term{var, coef});
}

std::optional<std::size_t> Formulation::find(std::string_view name) const {
  const auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

std::size_t Formulation::index_of(std::string_view name) const {
  const auto id = find(name);
  if (!id) throw DomainError("formulation: unknown variable " + std::string(name));
  return *id;
}

std::size_t Formulation::count(VarKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(variables_.begin(), variables_.end(), [&](const Variable& v) { return v.kind == kind; }));
}

std::size_t Formulation::count_prefix(std::string_view prefix) const {
  return static_cast<std::size_t>(std::count_if(variables_.begin(), variables_.end(), [&](const Variable& v) {
    return std::string_view(v.name).substr(0, prefix.size()) == prefix;
  }));
}

std::vector<std::int64_t> parabola_cut_indices(std::size_t n) {
  std::vector<std::int64_t> out;
  if (n == 1) out.push_back(0);
  for (std::size_t i = 1; i < n; ++i) out.push_back(static_cast<std::int64_t>(i));
  return out;
}

std::int64_t parabola_envelope(std::size_t n, std::int64_t z) {
  std::int64_t best = 0;
  for (std::int64_t i : parabola_cut_indices(n)) best = std::max(best, (2 * i + 1) * z - (i + 1) * i);
  return best;
}

namespace {

std::string user_tag(std::size_t u) { return "_u" + std::to_string(u); }

void require_supported(const Instance& inst) {
  if (inst.auth().is_custom()) throw DomainError("mip formulation: custom authorization costs are not supported");
  for (const auto& c : inst.constraints()) {
    const bool ok = std::visit(
        [](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, SodU> || std::is_same_v<T, CardLB> || std::is_same_v<T, CardUB>) {
            return x.f.is_linear();
          } else {
            return std::is_same_v<T, UserCount>;
          }
        },
        c);
    if (!ok) throw DomainError("mip formulation: unsupported constraint " + family_name(c));
  }
}

/// Shared constraint encodings; the two formulations differ only in how a
/// resource or a resource pair is counted and in the SoD row shape.
class Builder {
 public:
  Builder(const Instance& inst, bool profile_form) : inst_(inst), up_(profile_form) {}

  Formulation build() {
    require_supported(inst_);
    const std::size_t n = inst_.n();
    const int k = inst_.k();
    if (up_) {
      const std::size_t subsets = std::size_t{1} << k;
      if (k > 23 || subsets * n > kMaxUpVariables) {
        throw GuardError("UP formulation: 2^" + std::to_string(k) + " * " + std::to_string(n) +
                         " variables exceeds the bound 10^7");
      }
      x_.resize(subsets);
      for (ResourceSet t = 0; t < subsets; ++t) {
        for (std::size_t u = 0; u < n; ++u) {
          x_[t].push_back(f_.add_variable("xT" + std::to_string(t) + user_tag(u), VarKind::binary));
        }
      }
    } else {
      x_.resize(static_cast<std::size_t>(k));
      for (int r = 0; r < k; ++r) {
        for (std::size_t u = 0; u < n; ++u) {
          x_[static_cast<std::size_t>(r)].push_back(
              f_.add_variable("x_r" + std::to_string(r) + user_tag(u), VarKind::binary));
        }
      }
    }

    const auto& cons = inst_.constraints();
    for (std::size_t ci = 0; ci < cons.size(); ++ci) {
      const std::size_t p = f_.add_variable("p_c" + std::to_string(ci), VarKind::continuous, 0);
      f_.add_objective(p, 1);
      std::visit([&](const auto& x) { encode(ci, p, x); }, cons[ci]);
    }
    if (up_) {
      for (std::size_t u = 0; u < n; ++u) {
        LinearConstraint row{"one" + user_tag(u), {}, Sense::eq, 1};
        for (const auto& col : x_) row.terms.push_back(Term{col[u], 1});
        f_.add_constraint(std::move(row));
      }
    }
    add_authorization_objective();
    return std::move(f_);
  }

 private:
  /// Terms counting the users that hold every resource in `need`.
  std::vector<Term> holders(ResourceSet need, Weight coef) const {
    std::vector<Term> out;
    if (up_) {
      for (ResourceSet t = 0; t < x_.size(); ++t) {
        if ((t & need) != need) continue;
        for (std::size_t v : x_[t]) out.push_back(Term{v, coef});
      }
    } else {
      const int r = std::countr_zero(need);
      for (std::size_t v : x_[static_cast<std::size_t>(r)]) out.push_back(Term{v, coef});
    }
    return out;
  }

  static ResourceSet bit(int r) { return ResourceSet{1} << r; }
  std::string cname(std::size_t ci) const { return "c" + std::to_string(ci); }

  void encode(std::size_t ci, std::size_t p, const SodU& c) {
    const Weight slope = c.f.slope();
    LinearConstraint row{"sod_" + cname(ci), {Term{p, 1}}, Sense::eq, 0};
    if (up_) {
      for (Term t : holders(bit(c.r1) | bit(c.r2), -slope)) row.terms.push_back(t);
    } else {
      for (std::size_t u = 0; u < inst_.n(); ++u) {
        const std::size_t y = f_.add_variable("y_" + cname(ci) + user_tag(u), VarKind::binary);
        f_.add_constraint(LinearConstraint{"sod_" + cname(ci) + user_tag(u),
                                           {Term{y, 1}, Term{x_[static_cast<std::size_t>(c.r1)][u], -1},
                                            Term{x_[static_cast<std::size_t>(c.r2)][u], -1}},
                                           Sense::ge,
                                           -1});
        row.terms.push_back(Term{y, -slope});
      }
    }
    f_.add_constraint(std::move(row));
  }

  void encode(std::size_t ci, std::size_t p, const CardLB& c) {
    const Weight slope = c.f.slope();
    LinearConstraint row{"card_" + cname(ci), {Term{p, 1}}, Sense::ge, checked_mul(slope, c.t)};
    for (Term t : holders(bit(c.r), slope)) row.terms.push_back(t);
    f_.add_constraint(std::move(row));
  }

  void encode(std::size_t ci, std::size_t p, const CardUB& c) {
    const Weight slope = c.f.slope();
    LinearConstraint row{"card_" + cname(ci), {Term{p, 1}}, Sense::ge, -checked_mul(slope, c.t)};
    for (Term t : holders(bit(c.r), -slope)) row.terms.push_back(t);
    f_.add_constraint(std::move(row));
  }

  void encode(std::size_t ci, std::size_t p, const UserCount& c) {
    const std::size_t z = user_count_variable();
    if (c.shape == UserCount::Shape::linear) {
      f_.add_constraint(LinearConstraint{"uc_" + cname(ci), {Term{p, 1}, Term{z, -c.coef}}, Sense::ge, 0});
      return;
    }
    for (std::int64_t i : parabola_cut_indices(inst_.n())) {
      f_.add_constraint(LinearConstraint{"uc_" + cname(ci) + "_i" + std::to_string(i),
                                         {Term{p, 1}, Term{z, -checked_mul(c.coef, 2 * i + 1)}},
                                         Sense::ge,
                                         -checked_mul(c.coef, (i + 1) * i)});
    }
  }

  void encode(std::size_t, std::size_t, const BodU&) { unsupported(); }
  void encode(std::size_t, std::size_t, const SodE&) { unsupported(); }
  void encode(std::size_t, std::size_t, const BodE&) { unsupported(); }
  void encode(std::size_t, std::size_t, const CustomConstraint&) { unsupported(); }
  [[noreturn]] static void unsupported() { throw DomainError("mip formulation: unsupported constraint"); }

  /// y_u >= x for every x of u holding something, z = Σ y_u. Built once.
  std::size_t user_count_variable() {
    if (z_) return *z_;
    const std::size_t n = inst_.n();
    std::vector<std::size_t> y;
    for (std::size_t u = 0; u < n; ++u) {
      y.push_back(f_.add_variable("y" + user_tag(u), VarKind::continuous, 0, 1));
    }
    for (std::size_t col = 0; col < x_.size(); ++col) {
      if (up_ && col == 0) continue;  // the empty subset activates nobody
      const std::string tag = up_ ? "uc_T" + std::to_string(col) : "uc_r" + std::to_string(col);
      for (std::size_t u = 0; u < n; ++u) {
        f_.add_constraint(LinearConstraint{tag + user_tag(u), {Term{y[u], 1}, Term{x_[col][u], -1}}, Sense::ge, 0});
      }
    }
    z_ = f_.add_variable("z", VarKind::continuous, 0, static_cast<Weight>(n));
    LinearConstraint row{"uc_z", {Term{*z_, 1}}, Sense::eq, 0};
    for (std::size_t v : y) row.terms.push_back(Term{v, -1});
    f_.add_constraint(std::move(row));
    return *z_;
  }

  void add_authorization_objective() {
    const AuthCost& auth = inst_.auth();
    for (std::size_t col = 0; col < x_.size(); ++col) {
      for (std::size_t u = 0; u < inst_.n(); ++u) {
        const Weight c = up_ ? auth.omega(u, static_cast<ResourceSet>(col))
                             : auth.omega(u, bit(static_cast<int>(col)));
        if (c > 0) f_.add_objective(x_[col][u], c);
      }
    }
  }

  const Instance& inst_;
  bool up_;
  Formulation f_;
  std::vector<std::vector<std::size_t>> x_;  // [resource or subset][user]
  std::optional<std::size_t> z_;
};

/// Parses "<prefix><a>_u<b>" and returns (a, b).
std::optional<std::pair<std::size_t, std::size_t>> split_x_name(std::string_view name, std::string_view prefix) {
  if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
  name.remove_prefix(prefix.size());
  const auto sep = name.find("_u");
  if (sep == std::string_view::npos || sep == 0) return std::nullopt;
  std::size_t a = 0;
  std::size_t b = 0;
  const auto ra = std::from_chars(name.data(), name.data() + sep, a);
  const auto rb = std::from_chars(name.data() + sep + 2, name.data() + name.size(), b);
  if (ra.ec != std::errc() || ra.ptr != name.data() + sep) return std::nullopt;
  if (rb.ec != std::errc() || rb.ptr != name.data() + name.size() || sep + 2 == name.size()) return std::nullopt;
  return std::make_pair(a, b);
}

Weight floor_div(Weight a, Weight b) {
  Weight q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

Weight ceil_div(Weight a, Weight b) { return -floor_div(-a, b); }

}  // namespace

Formulation build_naive(const Instance& inst) { return Builder(inst, false).build(); }

Formulation build_up(const Instance& inst) { return Builder(inst, true).build(); }

Weight eval_at(const Formulation& f, const AuthorizationRelation& a) {
  const auto& vars = f.variables();
  std::vector<Weight> value(vars.size(), 0);
  std::vector<char> fixed(vars.size(), 0);
  for (std::size_t i = 0; i < vars.size(); ++i) {
    value[i] = vars[i].lower;
    if (auto p = split_x_name(vars[i].name, "x_r")) {
      if (p->second >= a.user_count()) throw DomainError("eval_at: relation has fewer users than the formulation");
      value[i] = contains(a.of_user(p->second), static_cast<int>(p->first)) ? 1 : 0;
      fixed[i] = 1;
    } else if (auto q = split_x_name(vars[i].name, "xT")) {
      if (q->second >= a.user_count()) throw DomainError("eval_at: relation has fewer users than the formulation");
      value[i] = a.of_user(q->second) == q->first ? 1 : 0;
      fixed[i] = 1;
    }
  }

  auto lhs_without = [&](const LinearConstraint& row, std::size_t skip) {
    Weight s = 0;
    for (std::size_t t = 0; t < row.terms.size(); ++t) {
      if (t != skip) s = checked_add(s, row.terms[t].coef * value[row.terms[t].var]);
    }
    return s;
  };

  for (const auto& row : f.constraints()) {
    if (row.terms.empty()) continue;
    const Term lead = row.terms.front();
    if (fixed[lead.var] || lead.coef == 0) continue;
    const Weight rest = lhs_without(row, 0);
    const Weight need = row.rhs - rest;
    if (row.sense == Sense::eq) {
      if (need % lead.coef != 0) throw std::logic_error("eval_at: row " + row.name + " has no integral solution");
      value[lead.var] = need / lead.coef;
    } else if ((row.sense == Sense::ge) == (lead.coef > 0)) {
      const Weight bound = lead.coef > 0 ? ceil_div(need, lead.coef) : floor_div(need, lead.coef);
      value[lead.var] = lead.coef > 0 ? std::max(value[lead.var], bound) : std::min(value[lead.var], bound);
    }
  }

  for (std::size_t i = 0; i < vars.size(); ++i) {
    if (value[i] < vars[i].lower || (vars[i].upper && value[i] > *vars[i].upper)) {
      throw std::logic_error("eval_at: variable " + vars[i].name + " = " + std::to_string(value[i]) +
                             " is outside its bounds");
    }
  }
  for (const auto& row : f.constraints()) {
    const Weight lhs = lhs_without(row, row.terms.size());
    const bool ok = row.sense == Sense::eq ? lhs == row.rhs : row.sense == Sense::ge ? lhs >= row.rhs : lhs <= row.rhs;
    if (!ok) throw std::logic_error("eval_at: row " + row.name + " is violated");
  }
  Weight obj = 0;
  for (const Term& t : f.objective()) obj = checked_add(obj, checked_mul(t.coef, value[t.var]));
  return obj;
}

}  // namespace vapep

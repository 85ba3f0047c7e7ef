#include "vapep/json_io.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace vapep {

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) { throw DomainError(where + ": " + what); }

void allow_keys(const Json& obj, std::initializer_list<const char*> keys, const std::string& where) {
  if (!obj.is_object()) fail(where, "expected an object");
  const std::set<std::string> ok(keys.begin(), keys.end());
  for (const auto& [key, _] : obj.items()) {
    if (!ok.count(key)) fail(where, "unknown field '" + key + "'");
  }
}

const Json& need(const Json& obj, const char* key, const std::string& where) {
  if (!obj.contains(key)) fail(where, std::string("missing field '") + key + "'");
  return obj.at(key);
}

std::int64_t as_int(const Json& v, const std::string& where) {
  if (!v.is_number_integer()) fail(where, "expected an integer");
  return v.get<std::int64_t>();
}

std::string as_string(const Json& v, const std::string& where) {
  if (!v.is_string()) fail(where, "expected a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const Json& v, const std::string& where) {
  if (!v.is_array()) fail(where, "expected an array of strings");
  std::vector<std::string> out;
  for (const auto& e : v) out.push_back(as_string(e, where));
  return out;
}

/// int slope, or {"values": [...], "tail_slope": int}.
PenaltySpec penalty_from_json(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return PenaltySpec::linear(v.get<Weight>());
  allow_keys(v, {"values", "tail_slope"}, where);
  const Json& vals = need(v, "values", where);
  if (!vals.is_array()) fail(where, "penalty values must be an array");
  std::vector<Weight> table;
  for (const auto& e : vals) table.push_back(as_int(e, where));
  const Weight tail = v.contains("tail_slope") ? as_int(v.at("tail_slope"), where) : 1;
  return PenaltySpec::table(std::move(table), tail);
}

Json penalty_to_json(const PenaltySpec& f) {
  if (f.is_linear()) return f.slope();
  Json j = Json::object();
  j["values"] = f.table_values();
  j["tail_slope"] = f.slope();
  return j;
}

/// "penalty" or its alias "slope"; linear(1) when absent.
PenaltySpec penalty_field(const Json& c, const std::string& where) {
  if (c.contains("penalty") && c.contains("slope")) fail(where, "give either 'penalty' or 'slope', not both");
  if (c.contains("penalty")) return penalty_from_json(c.at("penalty"), where);
  if (c.contains("slope")) {
    if (!c.at("slope").is_number_integer()) fail(where, "'slope' must be an integer");
    return PenaltySpec::linear(c.at("slope").get<Weight>());
  }
  return PenaltySpec::linear(1);
}

using NameIndex = std::function<int(const std::string&)>;

std::vector<int> scope_of(const Json& c, std::size_t arity, const NameIndex& index, const std::string& where) {
  const auto names = string_list(need(c, "scope", where), where + ".scope");
  if (names.size() != arity) fail(where, "scope must list " + std::to_string(arity) + " entries");
  std::vector<int> out;
  for (const auto& name : names) out.push_back(index(name));
  return out;
}

WeightedConstraint constraint_from_json(const Json& c, const NameIndex& index, const std::string& where) {
  if (!c.is_object()) fail(where, "expected an object");
  const std::string type = as_string(need(c, "type", where), where + ".type");
  if (type == "sod_u" || type == "bod_u") {
    allow_keys(c, {"type", "scope", "penalty", "slope"}, where);
    const auto s = scope_of(c, 2, index, where);
    const auto f = penalty_field(c, where);
    if (type == "sod_u") return SodU{s[0], s[1], f};
    return BodU{s[0], s[1], f};
  }
  if (type == "sod_e" || type == "bod_e") {
    allow_keys(c, {"type", "scope", "ell"}, where);
    const auto s = scope_of(c, 2, index, where);
    const Weight ell = c.contains("ell") ? as_int(c.at("ell"), where + ".ell") : 1;
    if (type == "sod_e") return SodE{s[0], s[1], ell};
    return BodE{s[0], s[1], ell};
  }
  if (type == "card_ub" || type == "card_lb") {
    allow_keys(c, {"type", "scope", "t", "penalty", "slope"}, where);
    const auto s = scope_of(c, 1, index, where);
    const auto t = static_cast<int>(as_int(need(c, "t", where), where + ".t"));
    const auto f = penalty_field(c, where);
    if (type == "card_ub") return CardUB{s[0], t, f};
    return CardLB{s[0], t, f};
  }
  if (type == "user_count") {
    allow_keys(c, {"type", "scope", "penalty", "slope"}, where);
    if (c.contains("scope") && !(c.at("scope").is_array() && c.at("scope").empty())) {
      fail(where, "user_count takes no scope");
    }
    if (c.contains("penalty") && c.contains("slope")) fail(where, "give either 'penalty' or 'slope', not both");
    if (c.contains("slope")) return UserCount{UserCount::Shape::linear, as_int(c.at("slope"), where + ".slope")};
    const Weight coef = c.contains("penalty") ? as_int(c.at("penalty"), where + ".penalty") : 1;
    return UserCount{UserCount::Shape::quadratic, coef};
  }
  fail(where, "unknown constraint type '" + type + "'");
}

Json constraint_to_json(const WeightedConstraint& c, const std::vector<std::string>& names) {
  Json j = Json::object();
  j["type"] = family_name(c);
  auto name = [&](int r) { return names.at(static_cast<std::size_t>(r)); };
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, SodU> || std::is_same_v<T, BodU>) {
          j["scope"] = {name(x.r1), name(x.r2)};
          j["penalty"] = penalty_to_json(x.f);
        } else if constexpr (std::is_same_v<T, SodE> || std::is_same_v<T, BodE>) {
          j["scope"] = {name(x.r1), name(x.r2)};
          j["ell"] = x.ell;
        } else if constexpr (std::is_same_v<T, CardUB> || std::is_same_v<T, CardLB>) {
          j["scope"] = Json::array({name(x.r)});
          j["t"] = x.t;
          j["penalty"] = penalty_to_json(x.f);
        } else if constexpr (std::is_same_v<T, UserCount>) {
          if (x.shape == UserCount::Shape::linear) {
            j["slope"] = x.coef;
          } else {
            j["penalty"] = x.coef;
          }
        } else {
          throw DomainError("custom constraint '" + x.label + "' has no file representation");
        }
      },
      c);
  return j;
}

/// {"pairs": [[user, item]], "pair_penalty": int | matrix}.
AuthCost auth_from_json(const Json& a, const std::vector<std::string>& users, const NameIndex& item_index,
                        std::size_t items, const std::string& where) {
  allow_keys(a, {"pairs", "pair_penalty"}, where);
  std::vector<ResourceSet> base(users.size(), 0);
  std::map<std::string, std::size_t> user_pos;
  for (std::size_t u = 0; u < users.size(); ++u) user_pos[users[u]] = u;
  if (a.contains("pairs")) {
    const Json& pairs = a.at("pairs");
    if (!pairs.is_array()) fail(where + ".pairs", "expected an array");
    for (const auto& p : pairs) {
      const auto pr = string_list(p, where + ".pairs");
      if (pr.size() != 2) fail(where + ".pairs", "each pair is [user, item]");
      const auto it = user_pos.find(pr[0]);
      if (it == user_pos.end()) fail(where + ".pairs", "unknown user '" + pr[0] + "'");
      base[it->second] |= ResourceSet{1} << item_index(pr[1]);
    }
  }
  if (!a.contains("pair_penalty")) return AuthCost(base, 1);
  const Json& pen = a.at("pair_penalty");
  if (pen.is_number_integer()) return AuthCost(base, pen.get<Weight>());
  if (!pen.is_array() || pen.size() != users.size()) fail(where + ".pair_penalty", "matrix must have one row per user");
  std::vector<std::vector<Weight>> m;
  for (const auto& row : pen) {
    if (!row.is_array() || row.size() != items) fail(where + ".pair_penalty", "matrix rows must have one entry per item");
    std::vector<Weight> r;
    for (const auto& e : row) r.push_back(as_int(e, where + ".pair_penalty"));
    m.push_back(std::move(r));
  }
  return AuthCost(base, std::move(m));
}

Json auth_to_json(const AuthCost& auth, const std::vector<std::string>& users, const std::vector<std::string>& items) {
  if (auth.is_custom()) throw DomainError("custom authorization costs have no file representation");
  Json j = Json::object();
  Json pairs = Json::array();
  for (std::size_t u = 0; u < users.size(); ++u) {
    for (std::size_t r = 0; r < items.size(); ++r) {
      if (contains(auth.base(u), static_cast<int>(r))) pairs.push_back({users[u], items[r]});
    }
  }
  j["pairs"] = std::move(pairs);
  if (auth.has_matrix()) {
    j["pair_penalty"] = auth.matrix();
  } else {
    j["pair_penalty"] = auth.uniform_penalty();
  }
  return j;
}

template <class F>
auto guarded(F&& fn) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("json: ") + e.what());
  }
}

}  // namespace

Json parse_json(const std::string& text) {
  return guarded([&] { return Json::parse(text); });
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json(buf.str());
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

Instance instance_from_json(const Json& j) {
  return guarded([&] {
    allow_keys(j, {"resources", "users", "auth", "constraints", "meta"}, "instance");
    auto resources = string_list(need(j, "resources", "instance"), "instance.resources");
    auto users = string_list(need(j, "users", "instance"), "instance.users");
    std::map<std::string, int> res_pos;
    for (std::size_t r = 0; r < resources.size(); ++r) res_pos[resources[r]] = static_cast<int>(r);
    NameIndex index = [&](const std::string& name) {
      const auto it = res_pos.find(name);
      if (it == res_pos.end()) throw DomainError("unknown resource '" + name + "'");
      return it->second;
    };
    if (resources.size() > static_cast<std::size_t>(kMaxResources)) fail("instance", "at most 30 resources");
    AuthCost auth = j.contains("auth") ? auth_from_json(j.at("auth"), users, index, resources.size(), "instance.auth")
                                       : AuthCost(std::vector<ResourceSet>(users.size(), 0), 1);
    std::vector<WeightedConstraint> cons;
    if (j.contains("constraints")) {
      const Json& list = j.at("constraints");
      if (!list.is_array()) fail("instance.constraints", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        cons.push_back(constraint_from_json(list[i], index, "instance.constraints[" + std::to_string(i) + "]"));
      }
    }
    return Instance(std::move(users), std::move(resources), std::move(cons), std::move(auth));
  });
}

Json instance_to_json(const Instance& inst, const std::optional<Json>& meta) {
  Json j = Json::object();
  j["resources"] = inst.resources();
  j["users"] = inst.users();
  j["auth"] = auth_to_json(inst.auth(), inst.users(), inst.resources());
  Json cons = Json::array();
  for (const auto& c : inst.constraints()) cons.push_back(constraint_to_json(c, inst.resources()));
  j["constraints"] = std::move(cons);
  if (meta) j["meta"] = *meta;
  return j;
}

namespace {

/// {user: [items]} over the given names.
std::vector<ResourceSet> assignment_from_json(const Json& a, const std::function<std::size_t(const std::string&)>& user,
                                              const NameIndex& item, std::size_t n, const std::string& where) {
  if (!a.is_object()) fail(where, "expected an object of user -> [items]");
  std::vector<ResourceSet> sets(n, 0);
  for (const auto& [name, list] : a.items()) {
    const std::size_t u = user(name);
    for (const auto& r : string_list(list, where + "." + name)) sets[u] |= ResourceSet{1} << item(r);
  }
  return sets;
}

}  // namespace

AuthorizationRelation relation_from_json(const Instance& inst, const Json& j, bool allow_extra) {
  return guarded([&] {
    if (!allow_extra) allow_keys(j, {"assignment"}, "relation");
    const auto sets = assignment_from_json(
        need(j, "assignment", "relation"), [&](const std::string& s) { return inst.user_index(s); },
        [&](const std::string& s) { return inst.resource_index(s); }, inst.n(), "relation.assignment");
    return AuthorizationRelation(sets);
  });
}

Json relation_to_json(const Instance& inst, const AuthorizationRelation& a) {
  Json per_user = Json::object();
  for (std::size_t u = 0; u < a.user_count(); ++u) {
    const ResourceSet s = a.of_user(u);
    if (s == 0) continue;
    Json list = Json::array();
    for (int r = 0; r < inst.k(); ++r) {
      if (contains(s, r)) list.push_back(inst.resources()[static_cast<std::size_t>(r)]);
    }
    per_user[inst.users()[u]] = std::move(list);
  }
  Json j = Json::object();
  j["assignment"] = std::move(per_user);
  return j;
}

WspInstance wsp_from_json(const Json& j) {
  return guarded([&] {
    allow_keys(j, {"steps", "users", "auth", "constraints", "meta"}, "wsp");
    auto steps = string_list(need(j, "steps", "wsp"), "wsp.steps");
    auto users = string_list(need(j, "users", "wsp"), "wsp.users");
    if (steps.size() > static_cast<std::size_t>(kMaxResources)) fail("wsp", "at most 30 steps");
    std::map<std::string, int> pos;
    for (std::size_t s = 0; s < steps.size(); ++s) pos[steps[s]] = static_cast<int>(s);
    NameIndex index = [&](const std::string& name) {
      const auto it = pos.find(name);
      if (it == pos.end()) throw DomainError("unknown step '" + name + "'");
      return it->second;
    };
    AuthCost auth = j.contains("auth") ? auth_from_json(j.at("auth"), users, index, steps.size(), "wsp.auth")
                                       : AuthCost(std::vector<ResourceSet>(users.size(), 0), 1);
    std::vector<WspConstraint> cons;
    if (j.contains("constraints")) {
      const Json& list = j.at("constraints");
      if (!list.is_array()) fail("wsp.constraints", "expected an array");
      for (std::size_t i = 0; i < list.size(); ++i) {
        const std::string where = "wsp.constraints[" + std::to_string(i) + "]";
        const Json& c = list[i];
        if (!c.is_object()) fail(where, "expected an object");
        const std::string type = as_string(need(c, "type", where), where + ".type");
        if (type == "must_differ" || type == "must_equal") {
          allow_keys(c, {"type", "scope", "penalty"}, where);
          const auto s = scope_of(c, 2, index, where);
          const Weight p = c.contains("penalty") ? as_int(c.at("penalty"), where + ".penalty") : 1;
          if (type == "must_differ") {
            cons.push_back(MustDiffer{s[0], s[1], p});
          } else {
            cons.push_back(MustEqual{s[0], s[1], p});
          }
        } else if (type == "disjoint_sets") {
          allow_keys(c, {"type", "left", "right", "penalty", "slope"}, where);
          DisjointSets d;
          for (const auto& s : string_list(need(c, "left", where), where + ".left")) d.left.push_back(index(s));
          for (const auto& s : string_list(need(c, "right", where), where + ".right")) d.right.push_back(index(s));
          d.f = penalty_field(c, where);
          cons.push_back(std::move(d));
        } else {
          fail(where, "unknown wsp constraint type '" + type + "'");
        }
      }
    }
    return WspInstance(std::move(steps), std::move(users), std::move(cons), std::move(auth));
  });
}

Json wsp_to_json(const WspInstance& w, const std::optional<Json>& meta) {
  if (!w.has_identity_groups()) throw DomainError("only WSP instances that authorize steps directly can be written");
  Json j = Json::object();
  j["steps"] = w.steps();
  j["users"] = w.users();
  j["auth"] = auth_to_json(w.auth(), w.users(), w.steps());
  Json cons = Json::array();
  auto name = [&](int s) { return w.steps().at(static_cast<std::size_t>(s)); };
  for (const auto& c : w.constraints()) {
    Json e = Json::object();
    if (const auto* d = std::get_if<MustDiffer>(&c)) {
      e["type"] = "must_differ";
      e["scope"] = {name(d->s1), name(d->s2)};
      e["penalty"] = d->penalty;
    } else if (const auto* q = std::get_if<MustEqual>(&c)) {
      e["type"] = "must_equal";
      e["scope"] = {name(q->s1), name(q->s2)};
      e["penalty"] = q->penalty;
    } else {
      const auto& x = std::get<DisjointSets>(c);
      e["type"] = "disjoint_sets";
      Json left = Json::array();
      Json right = Json::array();
      for (int s : x.left) left.push_back(name(s));
      for (int s : x.right) right.push_back(name(s));
      e["left"] = std::move(left);
      e["right"] = std::move(right);
      e["penalty"] = penalty_to_json(x.f);
    }
    cons.push_back(std::move(e));
  }
  j["constraints"] = std::move(cons);
  if (meta) j["meta"] = *meta;
  return j;
}

ExtendedPlan extended_plan_from_json(const WspInstance& w, const Json& j) {
  return guarded([&] {
    if (!j.is_object()) fail("plan", "expected an object");
    ExtendedPlan plan(static_cast<std::size_t>(w.step_count()));
    if (j.contains("assignment")) {
      const auto sets = assignment_from_json(
          j.at("assignment"), [&](const std::string& s) { return w.user_index(s); },
          [&](const std::string& s) { return w.step_index(s); }, w.n(), "plan.assignment");
      for (std::size_t u = 0; u < sets.size(); ++u) {
        for (int s = 0; s < w.step_count(); ++s) {
          if (contains(sets[u], s)) plan[static_cast<std::size_t>(s)].push_back(u);
        }
      }
      return plan;
    }
    for (const auto& [step, users] : j.items()) {
      auto& slot = plan[static_cast<std::size_t>(w.step_index(step))];
      for (const auto& u : string_list(users, "plan." + step)) slot.push_back(w.user_index(u));
      std::sort(slot.begin(), slot.end());
      slot.erase(std::unique(slot.begin(), slot.end()), slot.end());
    }
    return plan;
  });
}

Json generator_meta(const ResolvedConfig& cfg) {
  Json j = Json::object();
  j["generator"] = "vapep";
  j["version"] = kGeneratorVersion;
  j["prng"] = kGeneratorPrng;
  j["seed"] = cfg.seed;
  j["n"] = cfg.n;
  j["k"] = cfg.k;
  j["tau"] = cfg.tau;
  j["alpha"] = cfg.alpha.str();
  j["q_sod"] = cfg.q_sod;
  return j;
}

Json solve_result_to_json(const Instance& inst, const SolveResult& result, bool with_stats) {
  const WeightBreakdown& b = result.breakdown();
  Json j = Json::object();
  j["solver"] = result.meta().solver;
  j["total"] = result.total_weight();
  Json br = Json::object();
  br["total"] = b.total;
  br["cardinality"] = b.category(ConstraintCategory::cardinality);
  br["user_count"] = b.category(ConstraintCategory::user_count);
  br["authorizations"] = b.authorizations;
  br["sod"] = b.category(ConstraintCategory::sod);
  br["bod"] = b.category(ConstraintCategory::bod);
  if (std::find(b.categories.begin(), b.categories.end(), ConstraintCategory::custom) != b.categories.end()) {
    br["custom"] = b.category(ConstraintCategory::custom);
  }
  j["breakdown"] = std::move(br);
  Json per = Json::array();
  for (std::size_t i = 0; i < b.per_constraint.size(); ++i) {
    Json e = Json::object();
    e["index"] = i;
    e["type"] = family_name(inst.constraints()[i]);
    e["weight"] = b.per_constraint[i];
    per.push_back(std::move(e));
  }
  j["constraints"] = std::move(per);
  j["users"] = result.relation().active_user_count();
  j["user_cap"] = result.meta().user_cap;
  j["assignment"] = relation_to_json(inst, result.relation())["assignment"];
  if (with_stats) {
    Json s = Json::object();
    s["profiles_enumerated"] = result.meta().profiles_enumerated;
    s["matchings"] = result.meta().matchings;
    s["wall_ms"] = result.meta().wall_ms;
    j["stats"] = std::move(s);
  }
  return j;
}

}  // namespace vapep

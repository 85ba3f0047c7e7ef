#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "vapep/generator.hpp"
#include "vapep/model.hpp"
#include "vapep/resiliency.hpp"
#include "vapep/wsp.hpp"

namespace vapep {

/// Insertion-ordered so documents keep a stable, readable key order.
using Json = nlohmann::ordered_json;

/// Parses text, rethrowing syntax errors as DomainError.
Json parse_json(const std::string& text);
Json read_json_file(const std::string& path);
/// Pretty-printed with two-space indent and a trailing newline.
std::string dump_json(const Json& j);

/// Strict instance reader: unknown keys anywhere raise DomainError. A
/// top-level "meta" object is accepted and ignored.
Instance instance_from_json(const Json& j);
Json instance_to_json(const Instance& inst, const std::optional<Json>& meta = std::nullopt);

/// { "assignment": { user: [resources] } }; with `allow_extra` other
/// top-level keys (as in a solve report) are ignored.
AuthorizationRelation relation_from_json(const Instance& inst, const Json& j, bool allow_extra = false);
Json relation_to_json(const Instance& inst, const AuthorizationRelation& a);

/// WSP documents use "steps" where instances use "resources" and the
/// constraint types must_differ, must_equal and disjoint_sets.
WspInstance wsp_from_json(const Json& j);
Json wsp_to_json(const WspInstance& w, const std::optional<Json>& meta = std::nullopt);

/// { step: [users] }, or a solve report / relation document whose
/// "assignment" is read over the WSP's steps.
ExtendedPlan extended_plan_from_json(const WspInstance& w, const Json& j);

Json generator_meta(const ResolvedConfig& cfg);

/// Report with the weight breakdown by category; counters and timing only
/// when `with_stats`, so the default output is reproducible byte for byte.
Json solve_result_to_json(const Instance& inst, const SolveResult& result, bool with_stats);

}  // namespace vapep

#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "vapep/model.hpp"
#include "vapep/resiliency.hpp"
#include "vapep/wsp.hpp"

namespace vapep {

/// Positive rational p/q, kept in lowest terms.
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  /// Accepts "3", "3/2" or a terminating decimal such as "0.25".
  static Rational parse(const std::string& text);
  std::string str() const;
};

struct GeneratorConfig {
  int n = 20;
  std::optional<int> k;      ///< default max(1, ⌊0.1 n⌋)
  std::optional<int> tau;    ///< default ⌊0.05 n⌋
  Rational alpha;
  std::optional<int> q_sod;  ///< default k (0 when k = 1)
  std::uint64_t seed = 0;
};

/// Config with every default filled in; throws DomainError when invalid.
struct ResolvedConfig {
  int n = 0;
  int k = 0;
  int tau = 0;
  Rational alpha;
  int q_sod = 0;
  std::uint64_t seed = 0;
};

ResolvedConfig resolve(const GeneratorConfig& cfg);

/// Penalties for α = p/q, scaled by q so they stay integral:
/// p_SoD = 10p, p_Card = 10q, p_A = p and user-count coefficient q.
ResilienceEncoding encoding_for(const Rational& alpha);

inline constexpr const char* kGeneratorPrng = "mt19937_64/splitmix64-substreams";
inline constexpr int kGeneratorVersion = 1;

struct GeneratedInstance {
  ResolvedConfig config;
  WspInstance wsp;
  Instance instance;
};

/// Random WSP: each user gets c ~ U[1, max(1, ⌊(k-1)/2⌋)] steps chosen
/// uniformly, then q_sod must_differ scopes drawn independently (repeats
/// allowed, no self pairs), encoded with encode_resilient. Same config, same
/// bits.
GeneratedInstance generate(const GeneratorConfig& cfg);

}  // namespace vapep

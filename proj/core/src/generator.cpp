#include "vapep/generator.hpp"

#include <cctype>
#include <limits>
#include <numeric>
#include <random>

namespace vapep {

Rational Rational::parse(const std::string& text) {
  auto digits = [&](const std::string& s) {
    if (s.empty() || s.size() > 15) throw DomainError("alpha: cannot parse '" + text + "'");
    for (char ch : s) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) throw DomainError("alpha: cannot parse '" + text + "'");
    }
    return std::stoll(s);
  };
  Rational r;
  if (const auto slash = text.find('/'); slash != std::string::npos) {
    r.num = digits(text.substr(0, slash));
    r.den = digits(text.substr(slash + 1));
  } else if (const auto dot = text.find('.'); dot != std::string::npos) {
    const std::string frac = text.substr(dot + 1);
    r.num = digits(text.substr(0, dot) + frac);
    r.den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) r.den *= 10;
  } else {
    r.num = digits(text);
  }
  if (r.num <= 0 || r.den <= 0) throw DomainError("alpha must be positive");
  const std::int64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string Rational::str() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

ResolvedConfig resolve(const GeneratorConfig& cfg) {
  ResolvedConfig out;
  out.n = cfg.n;
  out.k = cfg.k.value_or(std::max(1, cfg.n / 10));
  out.tau = cfg.tau.value_or(cfg.n / 20);
  out.alpha = cfg.alpha;
  out.q_sod = cfg.q_sod.value_or(out.k >= 2 ? out.k : 0);
  out.seed = cfg.seed;
  if (out.n < 2) throw DomainError("generator: n must be at least 2");
  if (out.k < 1 || out.k > kMaxResources) throw DomainError("generator: k must lie in [1, 30]");
  if (out.tau < 0) throw DomainError("generator: tau must be non-negative");
  if (out.q_sod < 0) throw DomainError("generator: q_sod must be non-negative");
  if (out.q_sod > 0 && out.k < 2) throw DomainError("generator: SoD constraints need at least two steps");
  if (out.alpha.num <= 0 || out.alpha.den <= 0) throw DomainError("generator: alpha must be positive");
  return out;
}

ResilienceEncoding encoding_for(const Rational& alpha) {
  ResilienceEncoding enc;
  enc.p_sod = checked_mul(10, alpha.num);
  enc.p_card = checked_mul(10, alpha.den);
  enc.p_auth = alpha.num;
  enc.user_count_coef = alpha.den;
  return enc;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

enum class Stream : std::uint64_t { authorizations = 1, sod_scopes = 2 };

class Rng {
 public:
  Rng(std::uint64_t seed, Stream purpose) : engine_(splitmix64(seed ^ splitmix64(static_cast<std::uint64_t>(purpose)))) {}

  /// Uniform in [0, bound), by rejection so the draw is unbiased and the
  /// sequence does not depend on the standard library's distributions.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % bound;
  }

  int between(int lo, int hi) { return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1))); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace

GeneratedInstance generate(const GeneratorConfig& cfg) {
  const ResolvedConfig rc = resolve(cfg);
  const auto k = static_cast<std::size_t>(rc.k);

  std::vector<std::string> users;
  std::vector<std::string> steps;
  for (int u = 0; u < rc.n; ++u) users.push_back("u" + std::to_string(u + 1));
  for (int s = 0; s < rc.k; ++s) steps.push_back("s" + std::to_string(s + 1));

  Rng auth_rng(rc.seed, Stream::authorizations);
  const int most = std::max(1, (rc.k - 1) / 2);
  std::vector<ResourceSet> base(static_cast<std::size_t>(rc.n), 0);
  std::vector<int> pool(k);
  for (auto& b : base) {
    const int c = auth_rng.between(1, most);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < c; ++i) {
      const auto j = static_cast<std::size_t>(i) + auth_rng.below(k - static_cast<std::size_t>(i));
      std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
      b |= ResourceSet{1} << pool[static_cast<std::size_t>(i)];
    }
  }

  const ResilienceEncoding enc = encoding_for(rc.alpha);
  Rng scope_rng(rc.seed, Stream::sod_scopes);
  std::vector<WspConstraint> sod;
  for (int i = 0; i < rc.q_sod; ++i) {
    int a = static_cast<int>(scope_rng.below(k));
    int b = static_cast<int>(scope_rng.below(k - 1));
    if (b >= a) ++b;
    if (a > b) std::swap(a, b);
    sod.push_back(MustDiffer{a, b, enc.p_sod});
  }

  WspInstance wsp(std::move(steps), std::move(users), std::move(sod), AuthCost(base, enc.p_auth));
  Instance inst = encode_resilient(wsp, rc.tau, enc);
  return GeneratedInstance{rc, std::move(wsp), std::move(inst)};
}

}  // namespace vapep

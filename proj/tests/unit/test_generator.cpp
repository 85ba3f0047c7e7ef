#include <gtest/gtest.h>

#include <cmath>

#include "vapep/generator.hpp"
#include "vapep/json_io.hpp"

using namespace vapep;

namespace {

GeneratorConfig config(int n, int k, int tau, std::uint64_t seed) {
  GeneratorConfig cfg;
  cfg.n = n;
  cfg.k = k;
  cfg.tau = tau;
  cfg.seed = seed;
  return cfg;
}

std::string document(const GeneratedInstance& g) {
  return dump_json(instance_to_json(g.instance, generator_meta(g.config)));
}

}  // namespace

TEST(Rational, ParseForms) {
  EXPECT_EQ(Rational::parse("3").num, 3);
  const Rational half = Rational::parse("0.25");
  EXPECT_EQ(half.num, 1);
  EXPECT_EQ(half.den, 4);
  const Rational r = Rational::parse("6/4");
  EXPECT_EQ(r.num, 3);
  EXPECT_EQ(r.den, 2);
  EXPECT_EQ(r.str(), "3/2");
  EXPECT_EQ(Rational::parse("2").str(), "2");
  for (const char* bad : {"", "0", "-1", "1/0", "x", "1.2.3", "3/"}) EXPECT_THROW(Rational::parse(bad), DomainError) << bad;
}

TEST(Resolve, Defaults) {
  GeneratorConfig cfg;
  cfg.n = 80;
  const ResolvedConfig r = resolve(cfg);
  EXPECT_EQ(r.k, 8);
  EXPECT_EQ(r.tau, 4);
  EXPECT_EQ(r.q_sod, 8);
  cfg.n = 5;
  EXPECT_EQ(resolve(cfg).k, 1);
  EXPECT_EQ(resolve(cfg).q_sod, 0);
  EXPECT_EQ(resolve(cfg).tau, 0);
}

TEST(Resolve, RejectsInvalid) {
  GeneratorConfig cfg;
  cfg.n = 1;
  EXPECT_THROW(resolve(cfg), DomainError);
  cfg = config(10, 31, 0, 1);
  EXPECT_THROW(resolve(cfg), DomainError);
  cfg = config(10, 0, 0, 1);
  EXPECT_THROW(resolve(cfg), DomainError);
  cfg = config(10, 3, -1, 1);
  EXPECT_THROW(resolve(cfg), DomainError);
  cfg = config(10, 3, 1, 1);
  cfg.q_sod = -2;
  EXPECT_THROW(resolve(cfg), DomainError);
  cfg = config(10, 1, 1, 1);
  cfg.q_sod = 1;
  EXPECT_THROW(resolve(cfg), DomainError);
}

TEST(EncodingFor, AlphaScaling) {
  const ResilienceEncoding one = encoding_for(Rational{1, 1});
  EXPECT_EQ(one.p_sod, 10);
  EXPECT_EQ(one.p_card, 10);
  EXPECT_EQ(one.p_auth, 1);
  EXPECT_EQ(one.user_count_coef, 1);
  const ResilienceEncoding r = encoding_for(Rational{3, 2});
  EXPECT_EQ(r.p_sod, 30);
  EXPECT_EQ(r.p_card, 20);
  EXPECT_EQ(r.p_auth, 3);
  EXPECT_EQ(r.user_count_coef, 2);
}

TEST(Generate, PaperScaleShape) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const GeneratedInstance g = generate(config(80, 8, 4, seed));
    ASSERT_EQ(g.instance.n(), 80u);
    ASSERT_EQ(g.instance.k(), 8);
    for (std::size_t u = 0; u < 80; ++u) {
      const int c = popcount(g.instance.auth().base(u));
      EXPECT_GE(c, 1);
      EXPECT_LE(c, 3);
    }
    int sod = 0;
    int uc = 0;
    std::vector<int> card(8, 0);
    for (const auto& c : g.instance.constraints()) {
      if (const auto* s = std::get_if<SodU>(&c)) {
        ++sod;
        EXPECT_NE(s->r1, s->r2);
        EXPECT_LT(s->r1, s->r2);
        EXPECT_EQ(s->f, PenaltySpec::linear(10));
      } else if (const auto* l = std::get_if<CardLB>(&c)) {
        ++card[static_cast<std::size_t>(l->r)];
        EXPECT_EQ(l->t, 5);
        EXPECT_EQ(l->f, PenaltySpec::linear(10));
      } else if (const auto* q = std::get_if<UserCount>(&c)) {
        ++uc;
        EXPECT_EQ(q->shape, UserCount::Shape::quadratic);
        EXPECT_EQ(q->coef, 1);
      } else {
        ADD_FAILURE() << "unexpected family " << family_name(c);
      }
    }
    EXPECT_EQ(sod, 8);
    EXPECT_EQ(uc, 1);
    EXPECT_EQ(card, std::vector<int>(8, 1));
    EXPECT_EQ(g.instance.auth().uniform_penalty(), 1);
  }
}

TEST(Generate, MeanAuthorizedStepsMatchesUniformModel) {
  const GeneratedInstance g = generate(config(10000, 8, 0, 99));
  double sum = 0;
  for (std::size_t u = 0; u < g.instance.n(); ++u) sum += popcount(g.instance.auth().base(u));
  const double mean = sum / 10000.0;
  // U{1,2,3}: mean 2, variance 2/3.
  const double sigma = std::sqrt((2.0 / 3.0) / 10000.0);
  EXPECT_NEAR(mean, 2.0, 3 * sigma);
}

TEST(Generate, SmallStepCountsUseOneStep) {
  for (int k : {1, 2, 3, 4}) {
    const GeneratedInstance g = generate(config(30, k, 1, 5));
    for (std::size_t u = 0; u < 30; ++u) EXPECT_EQ(popcount(g.instance.auth().base(u)), 1);
  }
}

TEST(Generate, Deterministic) {
  GeneratorConfig cfg = config(40, 5, 2, 12345);
  cfg.alpha = Rational::parse("3/2");
  EXPECT_EQ(document(generate(cfg)), document(generate(cfg)));
  GeneratorConfig other = cfg;
  other.seed = 12346;
  EXPECT_NE(document(generate(cfg)), document(generate(other)));
}

TEST(Generate, SubstreamsAreIndependent) {
  GeneratorConfig a = config(40, 6, 2, 7);
  GeneratorConfig b = a;
  b.q_sod = 20;
  const GeneratedInstance ga = generate(a);
  const GeneratedInstance gb = generate(b);
  EXPECT_EQ(ga.instance.auth().base_sets(), gb.instance.auth().base_sets());
  // The first scopes agree as well: extra draws only extend the stream.
  std::vector<std::pair<int, int>> sa;
  std::vector<std::pair<int, int>> sb;
  for (const auto& c : ga.instance.constraints()) {
    if (const auto* s = std::get_if<SodU>(&c)) sa.emplace_back(s->r1, s->r2);
  }
  for (const auto& c : gb.instance.constraints()) {
    if (const auto* s = std::get_if<SodU>(&c)) sb.emplace_back(s->r1, s->r2);
  }
  ASSERT_EQ(sa.size(), 6u);
  ASSERT_EQ(sb.size(), 20u);
  EXPECT_TRUE(std::equal(sa.begin(), sa.end(), sb.begin()));
}

TEST(Generate, WspMatchesEncodedInstance) {
  const GeneratedInstance g = generate(config(12, 4, 1, 3));
  EXPECT_EQ(g.wsp.step_count(), 4);
  EXPECT_EQ(g.wsp.n(), 12u);
  EXPECT_EQ(g.wsp.constraints().size(), 4u);
  for (std::size_t u = 0; u < 12; ++u) EXPECT_EQ(g.wsp.auth().base(u), g.instance.auth().base(u));
  EXPECT_EQ(g.instance.users().front(), "u1");
  EXPECT_EQ(g.instance.resources().back(), "s4");
}

TEST(Generate, MetaRecordsConfigAndPrng) {
  const GeneratedInstance g = generate(config(20, 2, 1, 9));
  const Json meta = generator_meta(g.config);
  EXPECT_EQ(meta.dump().find(kGeneratorPrng) != std::string::npos, true);
  EXPECT_NE(meta.dump().find("\"seed\":9"), std::string::npos);
}

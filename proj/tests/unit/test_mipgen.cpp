#include <gtest/gtest.h>

#include "oracles.hpp"
#include "vapep/generator.hpp"
#include "vapep/mipgen.hpp"

using namespace vapep;

namespace {

Instance two_by_three() {
  return Instance({"u1", "u2", "u3"}, {"r1", "r2"},
                  {SodU{0, 1, PenaltySpec::linear(10)}, CardLB{0, 2, PenaltySpec::linear(10)},
                   CardLB{1, 2, PenaltySpec::linear(10)}, UserCount{}},
                  AuthCost(std::vector<ResourceSet>{0b01, 0b10, 0b11}, 1));
}

GeneratedInstance generated(oracle::Rng& rng) {
  GeneratorConfig cfg;
  cfg.n = oracle::uniform(rng, 2, 8);
  cfg.k = oracle::uniform(rng, 1, 4);
  cfg.tau = oracle::uniform(rng, 0, 2);
  cfg.alpha = Rational{oracle::uniform(rng, 1, 3), oracle::uniform(rng, 1, 2)};
  if (cfg.alpha.num == 2 && cfg.alpha.den == 2) cfg.alpha = Rational{1, 1};
  if (*cfg.k > 1) cfg.q_sod = oracle::uniform(rng, 0, 4);
  cfg.seed = rng();
  return generate(cfg);
}

}  // namespace

TEST(Parabola, EnvelopeIsExactAtIntegers) {
  for (std::size_t n = 1; n <= 64; ++n) {
    for (std::int64_t z = 0; z <= static_cast<std::int64_t>(n); ++z) EXPECT_EQ(parabola_envelope(n, z), z * z) << n;
  }
  EXPECT_EQ(parabola_cut_indices(4), (std::vector<std::int64_t>{1, 2, 3}));
  EXPECT_EQ(parabola_cut_indices(1), (std::vector<std::int64_t>{0}));
}

TEST(BuildNaive, VariableCounts) {
  const Formulation f = build_naive(two_by_three());
  EXPECT_EQ(f.count_prefix("x_r"), 6u);
  EXPECT_EQ(f.count_prefix("y_c"), 3u);
  EXPECT_EQ(f.count_prefix("p_c"), 4u);
  EXPECT_EQ(f.count_prefix("y_u"), 3u);
  EXPECT_TRUE(f.find("z").has_value());
  EXPECT_EQ(f.count(VarKind::binary), 9u);
  if (const auto x = f.find("x_r0_u0")) EXPECT_EQ(f.variables()[*x].kind, VarKind::binary);
}

TEST(BuildUp, VariableCounts) {
  const Formulation f = build_up(two_by_three());
  EXPECT_EQ(f.count_prefix("xT"), 12u);
  std::size_t one = 0;
  for (const auto& row : f.constraints()) one += row.name.rfind("one_u", 0) == 0 ? 1 : 0;
  EXPECT_EQ(one, 3u);
  EXPECT_EQ(f.variables()[f.index_of("y_u0")].kind, VarKind::continuous);
}

TEST(BuildUp, SizeGrowsLinearlyInUsers) {
  GeneratorConfig cfg;
  cfg.k = 3;
  cfg.tau = 1;
  cfg.n = 10;
  const std::size_t small = build_up(generate(cfg).instance).count_prefix("xT");
  cfg.n = 20;
  EXPECT_EQ(build_up(generate(cfg).instance).count_prefix("xT"), 2 * small);
  EXPECT_EQ(small, 80u);
}

TEST(BuildUp, GuardOnSize) {
  std::vector<std::string> res;
  for (int r = 0; r < 20; ++r) res.push_back("r" + std::to_string(r));
  std::vector<std::string> users;
  for (int u = 0; u < 10; ++u) users.push_back("u" + std::to_string(u));
  const Instance inst(users, res, {}, AuthCost(std::vector<ResourceSet>(10, 0), 1));
  EXPECT_THROW(build_up(inst), GuardError);
}

TEST(Builders, RejectUnsupportedFamilies) {
  const Instance bod({"u1"}, {"r1", "r2"}, {BodU{0, 1, PenaltySpec::linear(1)}},
                     AuthCost(std::vector<ResourceSet>{3}, 1));
  EXPECT_THROW(build_naive(bod), DomainError);
  EXPECT_THROW(build_up(bod), DomainError);
  const Instance table({"u1"}, {"r1", "r2"}, {SodU{0, 1, PenaltySpec::table({1, 5}, 1)}},
                       AuthCost(std::vector<ResourceSet>{3}, 1));
  EXPECT_THROW(build_naive(table), DomainError);
}

TEST(EvalAt, ZeroForSatisfyingRelation) {
  const Instance inst({"u1", "u2"}, {"r1", "r2"}, {SodU{0, 1, PenaltySpec::linear(10)}},
                      AuthCost(std::vector<ResourceSet>{3, 3}, 1));
  AuthorizationRelation a(2);
  a.assign(0, 0b01);
  a.assign(1, 0b10);
  EXPECT_EQ(eval_at(build_naive(inst), a), 0);
  EXPECT_EQ(eval_at(build_up(inst), a), 0);
  a.assign(0, 0b11);
  EXPECT_EQ(eval_at(build_naive(inst), a), 10);
  EXPECT_EQ(eval_at(build_up(inst), a), 10);
}

TEST(EvalAt, AgreesWithTotalWeightOnGeneratedInstances) {
  oracle::Rng rng(82);
  for (int trial = 0; trial < 100; ++trial) {
    const GeneratedInstance g = generated(rng);
    const Instance& inst = g.instance;
    const AuthorizationRelation a = oracle::random_complete_relation(rng, inst.n(), inst.k());
    const Weight w = total_weight(inst, a).total;
    EXPECT_EQ(eval_at(build_naive(inst), a), w) << "trial " << trial;
    EXPECT_EQ(eval_at(build_up(inst), a), w) << "trial " << trial;
  }
}

TEST(EvalAt, AgreesOnCardinalityUpperBoundsAndLinearUserCount) {
  oracle::Rng rng(83);
  for (int trial = 0; trial < 100; ++trial) {
    const int k = oracle::uniform(rng, 2, 3);
    const auto n = static_cast<std::size_t>(oracle::uniform(rng, 1, 5));
    std::vector<WeightedConstraint> cons = {
        CardUB{oracle::uniform(rng, 0, k - 1), oracle::uniform(rng, 1, 3), PenaltySpec::linear(oracle::uniform(rng, 1, 4))},
        SodU{0, 1, PenaltySpec::linear(3)},
        UserCount{UserCount::Shape::linear, oracle::uniform(rng, 1, 3)}};
    std::vector<std::string> users;
    std::vector<std::string> res;
    for (std::size_t u = 0; u < n; ++u) users.push_back("u" + std::to_string(u));
    for (int r = 0; r < k; ++r) res.push_back("r" + std::to_string(r));
    std::vector<ResourceSet> base(n);
    for (auto& b : base) b = static_cast<ResourceSet>(oracle::uniform(rng, 0, (1 << k) - 1));
    const Instance inst(users, res, cons, AuthCost(base, oracle::uniform(rng, 1, 3)));
    const AuthorizationRelation a = oracle::random_complete_relation(rng, n, k);
    const Weight w = total_weight(inst, a).total;
    EXPECT_EQ(eval_at(build_naive(inst), a), w);
    EXPECT_EQ(eval_at(build_up(inst), a), w);
  }
}

TEST(Lp, MinimalDocument) {
  Formulation f;
  f.add_variable("b", VarKind::binary);
  const std::string text = export_lp(f);
  EXPECT_NE(text.find("Minimize"), std::string::npos);
  EXPECT_NE(text.find("Binary"), std::string::npos);
  EXPECT_NE(text.find("End"), std::string::npos);
  const Formulation back = parse_lp(text);
  ASSERT_EQ(back.variables().size(), 1u);
  EXPECT_EQ(back.variables()[0].kind, VarKind::binary);
  EXPECT_EQ(export_lp(back), text);
}

TEST(Lp, GeneratedInstanceRoundTrips) {
  GeneratorConfig cfg;
  cfg.n = 10;
  cfg.k = 3;
  cfg.tau = 1;
  cfg.seed = 4;
  const Instance inst = generate(cfg).instance;
  for (bool up : {false, true}) {
    const Formulation f = up ? build_up(inst) : build_naive(inst);
    const std::string text = export_lp(f);
    const Formulation back = parse_lp(text);
    EXPECT_EQ(back.variables().size(), f.variables().size());
    EXPECT_EQ(back.constraints().size(), f.constraints().size());
    EXPECT_EQ(back.count(VarKind::binary), f.count(VarKind::binary));
    EXPECT_EQ(export_lp(back), text);
    if (up) EXPECT_EQ(back.count_prefix("xT"), 80u);
    if (!up) EXPECT_EQ(back.count_prefix("x_r"), 30u);
    // Parsed model evaluates like the original.
    oracle::Rng rng(84);
    const AuthorizationRelation a = oracle::random_complete_relation(rng, 10, 3);
    EXPECT_EQ(eval_at(back, a), eval_at(f, a));
  }
}

TEST(Lp, ParserAcceptsCommentsAndRejectsGarbage) {
  const std::string text =
      "\\ comment\nminimize\n obj: 2 a + 3 b\nsubject to\n c1: a + b >= 1\nbounds\n 0 <= a <= 4\nbinary\n b\nend\n";
  const Formulation f = parse_lp(text);
  EXPECT_EQ(f.variables().size(), 2u);
  EXPECT_EQ(f.constraints().size(), 1u);
  EXPECT_EQ(f.objective().size(), 2u);
  EXPECT_EQ(f.variables()[f.index_of("a")].upper, std::optional<Weight>(4));
  EXPECT_THROW(parse_lp("Minimize\n obj: a +\nEnd\n"), DomainError);
  EXPECT_THROW(parse_lp("Subject To\n c: a >= \nEnd\n"), DomainError);
}

TEST(Formulation, DuplicateNamesRejected) {
  Formulation f;
  f.add_variable("a", VarKind::continuous);
  EXPECT_THROW(f.add_variable("a", VarKind::binary), DomainError);
  EXPECT_THROW(f.index_of("missing"), DomainError);
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <set>

#include "spreadlab/errors.hpp"
#include "spreadlab/spreadcore.hpp"
#include "oracles.hpp"

using namespace spreadlab;

namespace {

GroupPtr corpus(const std::string& name) { return parse_grp(corpus_grp(name)); }
Perm P(std::size_t n, const std::string& s) { return Perm::from_cycles(n, s); }

bool generates(const Group& G, const Perm& a, const Perm& b) {
  return StabChain::has_order(G.degree(), {a, b}, G.order());
}

// Largest k <= kmax such that every k nontrivial elements have a common mate.
int brute_spread(const Group& G, int kmax) {
  const auto& T = G.table();
  std::uint32_t n = T.size();
  std::vector<ElemSet> mate(n, ElemSet(n));
  for (std::uint32_t a = 1; a < n; ++a)
    for (std::uint32_t b = 1; b < n; ++b) mate[a][b] = generates(G, T.perm(a), T.perm(b));
  int k = 0;
  std::vector<std::uint32_t> t;
  std::function<bool(int, std::uint32_t, const ElemSet&)> all_ok = [&](int left, std::uint32_t from, const ElemSet& M) {
    if (left == 0) return M.any();
    for (std::uint32_t a = from; a < n; ++a)
      if (!all_ok(left - 1, a, M & mate[a])) return false;
    return true;
  };
  ElemSet all(n);
  all.set();
  while (k < kmax && all_ok(k + 1, 1, all)) ++k;
  return k;
}

std::vector<std::size_t> prime_classes(const Group& G) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < G.classes().size(); ++c)
    if (is_prime(G.classes()[c].order)) out.push_back(c);
  return out;
}

}  // namespace

TEST_CASE("fixed point ratio examples") {
  auto S4 = corpus("S4");
  auto S3 = S4->subgroup({P(4, "(1,2)"), P(4, "(1,2,3)")});
  CHECK(fpr(*S4, S3, P(4, "(1,2)")).value == Rational(1, 2));
  CHECK(fpr(*S4, S3, Perm::identity(4)).value == 1);
  CHECK(fpr(*S4, S3, P(4, "(1,2)(3,4)")).value == 0);

  auto A5 = corpus("A5");
  auto D10 = A5->subgroup({P(5, "(1,2,3,4,5)"), P(5, "(2,5)(3,4)")});
  CHECK(D10.order == 10);
  auto v = fpr(*A5, D10, P(5, "(1,2)(3,4)"));
  CHECK(v.value == Rational(1, 3));
  CHECK(v.class_size == 15);
  CHECK(v.hits == 5);
  CHECK(rat_str(v.value) == "1/3");
}

TEST_CASE("fusion count agrees with the coset action") {
  for (const char* name : {"S4", "S5", "A5", "A6", "PSL2(7)", "SL2(3)"}) {
    auto G = corpus(name);
    const auto& cls = G->classes();
    for (const auto& sc : cls) {
      if (sc.rep.is_identity()) continue;
      auto po = G->overgroups(sc.rep);
      for (const auto& H : po.groups) {
        if (G->order() / H.order > 10000) continue;
        for (const auto& xc : cls) {
          auto a = fpr(*G, H, xc.rep);
          auto b = fpr_via_action(*G, H, xc.rep);
          REQUIRE(a.value == b.value);
          CHECK(a.hits == b.hits);
        }
      }
    }
  }
}

TEST_CASE("maximal overgroups") {
  auto A5 = corpus("A5");
  auto m5 = max_overgroups(*A5, P(5, "(1,2,3,4,5)"));
  REQUIRE(m5.classes.size() == 1);
  CHECK(m5.classes[0].H.order == 10);
  CHECK(m5.classes[0].multiplicity == 1);
  CHECK_FALSE(m5.assumed_maximals);

  auto S4 = corpus("S4");
  auto m4 = max_overgroups(*S4, P(4, "(1,2,3,4)"));
  REQUIRE(m4.classes.size() == 1);
  CHECK(m4.classes[0].H.order == 8);
  CHECK(m4.classes[0].multiplicity == 1);

  // involution of A5: one A4, two S3, two D10
  auto mi = max_overgroups(*A5, P(5, "(1,2)(3,4)"));
  std::multiset<std::pair<u64, u64>> got;
  for (const auto& c : mi.classes) got.insert({c.H.order, c.multiplicity});
  CHECK(got == std::multiset<std::pair<u64, u64>>{{6, 2}, {10, 2}, {12, 1}});

  CHECK_THROWS_AS(max_overgroups(*A5, Perm::identity(5)), IdentityElement);
}

TEST_CASE("conjugate counts agree with the normalizer formula across the corpus") {
  // max_overgroups throws when the direct count and fpr * |G:N_G(H)| differ.
  for (const char* name : {"S4", "S5", "A5", "A6", "D8", "PSL2(7)", "S6"}) {
    auto G = corpus(name);
    for (const auto& c : G->classes()) {
      if (c.rep.is_identity()) continue;
      auto M = max_overgroups(*G, c.rep);
      for (const auto& mo : M.classes) CHECK(mo.counted == mo.multiplicity);
    }
  }
}

TEST_CASE("exact generation probability is dominated by the overgroup sum") {
  for (const char* name : {"S4", "A5", "S5", "A6", "PSL2(7)"}) {
    auto G = corpus(name);
    for (const auto& sc : G->classes()) {
      if (sc.rep.is_identity()) continue;
      auto M = max_overgroups(*G, sc.rep);
      for (auto c : prime_classes(*G)) {
        const auto& x = G->classes()[c].rep;
        CHECK(prob_exact(*G, sc.rep, x) <= prob_bound(*G, M, x));
      }
    }
  }
}

TEST_CASE("class representative tuples partition the class product") {
  auto S3 = corpus("S3");
  CHECK(class_rep_tuples(*S3, {P(3, "(1,2)"), P(3, "(1,2)")}).size() == 2);

  for (const char* name : {"S3", "D8", "A4", "S4", "A5"}) {
    auto G = corpus(name);
    const auto& T = G->table();
    auto nontriv = G->classes();
    nontriv.erase(nontriv.begin());
    std::vector<std::vector<std::size_t>> shapes;
    for (std::size_t a = 0; a < nontriv.size(); ++a) {
      shapes.push_back({a});
      for (std::size_t b = a; b < nontriv.size(); ++b) {
        shapes.push_back({a, b});
        for (std::size_t c = b; c < nontriv.size(); ++c)
          if (nontriv[a].size * nontriv[b].size * nontriv[c].size <= 20000) shapes.push_back({a, b, c});
      }
    }
    for (const auto& sh : shapes) {
      std::vector<Perm> reps;
      std::vector<std::size_t> cidx;
      for (auto i : sh) {
        reps.push_back(nontriv[i].rep);
        cidx.push_back(G->class_index(nontriv[i].rep));
      }
      auto tuples = class_rep_tuples(*G, reps);
      auto orbits = oracle::tuple_orbits(*G, cidx);
      std::set<std::vector<std::uint32_t>> hit;
      for (const auto& t : tuples) {
        std::vector<std::uint32_t> ix;
        for (std::size_t i = 0; i < t.size(); ++i) {
          CHECK(G->class_index(t[i]) == cidx[i]);
          ix.push_back(T.index_of(t[i]));
        }
        CHECK(hit.insert(oracle::canonical_tuple(*G, ix)).second);
      }
      CHECK(hit == orbits);
    }
  }
}

TEST_CASE("random check") {
  auto A5 = corpus("A5");
  auto s = P(5, "(1,2,3,4,5)");
  auto inv = A5->class_index(P(5, "(1,2)(3,4)"));
  CHECK(random_check(*A5, s, {inv}, 200, 7));
  CHECK_FALSE(random_check(*A5, s, {inv}, 0, 7));
  // two involutions always share a 5-cycle mate in A5
  CHECK(random_check(*A5, s, {inv, inv}, 200, 7));
  auto c3 = A5->class_index(P(5, "(1,2,3)"));
  CHECK(random_check(*A5, s, {c3}, 200, 11));
}

TEST_CASE("probabilistic method") {
  auto S6 = corpus("S6");
  for (const auto& c : S6->classes()) {
    if (c.rep.is_identity()) continue;
    auto cert = probabilistic_method(*S6, c.rep, 1, 100, 1);
    CHECK(cert.status != CertStatus::Verified);
  }
  auto A5 = corpus("A5");
  auto ok = probabilistic_method(*A5, P(5, "(1,2,3,4,5)"), 2, 1000, 3);
  CHECK(ok.status == CertStatus::Verified);
  CHECK(ok.ledger.size() == 4);
  for (const auto& c : A5->classes()) {
    if (c.rep.is_identity()) continue;
    auto cert = probabilistic_method(*A5, c.rep, 3, 300, 5);
    CHECK(cert.status == CertStatus::Refuted);
    if (cert.status == CertStatus::Refuted)
      CHECK(verify_refutation(*A5, cert.refutation, &A5->class_members(A5->class_index(c.rep))));
  }
  // soundness against the exact uniform spread
  auto A6 = corpus("A6");
  MateTable mt6(A6);
  int u6 = *uspread_exact(mt6).exact_value;
  for (const auto& c : A6->classes()) {
    if (c.rep.is_identity()) continue;
    for (int k = 1; k <= 3; ++k)
      if (probabilistic_method(*A6, c.rep, k, 200, 9).status == CertStatus::Verified) CHECK(u6 >= k);
  }
}

TEST_CASE("exact spread and uniform spread") {
  auto S6 = corpus("S6");
  MateTable m6(S6, 2);
  auto s6 = spread_exact(m6);
  CHECK(s6.status == CertStatus::Verified);
  REQUIRE(s6.exact_value);
  CHECK(*s6.exact_value == 2);
  CHECK(s6.refutation.size() == 3);
  auto u6 = uspread_exact(m6);
  REQUIRE(u6.exact_value);
  CHECK(*u6.exact_value == 0);

  for (const char* name : {"A5", "A6"}) {
    auto G = corpus(name);
    MateTable mt(G);
    auto u = uspread_exact(mt);
    REQUIRE(u.exact_value);
    CHECK(*u.exact_value == 2);
    CHECK(u.status == CertStatus::Verified);
  }

  auto M11 = corpus("M11");
  MateTable m11(M11, 4);
  auto s11 = spread_exact(m11);
  REQUIRE(s11.exact_value);
  CHECK(*s11.exact_value == 3);
}

TEST_CASE("exact spread matches brute force on small groups") {
  for (const char* name : {"S3", "D8", "A4", "S4", "A5", "SL2(3)"}) {
    auto G = corpus(name);
    MateTable mt(G);
    auto c = spread_exact(mt, {4, 50000000, 1});
    int expect = brute_spread(*G, 4);
    CAPTURE(name);
    if (expect < 4) {
      REQUIRE(c.exact_value);
      CHECK(*c.exact_value == expect);
    } else {
      CHECK(c.lo == 4);
    }
  }
}

TEST_CASE("budget overrun brackets the value") {
  auto M11 = corpus("M11");
  MateTable mt(M11);
  auto c = spread_exact(mt, {8, 50, 1});
  CHECK(c.status == CertStatus::Inconclusive);
  CHECK_FALSE(c.exact_value);
  CHECK(c.lo >= 0);
}

TEST_CASE("certificates do not depend on the worker count") {
  auto A6 = corpus("A6");
  MateTable a(A6, 1), b(A6, 4);
  CHECK(uspread_exact(a).to_text() == uspread_exact(b).to_text());
  CHECK(spread_exact(a).to_text() == spread_exact(b).to_text());
  auto s = A6->classes().back().rep;
  CHECK(probabilistic_method(*A6, s, 2, 100, 42).to_text() == probabilistic_method(*A6, s, 2, 100, 42).to_text());
}

TEST_CASE("mate sets transport by conjugation") {
  auto A5 = corpus("A5");
  MateTable mt(A5);
  const auto& T = A5->table();
  for (std::uint32_t x = 1; x < T.size(); x += 7) {
    auto m = mt.of(x);
    for (std::uint32_t z = 0; z < T.size(); ++z) CHECK((*m)[z] == (z != 0 && generates(*A5, T.perm(x), T.perm(z))));
  }
}

TEST_CASE("generating graphs") {
  auto D8 = corpus("D8");
  MateTable md(D8);
  auto sd = graph_stats(md);
  auto a2 = P(4, "(1,3)(2,4)");
  REQUIRE(sd.isolated.size() == 1);
  CHECK(D8->table().perm(sd.isolated[0]) == a2);
  CHECK_FALSE(sd.connected);

  auto A4 = corpus("A4");
  MateTable ma(A4);
  auto sa = graph_stats(ma);
  CHECK(sa.isolated.empty());
  CHECK(sa.connected);

  auto A5 = corpus("A5");
  MateTable m5(A5);
  auto s5 = graph_stats(m5);
  CHECK(s5.isolated.empty());
  REQUIRE(s5.diameter);
  CHECK(*s5.diameter == 2);
  CHECK(s5.vertices == 59);

  // A5 has no dominating pair (checked by exhaustive search); S3 does.
  CHECK_FALSE(total_dom2(m5));
  auto S3 = corpus("S3");
  MateTable m3(S3);
  auto dom = total_dom2(m3);
  REQUIRE(dom);
  for (std::uint32_t z = 1; z < 6; ++z) {
    auto p = S3->table().perm(z);
    CHECK((generates(*S3, dom->first, p) || generates(*S3, dom->second, p)));
  }
  CHECK_FALSE(total_dom2(md));

  auto dot = graph_dot(ma);
  CHECK(dot.find("graph generating {") == 0);

  auto A8 = corpus("A8");
  MateTable m8(A8, 4);
  CHECK_THROWS_AS(graph_stats(m8, false), TooLarge);
  auto q = graph_stats(m8, true);
  CHECK(q.collapsed);
  CHECK(q.isolated.empty());
  CHECK(q.connected);
}

TEST_CASE("closed-form bounds") {
  CHECK(eval_paper_bound("lie-type-universal", {{"q", "3"}}) == doctest::Approx(4.0 / 9));
  CHECK(eval_paper_bound("unitary-nonsubspace-3-4", {{"q", "11"}}) == doctest::Approx(1.0 / 111));
  CHECK(eval_paper_bound("orthogonal-nonsingular-1space", {{"s", "1"}, {"m", "4"}, {"q", "3"}, {"eps", "+"}}) ==
        doctest::Approx(1.0 / 3 + 1.0 / 2187 + 2.0 / 80));
  CHECK(eval_paper_bound("subspace-linear", {{"n", "6"}, {"q", "2"}, {"k", "2"}}) == doctest::Approx(0.5));
  CHECK(eval_paper_bound("unitary-nonsubspace-sp4", {{"q", "11"}}) ==
        doctest::Approx(2.0 * (14641 + 1) / (161051 + 121)));
  CHECK_THROWS_AS(eval_paper_bound("lie-type-universal", {{"q", "3"}, {"socle", "PSp4(3)"}}), HypothesisViolation);
  CHECK_THROWS_AS(eval_paper_bound("lie-type-universal", {{"q", "6"}}), HypothesisViolation);
  CHECK_THROWS_AS(eval_paper_bound("unitary-nonsubspace-3-4", {{"q", "9"}}), HypothesisViolation);
  CHECK_THROWS_AS(eval_paper_bound("subspace-linear", {{"n", "4"}, {"q", "2"}, {"k", "1"}}), HypothesisViolation);
  CHECK_THROWS_AS(eval_paper_bound("orthogonal-nonsingular-1space", {{"s", "1"}, {"m", "3"}, {"q", "3"}, {"eps", "+"}}),
                  HypothesisViolation);
  CHECK_THROWS_AS(eval_paper_bound("no-such-bound", {}), UnknownName);
  CHECK(bound_ids().size() == 14);
  for (const auto& id : bound_ids()) CHECK_THROWS_AS(eval_paper_bound(id, {}), HypothesisViolation);
}

TEST_CASE("exact ratios respect the universal Lie-type bound") {
  // PSU3(3): q = 3, socle outside the excluded list.
  auto G = corpus("PSU3(3)");
  double bound = eval_paper_bound("lie-type-universal", {{"q", "3"}, {"socle", "PSU3(3)"}});
  for (auto c : prime_classes(*G)) {
    auto M = max_overgroups(*G, G->classes()[c].rep);
    for (const auto& mo : M.classes)
      for (auto d : prime_classes(*G)) {
        double v = fpr(*G, mo.H, G->classes()[d].rep).value.convert_to<double>();
        CHECK(v <= bound);
      }
  }
}

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "spreadlab/eltzoo.hpp"
#include "spreadlab/errors.hpp"
#include "spreadlab/numtheory.hpp"

using namespace spreadlab;

namespace {

const std::vector<std::pair<unsigned, unsigned>> kFields = {{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}};

u64 ipow(u64 b, unsigned e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

bool squarefree(const Poly& f) { return gcd(f, f.derivative()).degree() == 0; }

// Witness or a documented reason for nonexistence.
std::optional<EltWitness> try_make(const EltType& t) {
  try {
    return make_element(t);
  } catch (const NoSuchType&) {
    return std::nullopt;
  }
}

}  // namespace

TEST_CASE("extension field arithmetic") {
  auto F2 = FieldCtx::make(2, 1);
  ExtField E(F2, 4);
  CHECK(E.order() == 16);
  CHECK(is_irreducible(E.modulus()));
  Poly w = E.primitive();
  CHECK(E.has_order(w, 15));
  Poly l = E.element_of_order(5);
  CHECK(E.has_order(l, 5));
  CHECK(E.is_one(E.mul(l, E.inv(l))));
  CHECK(E.to_base(E.norm(l)) == F2->one());
  CHECK(E.trace(E.one()).is_zero());  // 4 * 1 = 0 in characteristic 2
  CHECK_THROWS_AS(E.element_of_order(7), IncompatibleDegree);
  Mat M = E.mult_matrix(l);
  CHECK(M.order() == 5);
  auto fac = poly_factor(charpoly(M));
  REQUIRE(fac.size() == 1);
  CHECK(fac[0].first.degree() == 4);
}

TEST_CASE("embedding an extension-field scalar") {
  auto F2 = FieldCtx::make(2, 1);
  auto F16 = FieldCtx::make(2, 4);
  auto sp = standard_space(FormKind::Zero, 4, F2);
  // lambda of order 5 in F_16
  Fq lam = F16->pow(F16->alpha(), 3);
  Mat x = Mat::diag(F16, {lam});
  Mat g = embed_ext(x, 4, sp);
  CHECK(g.order() == 5);
  // eigenvalues lambda, lambda^2, lambda^4, lambda^8
  Poly expect = Poly::constant(F16, F16->one());
  for (int i = 0; i < 4; ++i) {
    Fq r = F16->pow(lam, ipow(2, i));
    expect = expect * Poly(F16, {F16->neg(r), F16->one()});
  }
  Mat gl = map_entries(g, *embedding(F2, F16));
  CHECK(charpoly(gl) == expect);
  CHECK(embed_ext(Mat::identity(F16, 1), 4, sp).is_identity());

  auto F4 = FieldCtx::make(2, 2);
  Mat y = Mat::diag(F4, {F4->alpha()});
  Mat h = embed_ext(y, 2, standard_space(FormKind::Zero, 2, F2));
  CHECK(h.order() == 3);
  CHECK(charpoly(h) == Poly(F2, {F2->one(), F2->one(), F2->one()}));
  CHECK_THROWS_AS(embed_ext(y, 3, standard_space(FormKind::Zero, 4, F2)), IncompatibleDegree);
}

TEST_CASE("Galois orbits of embedded matrices") {
  for (auto [p, k] : kFields) {
    auto F = FieldCtx::make(p, k);
    for (unsigned d = 2; d <= 4; ++d) {
      auto L = FieldCtx::make(p, k * d);
      if (ipow(F->q(), d * 2) > (1u << 16) || L->q() > 4096) continue;
      // a 2x2 matrix over the extension: its F_q image has charpoly equal to the
      // product of the Frobenius conjugates of the original charpoly
      Mat x(L, 2, 2);
      x.at(0, 0) = L->alpha();
      x.at(0, 1) = L->one();
      x.at(1, 0) = L->pow(L->alpha(), 5);
      x.at(1, 1) = L->from_int(1);
      if (x.det().v == 0) continue;
      Mat g = embed_ext(x, d, standard_space(FormKind::Zero, static_cast<int>(2 * d), F));
      Poly c = charpoly(x);
      Poly expect = Poly::constant(L, L->one());
      for (unsigned i = 0; i < d; ++i) {
        std::vector<Fq> cs;
        for (int j = 0; j <= c.degree(); ++j) cs.push_back(L->pow(c.coeff(j), ipow(F->q(), i)));
        expect = expect * Poly(L, cs);
      }
      CHECK(charpoly(map_entries(g, *embedding(F, L))) == expect);
    }
  }
}

TEST_CASE("type names parse in both spellings") {
  for (auto t : {EltTag::PlusType, EltTag::MinusType, EltTag::DeltaPlus, EltTag::DeltaMinus, EltTag::SigmaPlus,
                 EltTag::SigmaMinus, EltTag::UnitaryMinus, EltTag::UnitaryPlus, EltTag::Refl, EltTag::DeltaRefl,
                 EltTag::DeltaElemPlus, EltTag::DeltaElemMinus, EltTag::DeltaElemU})
    CHECK(parse_tag(tag_name(t)) == t);
  CHECK(parse_tag("\xCE\x94(2m)\xE2\x88\x92") == EltTag::DeltaMinus);
  CHECK(parse_tag("\xCE\xA3(2m)+") == EltTag::SigmaPlus);
  CHECK_THROWS_AS(parse_tag("(2m)"), ParseError);
  CHECK(parse_group("DO-") == GroupKind::DOMinus);
  auto F = FieldCtx::make(2, 1);
  CHECK(elt_type(EltTag::PlusType, 3, F).to_string() == "(6)+_2 in SO+");
  CHECK_THROWS_AS(elt_type(EltTag::SigmaPlus, 3, F, GroupKind::Sp), IncompatibleKind);
}

TEST_CASE("plus type over GF(2) in dimension 6") {
  auto F = FieldCtx::make(2, 1);
  for (auto G : {GroupKind::Sp, GroupKind::SOPlus}) {
    auto w = make_element(elt_type(EltTag::PlusType, 3, F, G));
    CHECK(w.order == 7);
    auto rep = verify_type(w);
    CHECK_MESSAGE(rep.ok, (rep.reasons.empty() ? "" : rep.reasons[0]));
    REQUIRE(w.eigen_data.size() == 2);
    CHECK(w.eigen_data[0].first != w.eigen_data[1].first);
    // the totally singular summands are among the invariant subspaces
    auto subs = invariant_subspaces(w.matrix, w.space);
    CHECK(subs.size() == 4);
    int ts = 0;
    for (auto& s : subs)
      if (s.basis.rows() == 3 && s.label == Isotropy::TotallySingular) ++ts;
    CHECK(ts == 2);
  }
  CHECK_THROWS_AS(make_element(elt_type(EltTag::PlusType, 2, F)), NoSuchType);
}

TEST_CASE("minus type exceptional order 9 over GF(2)") {
  auto F = FieldCtx::make(2, 1);
  auto w = make_element(elt_type(EltTag::MinusType, 3, F));
  CHECK(w.order == 9);
  CHECK(verify_type(w).ok);
  // the generic ppd case in dimension 12
  auto w6 = make_element(elt_type(EltTag::MinusType, 6, F));
  CHECK(w6.order == 13);
  CHECK(verify_type(w6).ok);
}

TEST_CASE("minus type over GF(3) in dimension 4") {
  auto F = FieldCtx::make(3, 1);
  auto w = make_element(elt_type(EltTag::MinusType, 2, F));
  CHECK(w.order == 5);
  CHECK(ppd_set(3, 4) == std::set<u64>{5});
  CHECK(verify_type(w).ok);
  auto subs = invariant_subspaces(w.matrix, w.space);
  REQUIRE(subs.size() == 2);
  CHECK(subs[0].basis.rows() == 0);
  CHECK(subs[1].basis.rows() == 4);
  CHECK(subs[1].label == Isotropy::Nondegenerate);

  auto t = elt_type(EltTag::MinusType, 2, F);
  auto rep = verify_type(Mat::identity(F, 4), t, type_space(t));
  CHECK_FALSE(rep.ok);
  bool mentions_order = false;
  for (auto& r : rep.reasons) mentions_order |= r.find("order 1") != std::string::npos;
  CHECK(mentions_order);
}

TEST_CASE("Sigma minus over GF(3) in dimension 4") {
  auto F = FieldCtx::make(3, 1);
  auto w = make_element(elt_type(EltTag::SigmaMinus, 2, F));
  CHECK(verify_type(w).ok);
  auto mb = membership(w.matrix, w.space);
  CHECK(mb.in_special);
  CHECK_FALSE(mb.in_omega);
  // its k-th power, k = (3^2+1)_2 = 2, has type (4)-
  auto t = elt_type(EltTag::MinusType, 2, F);
  CHECK(verify_type(w.matrix.pow(2), t, w.space).ok);
  // a (4)- witness lies in Omega, so it is not of Sigma type
  auto plain = make_element(t);
  CHECK_FALSE(verify_type(plain.matrix, w.claimed, w.space).ok);
}

TEST_CASE("unitary minus type [3] over GF(2)") {
  auto F = FieldCtx::make(2, 1);
  auto w = make_element(elt_type(EltTag::UnitaryMinus, 3, F));
  CHECK(w.order == 9);
  auto qe = quad_ext(F);
  CHECK(w.matrix.det() == unitary_alpha(*qe));
  CHECK(qe->ext->order(unitary_alpha(*qe)) == 3);
  CHECK(verify_type(w).ok);
  CHECK(is_isometry(w.matrix, w.space));
}

TEST_CASE("minus type (2) over GF(7) is outside Omega") {
  auto F = FieldCtx::make(7, 1);
  auto w = make_element(elt_type(EltTag::MinusType, 1, F));
  CHECK(w.order == 8);
  CHECK(verify_type(w).ok);
  CHECK_FALSE(membership(w.matrix, w.space).in_omega);
}

TEST_CASE("unitary plus type: invariant subspaces of g^i") {
  for (unsigned p : {2u, 3u}) {
    auto F = FieldCtx::make(p, 1);
    auto w = make_element(elt_type(EltTag::UnitaryPlus, 4, F));
    u64 q = p;
    CHECK(w.order == ipow(q, 4) - 1);
    auto rep = verify_type(w);
    CHECK_MESSAGE(rep.ok, (rep.reasons.empty() ? "" : rep.reasons[0]));
    if (ipow(q * q, 4) > (1u << 20)) continue;
    for (u64 i = 1; i <= q + 1; ++i) {
      if ((q + 1) % i) continue;
      auto subs = invariant_subspaces(w.matrix.pow(static_cast<std::int64_t>(i)), w.space);
      REQUIRE(subs.size() == 4);
      CHECK(subs[1].basis.rows() == 2);
      CHECK(subs[2].basis.rows() == 2);
      CHECK(subs[1].label == Isotropy::TotallySingular);
      CHECK(subs[2].label == Isotropy::TotallySingular);
    }
  }
}

TEST_CASE("nu") {
  auto F = FieldCtx::make(5, 1);
  CHECK(nu(Mat::identity(F, 4)) == 0);
  auto sp = standard_space(FormKind::QuadPlus, 4, F);
  CHECK(nu(standard_reflection(sp)) == 1);
  Fq l = F->from_int(2);
  CHECK(nu(Mat::diag(F, {l, F->inv(l), F->one(), F->one()})) == 2);
  // scalar matrices have nu 0; an irreducible element has nu n - 1
  CHECK(nu(Mat::identity(F, 3).scaled(l)) == 0);
  auto w = make_element(elt_type(EltTag::MinusType, 2, F));
  CHECK(nu(w.matrix) == 3);
  CHECK_THROWS_AS(nu(Mat(F, 2, 2)), ZeroElement);
}

TEST_CASE("invariant subspaces of the identity") {
  auto F = FieldCtx::make(2, 1);
  auto subs = invariant_subspaces(Mat::identity(F, 2), standard_space(FormKind::Zero, 2, F));
  CHECK(subs.size() == 5);
  auto F3 = FieldCtx::make(3, 1);
  // |subspaces of F_3^4| = 1 + 40 + 130 + 40 + 1
  CHECK(invariant_subspaces(Mat::identity(F3, 4), standard_space(FormKind::Zero, 4, F3)).size() == 212);
  auto F9 = FieldCtx::make(3, 2);
  CHECK_THROWS_AS(invariant_subspaces(Mat::identity(F9, 7), standard_space(FormKind::Zero, 7, F9)), TooLarge);
}

TEST_CASE("splitting over subfields") {
  auto F2 = FieldCtx::make(2, 1);
  auto w4 = make_element(elt_type(EltTag::MinusType, 2, F2));
  CHECK(w4.order == 5);
  auto s = split_over_subfield(w4, 2);
  CHECK(s.t == 2);
  CHECK(s.eps == -1);
  REQUIRE(s.blocks.size() == 2);
  CHECK(s.blocks[0].tag == EltTag::MinusType);
  CHECK(s.blocks[0].m == 1);
  CHECK(s.blocks[0].ctx->q() == 4);
  CHECK(s.factor_degrees == std::vector<int>{2, 2});
  CHECK(s.verified);

  auto w6 = make_element(elt_type(EltTag::PlusType, 3, F2));
  auto s6 = split_over_subfield(w6, 3);
  CHECK(s6.t == 3);
  CHECK(s6.eps == 1);
  REQUIRE(s6.blocks.size() == 3);
  CHECK(s6.blocks[0].ctx->q() == 8);
  CHECK(s6.blocks[0].m == 1);
  CHECK(s6.factor_degrees == std::vector<int>(6, 1));
  CHECK(s6.verified);

  auto s1 = split_over_subfield(w6, 1);
  REQUIRE(s1.blocks.size() == 1);
  CHECK(s1.blocks[0].tag == EltTag::PlusType);
  CHECK(s1.blocks[0].m == 3);
  CHECK(s1.verified);

  auto w2 = make_element(elt_type(EltTag::MinusType, 1, FieldCtx::make(3, 1)));  // order 4: even
  CHECK_THROWS_AS(split_over_subfield(w2, 2), HypothesisViolation);
  auto w9 = make_element(elt_type(EltTag::MinusType, 3, F2));
  CHECK_THROWS_AS(split_over_subfield(w9, 2), HypothesisViolation);
}

TEST_CASE("split predictions over a grid") {
  for (auto [p, k] : {std::pair{2u, 1u}, {3u, 1u}}) {
    auto F = FieldCtx::make(p, k);
    for (int m = 2; m <= 3; ++m)
      for (auto tag : {EltTag::PlusType, EltTag::MinusType}) {
        auto w = try_make(elt_type(tag, m, F));
        if (!w || w->order % 2 == 0) continue;
        for (unsigned e = 1; e <= 3; ++e) {
          if (ipow(F->q(), k * e) > 4096) continue;
          try {
            auto s = split_over_subfield(*w, e);
            CHECK_MESSAGE(s.verified, w->claimed.to_string() << " e=" << e);
          } catch (const HypothesisViolation&) {
          }
        }
      }
  }
}

TEST_CASE("every constructed witness verifies") {
  int built = 0;
  for (auto [p, k] : kFields) {
    auto F = FieldCtx::make(p, k);
    u64 q = F->q();
    for (int m = 1; m <= 6; ++m) {
      std::vector<EltType> ts;
      auto add = [&](EltTag tag, GroupKind g) {
        try {
          ts.push_back(elt_type(tag, m, F, g));
        } catch (const IncompatibleKind&) {
        }
      };
      add(EltTag::PlusType, GroupKind::Sp);
      add(EltTag::PlusType, GroupKind::SOPlus);
      add(EltTag::MinusType, GroupKind::Sp);
      add(EltTag::MinusType, GroupKind::SOMinus);
      if (F->odd()) {
        add(EltTag::DeltaPlus, GroupKind::GSp);
        add(EltTag::DeltaPlus, GroupKind::DOPlus);
        add(EltTag::DeltaMinus, GroupKind::GSp);
        add(EltTag::DeltaMinus, GroupKind::DOMinus);
        add(EltTag::SigmaPlus, GroupKind::SOPlus);
        add(EltTag::SigmaMinus, GroupKind::SOMinus);
        add(EltTag::DeltaElemPlus, GroupKind::DOPlus);
        add(EltTag::DeltaElemMinus, GroupKind::DOMinus);
      }
      if (m >= 3 && m % 2 == 1 && ipow(q, 2 * m) < (1ull << 40)) add(EltTag::UnitaryMinus, GroupKind::GU);
      if (m >= 4 && m % 2 == 0 && ipow(q, 2 * m) < (1ull << 40)) add(EltTag::UnitaryPlus, GroupKind::GU);
      if (m == 1) {
        add(EltTag::Refl, GroupKind::OPlus);
        add(EltTag::Refl, GroupKind::OMinus);
        if (F->odd()) {
          add(EltTag::DeltaRefl, GroupKind::GOPlus);
          add(EltTag::DeltaRefl, GroupKind::GOMinus);
        }
      }
      if (m >= 3) add(EltTag::DeltaElemU, GroupKind::GU);
      for (auto& t : ts) {
        auto w = try_make(t);
        if (!w) {
          // nonexistence only where the hypotheses fail
          bool plus = t.tag == EltTag::PlusType || t.tag == EltTag::DeltaPlus || t.tag == EltTag::SigmaPlus;
          auto pp = ppd_set(q, static_cast<unsigned>(m));
          bool odd_ppd = std::any_of(pp.begin(), pp.end(), [](u64 r) { return r % 2 == 1; });
          bool allowed = (plus && (m % 2 == 0 || !odd_ppd)) ||
                         (t.tag == EltTag::SigmaPlus && m == 1) || (t.tag == EltTag::SigmaMinus && m == 1);
          CHECK_MESSAGE(allowed, t.to_string());
          continue;
        }
        ++built;
        auto rep = verify_type(*w);
        CHECK_MESSAGE(rep.ok, t.to_string() << ": " << (rep.reasons.empty() ? "" : rep.reasons[0]));
        if (t.tag == EltTag::PlusType || t.tag == EltTag::MinusType) CHECK(squarefree(charpoly(w->matrix)));
      }
    }
  }
  CHECK(built > 150);
}

TEST_CASE("Omega membership of plus and minus type witnesses") {
  for (unsigned p : {3u, 5u, 7u, 11u, 31u}) {
    auto F = FieldCtx::make(p, 1);
    for (int m = 1; m <= 3; ++m)
      for (int eps : {1, -1}) {
        auto w = try_make(elt_type(eps > 0 ? EltTag::PlusType : EltTag::MinusType, m, F));
        if (!w) continue;
        bool expect_outside = eps < 0 && m == 1 && is_mersenne(p);
        CHECK_MESSAGE(membership(w->matrix, w->space).in_omega == !expect_outside, w->claimed.to_string());
      }
  }
  auto F9 = FieldCtx::make(3, 2);
  for (int m = 1; m <= 3; ++m) {
    auto w = try_make(elt_type(EltTag::MinusType, m, F9));
    REQUIRE(w);
    CHECK(membership(w->matrix, w->space).in_omega);
  }
  CHECK(is_mersenne(7));
  CHECK(is_mersenne(31));
  CHECK_FALSE(is_mersenne(15));
  CHECK_FALSE(is_mersenne(9));
}

TEST_CASE("Delta types carry tau = beta and the boundary flag") {
  auto F = FieldCtx::make(7, 1);
  auto w = make_element(elt_type(EltTag::DeltaMinus, 1, F));
  auto rep = verify_type(w);
  CHECK(rep.ok);
  CHECK_FALSE(rep.notes.empty());
  auto F5 = FieldCtx::make(5, 1);
  auto w5 = make_element(elt_type(EltTag::DeltaMinus, 2, F5));
  auto r5 = verify_type(w5);
  CHECK(r5.ok);
  CHECK(r5.notes.empty());
  CHECK(*membership(w5.matrix, w5.space).tau == F5->beta());
}

TEST_CASE("construction is deterministic") {
  auto F = FieldCtx::make(3, 1);
  auto t = elt_type(EltTag::SigmaPlus, 3, F);
  CHECK(make_element(t).matrix == make_element(t).matrix);
}

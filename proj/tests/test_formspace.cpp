#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "spreadlab/errors.hpp"
#include "spreadlab/formspace.hpp"

using namespace spreadlab;

namespace {

const std::vector<std::pair<unsigned, unsigned>> kFields = {{2, 1}, {3, 1}, {2, 2}, {5, 1}, {7, 1}, {2, 3}, {3, 2}};

Vec random_vec(const FieldPtr& f, int n, std::mt19937_64& rng) {
  Vec v(n);
  for (auto& x : v) x = Fq{static_cast<std::uint32_t>(rng() % f->q())};
  return v;
}

u64 ipow(u64 b, unsigned e) {
  u64 r = 1;
  while (e--) r *= b;
  return r;
}

// |O^e_{2m}(q)| = 2 q^{m(m-1)} (q^m - e) prod_{i<m} (q^{2i} - 1)
u64 orth_order(u64 q, int m, int eps) {
  u64 r = 2 * ipow(q, static_cast<unsigned>(m * (m - 1)));
  r *= eps > 0 ? ipow(q, m) - 1 : ipow(q, m) + 1;
  for (int i = 1; i < m; ++i) r *= ipow(q, 2 * i) - 1;
  return r;
}

// Count nonzero singular vectors by brute force.
u64 singular_count(const FormedSpace& sp) {
  u64 c = 0;
  Vec v(sp.n, Fq{0});
  u64 q = sp.field->q();
  while (true) {
    int i = 0;
    while (i < sp.n && ++v[i].v == q) v[i++].v = 0;
    if (i == sp.n) break;
    if (sp.Q(v).v == 0) ++c;
  }
  return c;
}

bool minus_two_square_by_congruence(unsigned p, unsigned f) {
  return f % 2 == 0 || p % 8 == 1 || p % 8 == 3;
}

}  // namespace

TEST_CASE("standard Gram matrices") {
  auto f3 = FieldCtx::make(3, 1);
  auto sp = standard_space(FormKind::Symplectic, 4, f3);
  for (int i = 0; i < 4; ++i) {
    CHECK(sp.gram.at(i, i).v == 0);
    for (int j = 0; j < 4; ++j) CHECK(sp.gram.at(i, j) == f3->neg(sp.gram.at(j, i)));
  }
  CHECK(sp.gram.at(0, 1) == f3->one());
  CHECK(sp.gram.at(0, 3).v == 0);
  CHECK(sp.gram.at(2, 3) == f3->one());

  auto f2 = FieldCtx::make(2, 1);
  auto pl = standard_space(FormKind::QuadPlus, 4, f2);
  for (int i = 0; i < 4; ++i) CHECK(pl.qdiag[i].v == 0);
  CHECK(disc_and_sign(pl).sign == 1);

  auto mi = standard_space(FormKind::QuadMinus, 2, f3);
  auto qe = quad_ext(f3);
  CHECK(qe->ext->order(qe->xi) == 8);
  Fq want = qe->emb->down_checked(qe->ext->pow(qe->xi, 4));
  CHECK(mi.qdiag[0] == want);
  CHECK(mi.qdiag[1] == want);
  CHECK(want == f3->neg(f3->one()));
  CHECK(mi.gram.at(0, 1).v == 0);  // xi^2 + xi^-2 = 0 when |xi| = 8

  CHECK_THROWS_AS(standard_space(FormKind::Symplectic, 3, f3), IncompatibleKind);
  CHECK_THROWS_AS(standard_space(FormKind::QuadOdd, 3, f2), IncompatibleKind);
  CHECK_THROWS_AS(standard_space(FormKind::QuadPlus, 5, f3), IncompatibleKind);
}

TEST_CASE("standard spaces satisfy their defining identities") {
  std::mt19937_64 rng(5);
  for (auto [p, k] : kFields) {
    auto F = FieldCtx::make(p, k);
    for (int n = 1; n <= 8; ++n) {
      std::vector<FormKind> kinds{FormKind::Unitary, FormKind::Zero};
      if (n % 2 == 0) {
        kinds.push_back(FormKind::Symplectic);
        kinds.push_back(FormKind::QuadPlus);
        kinds.push_back(FormKind::QuadMinus);
      } else if (F->odd()) {
        kinds.push_back(FormKind::QuadOdd);
      }
      for (auto kind : kinds) {
        auto sp = standard_space(kind, n, F);
        const auto& E = sp.field;
        for (int t = 0; t < 20; ++t) {
          Vec u = random_vec(E, n, rng), v = random_vec(E, n, rng);
          if (kind == FormKind::Symplectic) CHECK(sp.form(u, u).v == 0);
          if (sp.quadratic())
            CHECK(E->sub(E->sub(sp.Q(vec_add(E, u, v)), sp.Q(u)), sp.Q(v)) == sp.form(u, v));
          if (kind == FormKind::Unitary) CHECK(sp.form(v, u) == sp.bar(sp.form(u, v)));
        }
        if (kind == FormKind::Zero) continue;
        CHECK(sp.gram.det().v != 0);
        auto wb = witt_basis(sp);
        int expect = n / 2;
        if (kind == FormKind::QuadMinus) expect = n / 2 - 1;
        CHECK(wb.witt_index == expect);
        if ((kind == FormKind::QuadPlus || kind == FormKind::QuadMinus) && ipow(F->q(), n) <= 70000) {
          int m = n / 2, eps = kind == FormKind::QuadPlus ? 1 : -1;
          u64 qm = ipow(F->q(), m), qm1 = ipow(F->q(), m - 1);
          u64 expect_singular = eps > 0 ? (qm - 1) * (qm1 + 1) : (qm + 1) * (qm1 - 1);
          CHECK(singular_count(sp) == expect_singular);
        }
      }
    }
  }
}

TEST_CASE("discriminant congruence") {
  for (unsigned q : {3u, 5u, 7u, 9u, 11u, 13u}) {
    unsigned p = q == 9 ? 3 : q, k = q == 9 ? 2 : 1;
    auto F = FieldCtx::make(p, k);
    for (int m = 1; m <= 4; ++m)
      for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
        auto sp = standard_space(kind, 2 * m, F);
        auto ds = disc_and_sign(sp);
        int sgn = kind == FormKind::QuadPlus ? 1 : -1;
        CHECK(ds.sign == sgn);
        int qm_mod4 = static_cast<int>(ipow(q, m) % 4);
        bool cong = qm_mod4 == (sgn == 1 ? 1 : 3);
        CHECK((ds.disc == SquareClass::Square) == cong);
      }
  }
  auto f5 = FieldCtx::make(5, 1);
  CHECK(disc_and_sign(standard_space(FormKind::QuadPlus, 4, f5)).disc == SquareClass::Square);
  auto f3 = FieldCtx::make(3, 1);
  CHECK(disc_and_sign(standard_space(FormKind::QuadMinus, 4, f3)).disc == SquareClass::Nonsquare);
}

TEST_CASE("reflections") {
  std::mt19937_64 rng(11);
  for (auto [p, k] : kFields) {
    auto F = FieldCtx::make(p, k);
    for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
      auto sp = standard_space(kind, 4, F);
      int done = 0;
      while (done < 15) {
        Vec v = random_vec(F, 4, rng);
        if (sp.Q(v).v == 0) continue;
        ++done;
        Mat r = reflection(v, sp);
        CHECK((r * r).is_identity());
        CHECK(is_isometry(r, sp));
        for (int t = 0; t < 5; ++t) {
          Vec x = random_vec(F, 4, rng);
          if (sp.form(x, v).v == 0) CHECK(vec_mul(x, r) == x);
        }
      }
      Vec z(4, Fq{0});
      z[0] = F->one();
      CHECK_THROWS_AS(reflection(z, sp), SingularVector);
    }
  }
  auto f3 = FieldCtx::make(3, 1);
  auto pl = standard_space(FormKind::QuadPlus, 2, f3);
  Mat r = standard_reflection(pl);
  CHECK(r == Mat::from_rows(f3, {{Fq{0}, Fq{1}}, {Fq{1}, Fq{0}}}));
  Mat dr = delta_reflection(pl);
  auto m = membership(dr, pl);
  CHECK(m.is_similarity);
  CHECK(*m.tau == f3->beta());
  CHECK(m.det == f3->neg(f3->beta()));
}

TEST_CASE("norm class of the standard reflection follows the -2 congruence") {
  int tested = 0;
  for (unsigned q = 3; tested < 20; q += 2) {
    auto fac = factorize(q);
    if (fac.size() != 1) continue;
    unsigned p = static_cast<unsigned>(fac.begin()->first), f = static_cast<unsigned>(fac.begin()->second);
    auto F = FieldCtx::make(p, f);
    ++tested;
    bool expect = minus_two_square_by_congruence(p, f);
    CHECK(F->is_square(F->neg(F->from_int(2))) == expect);
    for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
      auto sp = standard_space(kind, 2, F);
      auto m = membership(standard_reflection(sp), sp);
      CHECK(m.is_isometry);
      CHECK(m.det == F->neg(F->one()));
      CHECK_FALSE(m.in_special);
      CHECK_FALSE(m.in_omega);
      REQUIRE(m.reflection_norm.has_value());
      // Minus type: (u-v,u-v) = -2 (xi - 1/xi)^2 and xi - 1/xi is not in F_q,
      // so the class flips relative to -2.
      bool want = kind == FormKind::QuadPlus ? expect : !expect;
      CHECK((*m.reflection_norm == SquareClass::Square) == want);
    }
  }
}

TEST_CASE("delta elements") {
  for (unsigned q : {3u, 5u, 7u, 9u}) {
    unsigned p = q == 9 ? 3 : q, k = q == 9 ? 2 : 1;
    auto F = FieldCtx::make(p, k);
    for (int m = 1; m <= 3; ++m)
      for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
        auto sp = standard_space(kind, 2 * m, F);
        auto d = membership(delta_element(sp), sp);
        CHECK(d.is_similarity);
        CHECK(*d.tau == F->beta());
        CHECK(d.det == F->pow(F->beta(), m));
        CHECK(*d.in_DO);
        if (m > 1) {
          CHECK_THROWS_AS(delta_reflection(sp), IncompatibleKind);
          continue;
        }
        auto dr = membership(delta_reflection(sp), sp);
        CHECK(dr.is_similarity);
        CHECK(*dr.tau == F->beta());
        CHECK(dr.det == F->neg(F->beta()));
      }
  }
  auto f2 = FieldCtx::make(2, 1);
  CHECK_THROWS_AS(delta_element(standard_space(FormKind::QuadPlus, 2, f2)), UnsupportedCharacteristic);
}

TEST_CASE("orthogonal groups by exhaustive enumeration") {
  for (auto [p, k] : std::vector<std::pair<unsigned, unsigned>>{{2, 1}, {3, 1}, {2, 2}, {5, 1}}) {
    auto F = FieldCtx::make(p, k);
    for (int m : {1, 2}) {
      if (m == 2 && F->q() > 5) continue;
      for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
        auto sp = standard_space(kind, 2 * m, F);
        int eps = kind == FormKind::QuadPlus ? 1 : -1;
        auto O = enumerate_similarities(sp, F->one());
        CHECK(O.size() == orth_order(F->q(), m, eps));
        size_t so = 0, omega = 0;
        for (auto& g : O) {
          auto mb = membership(g, sp);
          CHECK(mb.is_isometry);
          if (mb.in_special) ++so;
          if (mb.in_omega) ++omega;
          if (!F->odd()) {
            // Reflection-count parity agrees with the rank formula.
            if (!(m == 2 && F->q() == 2 && eps == 1)) {
              auto fac = reflection_factorization(g, sp);
              CHECK(static_cast<int>(fac.size() % 2) == *mb.dickson);
            }
          }
        }
        if (F->odd()) {
          CHECK(2 * so == O.size());
          CHECK(2 * omega == so);
        } else {
          CHECK(so == O.size());
          CHECK(2 * omega == O.size());
        }
      }
    }
  }
}

TEST_CASE("spinor norm is multiplicative") {
  std::mt19937_64 rng(17);
  for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
    auto F = FieldCtx::make(3, 1);
    auto sp = standard_space(kind, 4, F);
    auto O = enumerate_similarities(sp, F->one());
    for (int t = 0; t < 250; ++t) {
      const Mat& g = O[rng() % O.size()];
      const Mat& h = O[rng() % O.size()];
      bool a = spinor_norm(g, sp) == SquareClass::Square;
      bool b = spinor_norm(h, sp) == SquareClass::Square;
      CHECK((spinor_norm(g * h, sp) == SquareClass::Square) == (a == b));
    }
  }
  auto F2 = FieldCtx::make(2, 1);
  auto sp2 = standard_space(FormKind::QuadMinus, 4, F2);
  auto O2 = enumerate_similarities(sp2, F2->one());
  for (int t = 0; t < 250; ++t) {
    const Mat& g = O2[rng() % O2.size()];
    const Mat& h = O2[rng() % O2.size()];
    CHECK(dickson_invariant(g * h, sp2) == (dickson_invariant(g, sp2) ^ dickson_invariant(h, sp2)));
  }
}

TEST_CASE("DO meets O in SO") {
  auto F = FieldCtx::make(3, 1);
  for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
    auto sp = standard_space(kind, 4, F);
    size_t total = 0, in_do = 0;
    for (std::uint32_t t = 1; t < 3; ++t) {
      for (auto& g : enumerate_similarities(sp, Fq{t})) {
        auto mb = membership(g, sp);
        CHECK(mb.is_similarity);
        CHECK(*mb.tau == Fq{t});
        ++total;
        if (*mb.in_DO) ++in_do;
        if (mb.is_isometry) CHECK(*mb.in_DO == mb.in_special);
      }
    }
    CHECK(2 * in_do == total);
  }
}

TEST_CASE("order q+1 element of SO^-_2(q) for Mersenne q is outside Omega") {
  for (unsigned q : {3u, 7u, 31u}) {
    auto F = FieldCtx::make(q, 1);
    auto sp = standard_space(FormKind::QuadMinus, 2, F);
    auto O = enumerate_similarities(sp, F->one());
    bool found = false;
    for (auto& g : O) {
      if (g.det() != F->one() || g.order() != q + 1) continue;
      found = true;
      auto mb = membership(g, sp);
      CHECK(mb.in_special);
      CHECK_FALSE(mb.in_omega);
      CHECK(spinor_norm(g, sp) == SquareClass::Nonsquare);
    }
    CHECK(found);
  }
}

TEST_CASE("symplectic and unitary group orders by enumeration") {
  auto f2 = FieldCtx::make(2, 1);
  auto f3 = FieldCtx::make(3, 1);
  CHECK(enumerate_similarities(standard_space(FormKind::Symplectic, 4, f2), f2->one()).size() == 720);
  CHECK(enumerate_similarities(standard_space(FormKind::Symplectic, 2, f3), f3->one()).size() == 24);
  CHECK(enumerate_similarities(standard_space(FormKind::Unitary, 2, f2), Fq{1}).size() == 18);
  CHECK(enumerate_similarities(standard_space(FormKind::Unitary, 3, f2), Fq{1}).size() == 648);
  CHECK(enumerate_similarities(unitary_hyperbolic_space(3, f2), Fq{1}).size() == 648);
}

TEST_CASE("unitary hyperbolic basis") {
  for (auto [p, k] : kFields) {
    auto F = FieldCtx::make(p, k);
    for (int n = 2; n <= 6; ++n) {
      auto sp = standard_space(FormKind::Unitary, n, F);
      auto hb = unitary_hyperbolic_basis(sp);
      CHECK(hb.basis.rank() == n);
      // Oracle: recompute the Gram matrix of the returned basis directly.
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          Fq expect{0};
          if (i + j == n - 1) {
            expect = i % 2 ? sp.field->neg(sp.field->one()) : sp.field->one();
            if (n % 2 == 0) expect = sp.field->mul(expect, hb.gram.at(0, n - 1));
          }
          CHECK(sp.form(hb.basis.row(i), hb.basis.row(j)) == expect);
        }
      if (n % 2 == 0 && F->odd()) {
        Fq a = hb.gram.at(0, n - 1);
        CHECK(sp.field->pow(a, F->q() - 1) == sp.field->neg(sp.field->one()));
      }
    }
  }
}

TEST_CASE("graph automorphism") {
  std::mt19937_64 rng(23);
  auto F = FieldCtx::make(2, 2);
  int done = 0;
  while (done < 50) {
    int n = 2 + static_cast<int>(rng() % 3);
    Mat x(F, n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) x.at(i, j) = Fq{static_cast<std::uint32_t>(rng() % 4)};
    if (x.det().v == 0) continue;
    ++done;
    CHECK(gamma_map(gamma_map(x)) == x);
  }
  CHECK(gamma_map(Mat::identity(F, 3)).is_identity());
  // Fixed points of gamma composed with x -> x^(2) on GL_2(4).
  int fixed = 0;
  for (std::uint32_t a = 0; a < 256; ++a) {
    Mat x = Mat::from_rows(F, {{Fq{a & 3}, Fq{(a >> 2) & 3}}, {Fq{(a >> 4) & 3}, Fq{(a >> 6) & 3}}});
    if (x.det().v == 0) continue;
    if (gamma_map(x.frob(1)) == x) ++fixed;
  }
  CHECK(fixed == 18);
}

TEST_CASE("membership of the identity") {
  for (auto [p, k] : kFields) {
    auto F = FieldCtx::make(p, k);
    for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus, FormKind::Symplectic, FormKind::Unitary}) {
      auto sp = standard_space(kind, 4, F);
      auto m = membership(Mat::identity(sp.field, 4), sp);
      CHECK(m.is_isometry);
      CHECK(*m.tau == sp.field->one());
      CHECK(m.in_omega);
      if (sp.quadratic()) CHECK(*m.in_DO);
    }
  }
}

TEST_CASE("space header") {
  auto F = FieldCtx::make(3, 2);
  CHECK(standard_space(FormKind::QuadMinus, 4, F).header() == "form minus 4 3 2");
  CHECK(parse_kind("unitary") == FormKind::Unitary);
  CHECK_THROWS_AS(parse_kind("bogus"), ParseError);
}

TEST_CASE("Wall determinant agrees with reflection factorization") {
  for (auto [p, m] : std::vector<std::pair<unsigned, int>>{{3, 2}, {5, 1}, {7, 1}, {3, 1}}) {
    auto F = FieldCtx::make(p, 1);
    for (auto kind : {FormKind::QuadPlus, FormKind::QuadMinus}) {
      auto sp = standard_space(kind, 2 * m, F);
      for (auto& g : enumerate_similarities(sp, F->one())) {
        Fq prod = F->one();
        for (auto& v : reflection_factorization(g, sp)) prod = F->mul(prod, sp.Q(v));
        CHECK(F->is_square(prod) == F->is_square(wall_determinant(g, sp)));
      }
    }
  }
}

TEST_CASE("standard basis of a transformed space") {
  std::mt19937_64 rng(31);
  for (auto [p, k] : kFields) {
    auto F = FieldCtx::make(p, k);
    for (int n = 2; n <= 6; ++n) {
      std::vector<FormKind> kinds{FormKind::Unitary};
      if (n % 2 == 0) {
        kinds.push_back(FormKind::Symplectic);
        kinds.push_back(FormKind::QuadPlus);
        kinds.push_back(FormKind::QuadMinus);
      } else if (F->odd()) {
        kinds.push_back(FormKind::QuadOdd);
      }
      for (auto kind : kinds) {
        auto st = standard_space(kind, n, F);
        const auto& E = st.field;
        Mat P(E, n, n);
        do {
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) P.at(i, j) = Fq{static_cast<std::uint32_t>(rng() % E->q())};
        } while (P.det().v == 0);
        std::vector<Fq> qd;
        if (st.quadratic())
          for (int i = 0; i < n; ++i) qd.push_back(st.Q(P.row(i)));
        auto sp = custom_space(kind, F, P * st.gram * st.bar(P).transpose(), qd);
        Mat B = standard_basis_in(sp);
        CHECK(B.rank() == n);
        // Oracle: the rows pushed through P live in the standard space and must
        // reproduce its Gram matrix.
        Mat BP = B * P;
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) CHECK(st.form(BP.row(i), BP.row(j)) == st.gram.at(i, j));
      }
    }
  }
}

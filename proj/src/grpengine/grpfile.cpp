#include <regex>
#include <sstream>

#include "spreadlab/errors.hpp"
#include "spreadlab/grpengine.hpp"

namespace spreadlab {

namespace {

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    auto h = line.find('#');
    if (h != std::string::npos) line.erase(h);
    auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    auto e = line.find_last_not_of(" \t\r");
    out.push_back(line.substr(b, e - b + 1));
  }
  return out;
}

u64 mul_or_throw(u64 a, u64 b) {
  auto r = checked_mul(a, b);
  if (!r) throw TooLarge("group order overflows 64 bits");
  return *r;
}

u64 ipow(u64 a, unsigned b) {
  auto r = checked_pow(a, b);
  if (!r) throw TooLarge("group order overflows 64 bits");
  return *r;
}

// |SL_n(q)|, |Sp_n(q)|, |SU_n(q)|
u64 classical_order(const FormedSpace& sp) {
  u64 q = sp.q();
  int n = sp.n;
  u64 r = 1;
  switch (sp.kind) {
    case FormKind::Zero:
      r = ipow(q, static_cast<unsigned>(n * (n - 1) / 2));
      for (int i = 2; i <= n; ++i) r = mul_or_throw(r, ipow(q, i) - 1);
      return r;
    case FormKind::Symplectic: {
      int m = n / 2;
      r = ipow(q, static_cast<unsigned>(m * m));
      for (int i = 1; i <= m; ++i) r = mul_or_throw(r, ipow(q, 2 * i) - 1);
      return r;
    }
    case FormKind::Unitary:
      r = ipow(q, static_cast<unsigned>(n * (n - 1) / 2));
      for (int i = 2; i <= n; ++i) r = mul_or_throw(r, i % 2 ? ipow(q, i) + 1 : ipow(q, i) - 1);
      return r;
    default:
      throw IncompatibleKind("transvection groups exist for zero, symplectic and unitary kinds only");
  }
}

}  // namespace

GroupPtr parse_grp(const std::string& text) {
  auto ls = lines_of(text);
  if (ls.empty()) throw ParseError("empty group file");
  std::istringstream hs(ls[0]);
  std::string tag;
  hs >> tag;
  if (tag == "perm") {
    long deg = 0;
    if (!(hs >> deg) || deg <= 0) throw ParseError("bad perm header: " + ls[0]);
    std::vector<Perm> gens;
    for (std::size_t i = 1; i < ls.size(); ++i) gens.push_back(Perm::from_cycles(static_cast<std::size_t>(deg), ls[i]));
    return Group::from_perms(static_cast<std::size_t>(deg), std::move(gens));
  }
  if (tag == "mat") {
    std::string kind, action;
    int n = 0;
    unsigned p = 0, k = 0;
    if (!(hs >> kind >> n >> p >> k >> action)) throw ParseError("bad mat header: " + ls[0]);
    FormKind fk = parse_kind(kind);
    MatAction act = parse_action(action);
    auto F = FieldCtx::make(p, k);
    FormedSpace sp = standard_space(fk, n, F);
    std::vector<Mat> gens;
    for (std::size_t i = 1; i < ls.size(); ++i) gens.push_back(Mat::parse(sp.field, ls[i]));
    return Group::from_matrices(sp, std::move(gens), act);
  }
  throw ParseError("unknown group file header: " + ls[0]);
}

std::string format_grp(const Group& G) {
  std::ostringstream os;
  if (G.origin()) {
    const auto& o = *G.origin();
    os << "mat " << kind_name(o.space.kind) << " " << o.space.n << " " << o.space.base->p() << " " << o.space.base->k()
       << " " << action_name(o.action) << "\n";
    for (const auto& g : o.gens) os << g.to_string() << "\n";
    return os.str();
  }
  os << "perm " << G.degree() << "\n";
  for (const auto& g : G.generators()) os << g.cycles() << "\n";
  return os.str();
}

std::vector<Mat> transvection_generators(const FormedSpace& sp) {
  const auto& F = *sp.field;
  int n = sp.n;
  u64 target = classical_order(sp);
  std::vector<Mat> cands;
  if (sp.kind == FormKind::Zero) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        if (i == j) continue;
        for (std::uint32_t a = 1; a < F.q(); ++a) {
          Mat t = Mat::identity(sp.field, n);
          t.at(i, j) = Fq{a};
          cands.push_back(t);
        }
      }
  } else {
    // x -> x + a (x,v) v
    u64 Q = F.q();
    u64 total = ipow(Q, static_cast<unsigned>(n));
    if (total > (u64{1} << 20)) throw TooLarge("space too large for transvection search");
    std::vector<Fq> scalars;
    for (std::uint32_t a = 1; a < Q; ++a) {
      Fq x{a};
      if (sp.unitary() && sp.bar(x) != F.neg(x)) continue;
      scalars.push_back(x);
    }
    for (u64 c = 1; c < total; ++c) {
      Vec v(n);
      u64 t = c;
      for (int i = 0; i < n; ++i) {
        v[i] = Fq{static_cast<std::uint32_t>(t % Q)};
        t /= Q;
      }
      if (sp.unitary() && sp.form(v, v).v) continue;
      for (Fq a : scalars) {
        Mat m = Mat::identity(sp.field, n);
        for (int i = 0; i < n; ++i) {
          Vec e(n, Fq{0});
          e[i] = F.one();
          Fq c2 = F.mul(a, sp.form(e, v));
          for (int j = 0; j < n; ++j) m.at(i, j) = F.add(m.at(i, j), F.mul(c2, v[j]));
        }
        cands.push_back(std::move(m));
      }
    }
  }
  std::vector<Mat> gens;
  u64 have = 1;
  std::optional<StabChain> ch;
  GroupPtr G;
  for (const auto& t : cands) {
    if (have == target) break;
    if (t.is_identity()) continue;
    if (G) {
      // Membership through the permutation action of the current group.
      auto probe = Group::from_matrices(sp, {t}, MatAction::Vectors);
      if (ch->contains(probe->generators()[0])) continue;
    }
    gens.push_back(t);
    G = Group::from_matrices(sp, gens, MatAction::Vectors);
    ch.emplace(G->degree(), G->generators());
    have = ch->order();
  }
  if (have != target) throw HypothesisViolation("transvections did not generate the expected group");
  return gens;
}

// ---- corpus ----

std::vector<std::string> corpus_names() {
  return {"S3",      "S4",       "S5",       "S6",       "A4",        "A5",       "A6",      "A7",
          "D8",      "M11",      "PSL2(7)",  "PSL2(8)",  "PSL2(11)",  "SL2(3)",   "SL2(5)",  "PSL3(2)",
          "PSL3(3)", "Sp4(2)",   "PSp4(3)",  "SU3(3)",   "PSU3(3)"};
}

std::string corpus_grp(const std::string& name) {
  std::smatch m;
  auto cyc = [](int a, int b) {
    std::string s = "(";
    for (int i = a; i <= b; ++i) s += std::to_string(i) + (i < b ? "," : ")");
    return s;
  };
  if (std::regex_match(name, m, std::regex("S(\\d+)"))) {
    int n = std::stoi(m[1]);
    if (n < 2 || n > 12) throw UnknownName("symmetric groups in the corpus have degree 2..12");
    return "perm " + std::to_string(n) + "\n" + cyc(1, n) + "\n(1,2)\n";
  }
  if (std::regex_match(name, m, std::regex("A(\\d+)"))) {
    int n = std::stoi(m[1]);
    if (n < 3 || n > 12) throw UnknownName("alternating groups in the corpus have degree 3..12");
    if (n == 3) return "perm 3\n(1,2,3)\n";
    if (n % 2) return "perm " + std::to_string(n) + "\n" + cyc(1, n) + "\n(3,4,5)\n";
    return "perm " + std::to_string(n) + "\n(1,2,3)\n" + cyc(2, n) + "\n";
  }
  if (name == "D8") return "perm 4\n(1,2,3,4)\n(1,3)\n";
  if (name == "M11") return "perm 11\n(1,2,3,4,5,6,7,8,9,10,11)\n(3,7,11,8)(4,10,5,6)\n";
  if (std::regex_match(name, m, std::regex("(P?)(SL|Sp|SU)(\\d)\\((\\d+)\\)"))) {
    bool proj = m[1] == "P";
    std::string fam = m[2];
    int n = std::stoi(m[3]);
    u64 q = std::stoull(m[4]);
    auto f = factorize(q);
    if (f.size() != 1) throw UnknownName("not a prime power: " + std::to_string(q));
    auto [p, k] = *f.begin();
    FormKind kind = fam == "SL" ? FormKind::Zero : fam == "Sp" ? FormKind::Symplectic : FormKind::Unitary;
    if ((fam == "SL" && (n < 2 || n > 3)) || (fam == "Sp" && n != 4) || (fam == "SU" && n != 3))
      throw UnknownName("corpus has SL2, SL3, Sp4 and SU3 families only: " + name);
    auto sp = standard_space(kind, n, FieldCtx::make(static_cast<std::uint32_t>(p), static_cast<unsigned>(k)));
    auto gens = transvection_generators(sp);
    std::ostringstream os;
    os << "mat " << kind_name(kind) << " " << n << " " << p << " " << k << " "
       << action_name(proj ? MatAction::ProjPoints : MatAction::Vectors) << "\n";
    for (const auto& g : gens) os << g.to_string() << "\n";
    return os.str();
  }
  throw UnknownName("unknown corpus group '" + name + "'");
}

}  // namespace spreadlab

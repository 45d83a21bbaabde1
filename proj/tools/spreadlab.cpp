#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spreadlab/cache.hpp"
#include "spreadlab/eltzoo.hpp"
#include "spreadlab/errors.hpp"
#include "spreadlab/numtheory.hpp"
#include "spreadlab/shintani.hpp"
#include "spreadlab/spreadcore.hpp"

using namespace spreadlab;

namespace {

constexpr const char* kVersion = "spreadlab 1.0.0";

enum Exit { kVerified = 0, kRefuted = 1, kInconclusive = 2, kUsage = 64 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_for(CertStatus s) {
  switch (s) {
    case CertStatus::Verified: return kVerified;
    case CertStatus::Refuted: return kRefuted;
    default: return kInconclusive;
  }
}

// A path to a .grp file, or a corpus name.
GroupPtr load_group(const std::string& spec) {
  if (std::filesystem::is_regular_file(spec)) {
    std::ifstream in(spec);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_grp(ss.str());
  }
  return parse_grp(corpus_grp(spec));
}

Perm element(const Group& G, const std::string& s) {
  Perm p = Perm::from_cycles(G.degree(), s);
  if (!G.member(p)) throw UsageError(s + " is not in the group");
  return p;
}

std::vector<Perm> element_list(const Group& G, const std::string& s) {
  std::vector<Perm> out;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ';'))
    if (!part.empty()) out.push_back(element(G, part));
  return out;
}

void print_header(std::ostream& os, const std::string& config) {
  os << "version " << kVersion << "\n";
  os << "config " << config << "\n";
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  // Timing goes to stderr so that reports stay byte-identical across runs.
  ~Timer() {
    auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
    std::cerr << "runtime_ms " << ms << "\n";
  }
};

BoundParams parse_params(const std::vector<std::string>& items) {
  BoundParams p;
  for (const auto& item : items) {
    std::stringstream ss(item);
    std::string kv;
    while (std::getline(ss, kv, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string::npos) throw UsageError("parameter '" + kv + "' is not key=value");
      p[kv.substr(0, eq)] = kv.substr(eq + 1);
    }
  }
  return p;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Spread, fixed point ratios, element types and Shintani descent for small finite groups"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);
  int status = kVerified;
  std::string group_spec;
  unsigned workers = 1;

  // fpr
  auto* fpr_cmd = app.add_subcommand("fpr", "fixed point ratio of x on the cosets of a subgroup");
  std::string sub_gens, x_str;
  bool via_action = false;
  fpr_cmd->add_option("--group", group_spec, "group file or corpus name")->required();
  fpr_cmd->add_option("--sub", sub_gens, "subgroup generators, ';'-separated cycles")->required();
  fpr_cmd->add_option("--x", x_str, "element in cycle notation")->required();
  fpr_cmd->add_flag("--via-action", via_action, "count fixed cosets instead of fusing classes");
  fpr_cmd->callback([&] {
    auto G = load_group(group_spec);
    auto H = G->subgroup(element_list(*G, sub_gens));
    Perm x = element(*G, x_str);
    auto v = via_action ? fpr_via_action(*G, H, x) : fpr(*G, H, x);
    print_header(std::cout, "fpr group=" + group_spec + " sub=" + sub_gens + " x=" + x_str);
    std::cout << "method " << (via_action ? "action" : "fusion") << "\n";
    std::cout << "subgroup_order " << H.order << "\n";
    std::cout << "x_class " << v.x_class << "\nhits " << v.hits << "\nclass_size " << v.class_size << "\n";
    std::cout << "fpr " << rat_str(v.value) << "\n";
  });

  // maxover
  auto* mo_cmd = app.add_subcommand("maxover", "maximal overgroups of s with multiplicities");
  std::string s_str;
  mo_cmd->add_option("--group", group_spec, "group file or corpus name")->required();
  mo_cmd->add_option("--s", s_str, "element in cycle notation")->required();
  mo_cmd->callback([&] {
    auto G = load_group(group_spec);
    Perm s = element(*G, s_str);
    auto M = max_overgroups(*G, s);
    print_header(std::cout, "maxover group=" + group_spec + " s=" + s_str);
    std::cout << "provenance exhaustive\n";
    std::cout << "classes " << M.classes.size() << "\n";
    for (const auto& c : M.classes)
      std::cout << "order " << c.H.order << " multiplicity " << c.multiplicity << " counted " << c.counted
                << " normalizer_index " << c.normalizer_index << " fpr " << rat_str(c.fpr_s) << "\n";
  });

  // uspread
  auto* us_cmd = app.add_subcommand("uspread", "probabilistic method for u(G) >= k");
  int k = 1;
  std::string class_sel = "auto";
  u64 N = 0, seed = 0;
  us_cmd->add_option("--group", group_spec, "group file or corpus name")->required();
  us_cmd->add_option("--k", k, "tuple size")->required()->check(CLI::PositiveNumber);
  us_cmd->add_option("--class", class_sel, "auto or a class index for s");
  us_cmd->add_option("--budget", N, "random conjugates per tuple (default 100k)");
  us_cmd->add_option("--seed", seed, "master seed");
  us_cmd->callback([&] {
    Timer t;
    auto G = load_group(group_spec);
    u64 n = N ? N : 100 * static_cast<u64>(k);
    std::vector<std::size_t> candidates;
    const auto& cls = G->classes();
    if (class_sel == "auto") {
      for (std::size_t c = 0; c < cls.size(); ++c)
        if (cls[c].rep_index != 0) candidates.push_back(c);
    } else {
      std::size_t c = 0;
      try {
        c = std::stoul(class_sel);
      } catch (const std::exception&) {
        throw UsageError("--class takes auto or an index");
      }
      if (c >= cls.size() || cls[c].rep_index == 0) throw UsageError("class index out of range or trivial");
      candidates.push_back(c);
    }
    print_header(std::cout, "uspread group=" + group_spec + " k=" + std::to_string(k) + " class=" + class_sel +
                                " N=" + std::to_string(n) + " seed=" + std::to_string(seed));
    bool any_open = false;
    for (std::size_t c : candidates) {
      auto cert = probabilistic_method(*G, cls[c].rep, k, n, seed);
      std::cout << "s_class " << c << "\n" << cert.to_text();
      if (cert.status == CertStatus::Verified) {
        status = kVerified;
        return;
      }
      if (cert.status == CertStatus::Inconclusive) any_open = true;
    }
    status = any_open ? kInconclusive : kRefuted;
  });

  // spread
  auto* sp_cmd = app.add_subcommand("spread", "exact spread or uniform spread");
  bool exact = false, uniform = false;
  ExactOptions opt;
  sp_cmd->add_option("--group", group_spec, "group file or corpus name")->required();
  sp_cmd->add_flag("--exact", exact, "exhaustive computation")->required();
  sp_cmd->add_flag("--uniform", uniform, "uniform spread instead of spread");
  sp_cmd->add_option("--kmax", opt.k_max, "largest k examined");
  sp_cmd->add_option("--budget", opt.budget, "search node budget");
  sp_cmd->add_option("--workers", workers, "threads for mate computation");
  sp_cmd->callback([&] {
    Timer t;
    auto G = load_group(group_spec);
    opt.workers = workers;
    MateTable mt(G, workers);
    auto cert = uniform ? uspread_exact(mt, opt) : spread_exact(mt, opt);
    print_header(std::cout, std::string("spread group=") + group_spec + (uniform ? " uniform" : "") +
                                " kmax=" + std::to_string(opt.k_max) + " budget=" + std::to_string(opt.budget));
    std::cout << cert.to_text();
    status = exit_for(cert.status);
  });

  // graph
  auto* gr_cmd = app.add_subcommand("graph", "generating graph");
  bool stats = false, dot = false, collapsed = false, dom = false;
  gr_cmd->add_option("--group", group_spec, "group file or corpus name")->required();
  auto* stats_flag = gr_cmd->add_flag("--stats", stats, "isolated vertices, components, diameter");
  auto* dot_flag = gr_cmd->add_flag("--dot", dot, "Graphviz output");
  stats_flag->excludes(dot_flag);
  gr_cmd->add_flag("--collapsed", collapsed, "class quotient above 10^4 vertices");
  gr_cmd->add_flag("--dominating-pair", dom, "search for a totally dominating pair");
  gr_cmd->add_option("--workers", workers, "threads for mate computation");
  gr_cmd->callback([&] {
    if (!stats && !dot) throw UsageError("graph needs --stats or --dot");
    auto G = load_group(group_spec);
    MateTable mt(G, workers);
    if (dot) {
      std::cout << graph_dot(mt);
      return;
    }
    auto st = graph_stats(mt, collapsed);
    print_header(std::cout, "graph group=" + group_spec + (collapsed ? " collapsed" : ""));
    std::cout << "collapsed " << (st.collapsed ? 1 : 0) << "\nvertices " << st.vertices << "\nedges " << st.edges
              << "\nisolated " << st.isolated.size() << "\ncomponents " << st.components << "\nconnected "
              << (st.connected ? 1 : 0) << "\ndiameter " << (st.diameter ? std::to_string(*st.diameter) : "-") << "\n";
    if (dom) {
      auto d = total_dom2(mt);
      std::cout << "dominating_pair " << (d ? d->first.cycles() + " " + d->second.cycles() : "none") << "\n";
    }
  });

  // bound
  auto* bd_cmd = app.add_subcommand("bound", "closed-form fixed point ratio bounds");
  std::string bound_id;
  std::vector<std::string> params;
  bool list = false;
  bd_cmd->add_option("--id", bound_id, "bound id");
  bd_cmd->add_option("--params", params, "key=value pairs, comma separated");
  bd_cmd->add_flag("--list", list, "list bound ids");
  bd_cmd->callback([&] {
    if (list) {
      for (const auto& id : bound_ids()) std::cout << id << "\n";
      return;
    }
    if (bound_id.empty()) throw UsageError("bound needs --id or --list");
    double v = eval_paper_bound(bound_id, parse_params(params));
    std::ostringstream os;
    os.precision(17);
    os << v;
    std::cout << "bound " << bound_id << " " << os.str() << "\n";
  });

  // elt
  auto* elt_cmd = app.add_subcommand("elt", "special elements of classical groups");
  auto* make_cmd = elt_cmd->add_subcommand("make", "construct and verify an element of a given type");
  elt_cmd->require_subcommand(1);
  std::string type_str, kind_str;
  int m = 1;
  u64 q = 2;
  make_cmd->add_option("--type", type_str, "type tag, e.g. \"(2m)-\", \"[n]+\", refl")->required();
  make_cmd->add_option("--m", m, "block parameter (n for unitary types)");
  make_cmd->add_option("--q", q, "field order")->required();
  make_cmd->add_option("--group", kind_str, "ambient group kind");
  make_cmd->callback([&] {
    auto fac = factorize(q);
    if (fac.size() != 1) throw UsageError("q must be a prime power");
    auto F = FieldCtx::make(static_cast<std::uint32_t>(fac.begin()->first), static_cast<unsigned>(fac.begin()->second));
    EltTag tag = parse_tag(type_str);
    EltType t = kind_str.empty() ? elt_type(tag, m, F) : elt_type(tag, m, F, parse_group(kind_str));
    auto w = make_element(t);
    auto rep = verify_type(w);
    std::cout << "type " << t.to_string() << "\n";
    std::cout << "matrix " << w.matrix.to_string() << "\n";
    std::cout << "order " << w.order << "\n";
    for (const auto& n : w.notes) std::cout << "note " << n << "\n";
    for (const auto& n : rep.notes) std::cout << "note " << n << "\n";
    for (const auto& r : rep.reasons) std::cout << "failure " << r << "\n";
    std::cout << "verified " << (rep.ok ? "yes" : "no") << "\n";
    status = rep.ok ? kVerified : kRefuted;
  });

  // shintani
  auto* sh_cmd = app.add_subcommand("shintani", "Shintani descent at desk scale");
  auto* ver_cmd = sh_cmd->add_subcommand("verify", "class correspondence and checks");
  sh_cmd->require_subcommand(1);
  int n = 2, e = 2, fix_k = -1, power_d = 0;
  u64 q0 = 2;
  std::string twist_str = "none";
  ver_cmd->add_option("--n", n, "dimension")->required();
  ver_cmd->add_option("--q0", q0, "base field order")->required();
  ver_cmd->add_option("--e", e, "extension degree")->required();
  ver_cmd->add_option("--twist", twist_str, "none or gu");
  ver_cmd->add_option("--fix", fix_k, "also compare fixed k-space counts");
  ver_cmd->add_option("--powers", power_d, "also check the power maps for d");
  ver_cmd->callback([&] {
    Timer t;
    auto inst = build_instance(n, q0, e, parse_twist(twist_str));
    auto rep = verify_descent(*inst);
    print_header(std::cout, "shintani n=" + std::to_string(n) + " q0=" + std::to_string(q0) + " e=" +
                                std::to_string(e) + " twist=" + twist_name(inst->twist));
    std::cout << "big_order " << inst->big.size() << "\nsmall_order " << inst->small.size() << "\n";
    std::cout << rep.to_text();
    bool ok = rep.violations.empty();
    if (fix_k >= 0) {
      auto f = verify_fix_counts(*inst, fix_k);
      for (const auto& r : f.rows)
        std::cout << "fix k=" << fix_k << " class " << r.coset_class << " " << r.big_fix << " " << r.small_fix << "\n";
      for (const auto& v : f.violations) std::cout << "violation: " << v << "\n";
      ok = ok && f.violations.empty();
    }
    if (power_d > 0) {
      auto p = verify_powers(*inst, power_d);
      std::cout << "powers d=" << power_d << " power_map " << (p.checked_power_map ? "checked" : "skipped")
                << " restriction " << (p.checked_restriction ? "checked" : "skipped") << "\n";
      for (const auto& v : p.notes) std::cout << "note: " << v << "\n";
      for (const auto& v : p.violations) std::cout << "violation: " << v << "\n";
      ok = ok && p.violations.empty();
    }
    status = ok ? kVerified : kRefuted;
  });

  // ppd
  auto* ppd_cmd = app.add_subcommand("ppd", "primitive prime divisors of a^b - 1");
  u64 a = 2;
  unsigned b = 2;
  ppd_cmd->add_option("--a", a, "base")->required()->check(CLI::Range(u64{2}, u64{1} << 32));
  ppd_cmd->add_option("--b", b, "exponent")->required()->check(CLI::Range(1u, 64u));
  ppd_cmd->callback([&] {
    auto s = ppd_set(a, b);
    std::cout << "ppd";
    for (auto p : s) std::cout << " " << p;
    std::cout << "\nexpected_nonempty " << (ppd_expected(a, b) ? 1 : 0) << "\n";
  });

  // cache
  auto* cache_cmd = app.add_subcommand("cache", "stored stabilizer chains and class tables");
  std::string action;
  std::string cache_dir;
  cache_cmd->add_option("action", action, "save, load, fetch, path or clear")
      ->required()
      ->check(CLI::IsMember({"save", "load", "fetch", "path", "clear"}));
  cache_cmd->add_option("--group", group_spec, "group file or corpus name");
  cache_cmd->add_option("--dir", cache_dir, "cache directory (default $SPREADLAB_CACHE)");
  cache_cmd->callback([&] {
    ClassCache cache(cache_dir.empty() ? ClassCache::default_dir() : std::filesystem::path(cache_dir));
    if (action == "clear") {
      std::cout << "removed " << cache.clear() << "\n";
      return;
    }
    if (group_spec.empty()) throw UsageError("cache " + action + " needs --group");
    auto G = load_group(group_spec);
    if (action == "path") {
      std::cout << cache.path_for(*G).string() << "\n";
    } else if (action == "save") {
      std::cout << cache.save(*G);
    } else if (action == "load") {
      auto t = cache.load(*G);
      if (!t) {
        std::cerr << "cache miss\n";
        status = kInconclusive;
        return;
      }
      std::cout << *t;
    } else {
      auto f = cache.fetch(*G);
      std::cerr << (f.hit ? "cache hit\n" : f.recomputed_after_mismatch ? "cache mismatch, recomputed\n" : "cache miss, computed\n");
      std::cout << f.text;
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& ex) {
    int rc = app.exit(ex);
    return rc == 0 ? 0 : kUsage;
  } catch (const UsageError& ex) {
    std::cerr << "usage error: " << ex.what() << "\n";
    return kUsage;
  } catch (const Error& ex) {
    std::cerr << ex.what() << "\n";
    const auto& c = ex.code();
    if (c == "ParseError" || c == "UnknownName" || c == "NotBijection" || c == "HypothesisViolation" ||
        c == "NoSuchType" || c == "NotPrime" || c == "IncompatibleKind")
      return kUsage;
    return kInconclusive;
  }
  return status;
}

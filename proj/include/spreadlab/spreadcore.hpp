#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "spreadlab/grpengine.hpp"

namespace spreadlab {

using Rational = boost::multiprecision::cpp_rational;
std::string rat_str(const Rational& r);

// |x^G cap H| / |x^G|
struct FprValue {
  std::size_t x_class = 0;
  u64 hits = 0;        // |x^G cap H|
  u64 class_size = 0;  // |x^G|
  Rational value;
};

// Fusion of H-classes into G-classes. Throws InconclusiveFusion when
// conjugacy in G cannot be certified.
FprValue fpr(const Group& G, const SubgroupRecord& H, const Perm& x);
// Fixed points of x on the right cosets of H. Throws IndexTooLarge above 10^6.
FprValue fpr_via_action(const Group& G, const SubgroupRecord& H, const Perm& x);

struct MaxOvergroup {
  SubgroupRecord H;
  u64 multiplicity = 0;     // conjugates of H containing s, from fpr * |G:N_G(H)|
  u64 counted = 0;          // conjugates of H containing s, counted directly (0 when trusted input)
  u64 normalizer_index = 0; // |G:N_G(H)|
  Rational fpr_s;           // fpr(s, G/H)
};

struct MaxOvergroups {
  std::vector<MaxOvergroup> classes;
  bool assumed_maximals = false;
};

// Exhaustive regime. Throws IdentityElement, BudgetExceeded.
MaxOvergroups max_overgroups(const Group& G, const Perm& s, std::size_t max_groups = 200000);
// Trusted regime: `maximals` are taken to be representatives of the classes of
// maximal subgroups (each self-normalizing).
MaxOvergroups max_overgroups_trusted(const Group& G, const Perm& s, const std::vector<SubgroupRecord>& maximals);

// sum over M(G,s) of fpr(x, G/H), grouped by class with multiplicities
Rational prob_bound(const Group& G, const MaxOvergroups& M, const Perm& x);
// #{z in s^G : <x,z> != G} / |s^G|
Rational prob_exact(const Group& G, const Perm& s, const Perm& x);

// Mates: z with <x,z> = G. Computed per class representative from the
// generation test, then transported by conjugation.
class MateTable {
 public:
  explicit MateTable(GroupPtr G, unsigned workers = 1);
  const Group& group() const { return *G_; }
  bool generates(std::uint32_t a, std::uint32_t b) const;
  const ElemSet& of_class(std::size_t c) const;
  // Mate set of an arbitrary element (cached when affordable).
  std::shared_ptr<const ElemSet> of(std::uint32_t idx) const;
  // Fill the class-representative sets for the listed classes, in parallel.
  void prepare(const std::vector<std::size_t>& classes) const;

 private:
  GroupPtr G_;
  unsigned workers_;
  std::size_t cache_cap_;
  mutable std::mutex mu_;
  mutable std::vector<std::unique_ptr<ElemSet>> by_class_;
  mutable std::map<std::uint32_t, std::shared_ptr<const ElemSet>> by_elt_;
  std::vector<std::uint32_t> conj_from_rep_;  // rep^g = element
  ElemSet compute(std::size_t c) const;
};

// Orbit representatives of simultaneous conjugation on x_1^G x ... x x_k^G.
std::vector<std::vector<Perm>> class_rep_tuples(const Group& G, const std::vector<Perm>& elts);

// For every representative tuple of the given classes, try up to N seeded
// conjugates s^h for one that generates with every entry.
bool random_check(const Group& G, const Perm& s, const std::vector<std::size_t>& tuple_classes, u64 N, u64 seed);

enum class CertStatus { Verified, Refuted, Inconclusive };
std::string status_name(CertStatus s);

struct LedgerEntry {
  std::size_t x_class = 0;
  Rational value;
};

struct SpreadCertificate {
  std::string mode;  // uniform | spread | exact-uniform
  int k = 0;
  CertStatus status = CertStatus::Inconclusive;
  std::optional<std::size_t> witness_class;
  std::vector<LedgerEntry> ledger;
  std::vector<std::vector<std::size_t>> random_checked;      // class tuples settled by random_check
  std::vector<std::vector<std::size_t>> exhaustive_checked;  // settled by testing all of s^G
  std::vector<std::size_t> failed_classes;               // class tuple left unsettled
  std::vector<Perm> refutation;
  std::optional<int> exact_value;
  int lo = 0, hi = -1;  // bracket; hi = -1 for unbounded
  std::vector<std::pair<std::size_t, int>> class_values;  // uniform spread relative to each class
  bool assumed_maximals = false;
  u64 seed = 0;
  u64 nodes = 0;
  std::string to_text() const;
};

// Probabilistic certificate for u(G) >= k with respect to s^G.
SpreadCertificate probabilistic_method(const Group& G, const Perm& s, int k, u64 N, u64 seed,
                                       const MaxOvergroups* trusted = nullptr);

struct ExactOptions {
  int k_max = 8;
  u64 budget = 50000000;  // tuple nodes
  unsigned workers = 1;
  bool all_classes = false;  // uniform spread: value every class even after one reaches k_max
};
SpreadCertificate spread_exact(const MateTable& mates, const ExactOptions& opt = {});
SpreadCertificate uspread_exact(const MateTable& mates, const ExactOptions& opt = {});
// Whether no nontrivial element generates G with every entry (direct generation tests).
bool verify_refutation(const Group& G, const std::vector<Perm>& tuple, const std::vector<std::uint32_t>* candidates = nullptr);

struct GraphStats {
  std::vector<std::uint32_t> isolated;  // element indices
  std::size_t components = 0;           // among non-isolated vertices
  bool connected = false;               // whole graph
  std::optional<u64> diameter;          // of the non-isolated part, when connected
  u64 vertices = 0, edges = 0;
  bool collapsed = false;
};
// Exact generating graph for |G| <= 10^4; class-collapsed quotient above when allowed.
GraphStats graph_stats(const MateTable& mates, bool allow_collapsed = false);
std::string graph_dot(const MateTable& mates);
// A pair {a,b} of nontrivial elements such that every nontrivial element generates with a or b.
std::optional<std::pair<Perm, Perm>> total_dom2(const MateTable& mates);

// Closed-form fpr bounds, keyed by descriptive ids. Throws HypothesisViolation
// when the parameters fall outside the bound's hypotheses and UnknownName for unknown ids.
using BoundParams = std::map<std::string, std::string>;
double eval_paper_bound(const std::string& bound_id, const BoundParams& params);
std::vector<std::string> bound_ids();

}  // namespace spreadlab

#include <atomic>
#include <numeric>
#include <thread>

#include "spreadlab/errors.hpp"
#include "spreadlab/spreadcore.hpp"

namespace spreadlab {

MateTable::MateTable(GroupPtr G, unsigned workers) : G_(std::move(G)), workers_(workers ? workers : 1) {
  const auto& T = G_->table();
  by_class_.resize(G_->classes().size());
  // Element sets share a budget of about 1 GiB of bits.
  std::size_t bytes_per = (static_cast<std::size_t>(T.size()) + 7) / 8;
  cache_cap_ = bytes_per ? (std::size_t{1} << 30) / bytes_per : 0;
  // Conjugator from each class representative to every member.
  conj_from_rep_.assign(T.size(), 0);
  std::vector<std::uint32_t> gens;
  for (const auto& g : G_->generators()) gens.push_back(T.index_of(g));
  for (std::size_t c = 0; c < G_->classes().size(); ++c) {
    std::uint32_t r = G_->classes()[c].rep_index;
    std::vector<std::uint32_t> q{r};
    ElemSet in(T.size());
    in.set(r);
    conj_from_rep_[r] = 0;
    for (std::size_t i = 0; i < q.size(); ++i)
      for (auto g : gens) {
        auto y = T.conj(q[i], g);
        if (in.test(y)) continue;
        in.set(y);
        conj_from_rep_[y] = T.mul(conj_from_rep_[q[i]], g);
        q.push_back(y);
      }
  }
}

bool MateTable::generates(std::uint32_t a, std::uint32_t b) const {
  const auto& T = G_->table();
  if (a == 0 || b == 0) return T.order(a ? a : b) == G_->order();
  return StabChain::has_order(G_->degree(), {T.perm(a), T.perm(b)}, G_->order());
}

ElemSet MateTable::compute(std::size_t c) const {
  const auto& T = G_->table();
  std::uint32_t x = G_->classes()[c].rep_index;
  ElemSet decided(T.size()), mate(T.size());
  std::vector<std::uint32_t> cg;
  for (const auto& g : G_->centralizer(T.perm(x)).gens) cg.push_back(T.index_of(g));
  decided.set(0);
  std::vector<std::uint32_t> orb;
  for (std::uint32_t z = 1; z < T.size(); ++z) {
    if (decided.test(z)) continue;
    bool yes = generates(x, z);
    // <x,z> = <x,z^j> for j coprime to |z|, and <x,z>^c = <x,z^c> for c in C(x).
    orb.assign(1, z);
    decided.set(z);
    for (std::size_t i = 0; i < orb.size(); ++i) {
      std::uint32_t y = orb[i];
      if (yes) mate.set(y);
      u64 o = T.order(y);
      std::uint32_t p = y;
      for (u64 j = 2; j < o; ++j) {
        p = T.mul(p, y);
        if (std::gcd(j, o) != 1 || decided.test(p)) continue;
        decided.set(p);
        orb.push_back(p);
      }
      for (auto g : cg) {
        auto w = T.conj(y, g);
        if (decided.test(w)) continue;
        decided.set(w);
        orb.push_back(w);
      }
    }
  }
  return mate;
}

const ElemSet& MateTable::of_class(std::size_t c) const {
  {
    std::lock_guard<std::mutex> lk(mu_);
    if (by_class_[c]) return *by_class_[c];
  }
  auto s = std::make_unique<ElemSet>(compute(c));
  std::lock_guard<std::mutex> lk(mu_);
  if (!by_class_[c]) by_class_[c] = std::move(s);
  return *by_class_[c];
}

std::shared_ptr<const ElemSet> MateTable::of(std::uint32_t idx) const {
  std::size_t c = G_->class_index_of(idx);
  const auto& base = of_class(c);
  if (idx == G_->classes()[c].rep_index) return std::shared_ptr<const ElemSet>(std::shared_ptr<void>(), &base);
  {
    std::lock_guard<std::mutex> lk(mu_);
    auto it = by_elt_.find(idx);
    if (it != by_elt_.end()) return it->second;
  }
  const auto& T = G_->table();
  std::uint32_t g = conj_from_rep_[idx];
  auto s = std::make_shared<ElemSet>(T.size());
  for (auto z = base.find_first(); z != ElemSet::npos; z = base.find_next(z))
    s->set(T.conj(static_cast<std::uint32_t>(z), g));
  std::lock_guard<std::mutex> lk(mu_);
  if (by_elt_.size() < cache_cap_) by_elt_.emplace(idx, s);
  return s;
}

void MateTable::prepare(const std::vector<std::size_t>& classes) const {
  std::vector<std::size_t> todo;
  {
    std::lock_guard<std::mutex> lk(mu_);
    for (auto c : classes)
      if (!by_class_[c]) todo.push_back(c);
  }
  if (todo.empty()) return;
  // Force lazily built group data before threads start.
  G_->table();
  for (auto c : todo) G_->classes()[c];
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next++) < todo.size();) of_class(todo[i]);
  };
  unsigned nw = std::min<unsigned>(workers_, static_cast<unsigned>(todo.size()));
  std::vector<std::thread> ts;
  for (unsigned w = 1; w < nw; ++w) ts.emplace_back(work);
  work();
  for (auto& t : ts) t.join();
}

}  // namespace spreadlab

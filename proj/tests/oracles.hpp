#pragma once

#include <functional>
#include <set>
#include <vector>

#include "spreadlab/grpengine.hpp"

namespace spreadlab::oracle {

// Every subgroup, by closing the trivial group under single elements until stable.
inline std::vector<ElemSet> all_subgroups(const Group& G) {
  const auto& T = G.table();
  std::vector<ElemSet> out;
  std::set<std::vector<std::uint32_t>> seen;
  std::vector<SubgroupRecord> queue{G.subgroup({})};
  seen.insert(queue[0].element_list);
  for (std::size_t i = 0; i < queue.size(); ++i)
    for (std::uint32_t g = 0; g < T.size(); ++g) {
      auto K = G.closure(queue[i], T.perm(g));
      if (seen.insert(K.element_list).second) queue.push_back(K);
    }
  for (auto& r : queue) out.push_back(*r.elements);
  return out;
}

// Least conjugate of an index tuple under simultaneous conjugation.
inline std::vector<std::uint32_t> canonical_tuple(const Group& G, const std::vector<std::uint32_t>& t) {
  const auto& T = G.table();
  std::vector<std::uint32_t> best;
  for (std::uint32_t g = 0; g < T.size(); ++g) {
    std::vector<std::uint32_t> c;
    for (auto x : t) c.push_back(T.conj(x, g));
    if (best.empty() || c < best) best = c;
  }
  return best;
}

// Orbits of simultaneous conjugation on the product of the given classes.
inline std::set<std::vector<std::uint32_t>> tuple_orbits(const Group& G, const std::vector<std::size_t>& classes) {
  std::set<std::vector<std::uint32_t>> orbits;
  std::vector<std::uint32_t> cur;
  std::function<void(std::size_t)> walk = [&](std::size_t d) {
    if (d == classes.size()) {
      orbits.insert(canonical_tuple(G, cur));
      return;
    }
    for (auto m : G.class_members(classes[d])) {
      cur.push_back(m);
      walk(d + 1);
      cur.pop_back();
    }
  };
  walk(0);
  return orbits;
}

}  // namespace spreadlab::oracle

#include <sstream>

#include "spreadlab/errors.hpp"
#include "spreadlab/spreadcore.hpp"

namespace spreadlab {

namespace {

using Idx = std::uint32_t;

// BFS layers from v over mate sets; returns eccentricity and marks the component.
u64 bfs(const MateTable& mt, Idx v, ElemSet& seen) {
  ElemSet frontier(seen.size());
  frontier.set(v);
  seen.set(v);
  u64 depth = 0;
  for (;;) {
    ElemSet next(seen.size());
    for (auto y = frontier.find_first(); y != ElemSet::npos; y = frontier.find_next(y))
      next |= *mt.of(static_cast<Idx>(y));
    next -= seen;
    if (next.none()) return depth;
    seen |= next;
    frontier = std::move(next);
    ++depth;
  }
}

// Quotient graph on nontrivial classes: c ~ d when some member of d is a mate of rep(c).
GraphStats collapsed_stats(const MateTable& mt) {
  const Group& G = mt.group();
  const auto& cls = G.classes();
  GraphStats st;
  st.collapsed = true;
  std::vector<std::size_t> nodes;
  for (std::size_t c = 0; c < cls.size(); ++c)
    if (cls[c].rep_index != 0) nodes.push_back(c);
  std::size_t n = nodes.size();
  std::vector<std::vector<std::size_t>> adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& m = mt.of_class(nodes[i]);
    for (std::size_t j = 0; j < n; ++j) {
      bool hit = false;
      for (Idx z : G.class_members(nodes[j]))
        if (m.test(z)) {
          hit = true;
          break;
        }
      if (hit) adj[i].push_back(j);
    }
  }
  st.vertices = n;
  std::vector<char> iso(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (adj[i].empty()) {
      iso[i] = 1;
      for (Idx z : G.class_members(nodes[i])) st.isolated.push_back(z);
    }
    for (auto j : adj[i])
      if (j >= i) ++st.edges;
  }
  std::sort(st.isolated.begin(), st.isolated.end());
  std::vector<int> comp(n, -1);
  u64 diam = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (iso[i]) continue;
    std::vector<int> dist(n, -1);
    std::vector<std::size_t> q{i};
    dist[i] = 0;
    for (std::size_t h = 0; h < q.size(); ++h)
      for (auto j : adj[q[h]])
        if (dist[j] < 0) {
          dist[j] = dist[q[h]] + 1;
          q.push_back(j);
        }
    if (comp[i] < 0) {
      for (auto j : q) comp[j] = static_cast<int>(st.components);
      ++st.components;
    }
    for (auto j : q) diam = std::max<u64>(diam, static_cast<u64>(dist[j]));
  }
  st.connected = st.isolated.empty() && st.components == 1;
  if (st.components == 1) st.diameter = diam;
  return st;
}

}  // namespace

GraphStats graph_stats(const MateTable& mt, bool allow_collapsed) {
  const Group& G = mt.group();
  if (G.order() > 10000) {
    if (!allow_collapsed) throw TooLarge("generating graph above 10^4 vertices needs the collapsed mode");
    return collapsed_stats(mt);
  }
  const auto& T = G.table();
  const auto& cls = G.classes();
  GraphStats st;
  st.vertices = T.size() - 1;
  ElemSet seen(T.size());
  seen.set(0);
  u64 deg_sum = 0;
  for (std::size_t c = 0; c < cls.size(); ++c) {
    if (cls[c].rep_index == 0) continue;
    auto d = mt.of_class(c).count();
    deg_sum += d * cls[c].size;
    if (d == 0)
      for (Idx z : G.class_members(c)) {
        st.isolated.push_back(z);
        seen.set(z);
      }
  }
  std::sort(st.isolated.begin(), st.isolated.end());
  st.edges = deg_sum / 2;
  // Components of the non-isolated part.
  ElemSet comp = seen;
  for (Idx v = 1; v < T.size(); ++v) {
    if (comp.test(v)) continue;
    bfs(mt, v, comp);
    ++st.components;
  }
  st.connected = st.isolated.empty() && st.components == 1;
  if (st.components == 1) {
    // Conjugation is a graph automorphism: eccentricities are class functions.
    u64 diam = 0;
    for (std::size_t c = 0; c < cls.size(); ++c) {
      if (cls[c].rep_index == 0 || mt.of_class(c).none()) continue;
      ElemSet s = seen;
      diam = std::max(diam, bfs(mt, cls[c].rep_index, s));
    }
    st.diameter = diam;
  }
  return st;
}

std::string graph_dot(const MateTable& mt) {
  const Group& G = mt.group();
  if (G.order() > 2000) throw TooLarge("DOT output is limited to groups of order <= 2000");
  const auto& T = G.table();
  std::ostringstream os;
  os << "graph generating {\n";
  for (Idx v = 1; v < T.size(); ++v) os << "  v" << v << " [label=\"" << T.perm(v).cycles() << "\"];\n";
  for (Idx v = 1; v < T.size(); ++v) {
    auto m = mt.of(v);
    for (auto w = m->find_next(v); w != ElemSet::npos; w = m->find_next(w)) os << "  v" << v << " -- v" << w << ";\n";
  }
  os << "}\n";
  return os.str();
}

std::optional<std::pair<Perm, Perm>> total_dom2(const MateTable& mt) {
  const Group& G = mt.group();
  const auto& T = G.table();
  ElemSet all(T.size());
  all.set();
  all.reset(0);
  // Up to conjugacy the first element is a class representative.
  for (const auto& c : G.classes()) {
    if (c.rep_index == 0) continue;
    auto ma = mt.of(c.rep_index);
    for (Idx b = 1; b < T.size(); ++b) {
      auto mb = mt.of(b);
      if (((*ma | *mb) & all) == all) return std::make_pair(c.rep, T.perm(b));
    }
  }
  return std::nullopt;
}

}  // namespace spreadlab

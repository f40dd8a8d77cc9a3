#include "phir/loops.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <queue>
#include <set>
#include <sstream>

#include <json.hpp>

#include "phir/errors.hpp"
#include "phir/persistence.hpp"

namespace phir {

const char* to_string(LoopKind k) { return k == LoopKind::handle ? "handle" : "tunnel"; }

CycleSpace::CycleSpace(const SimplicialComplex& complex) : pivot_(complex.size(), -1) {
  for (int t : complex.ids_of_dim(2)) {
    auto f = complex.facet_ids(t);
    Chain c{1, {f.begin(), f.end()}};
    add(c);
  }
}

std::vector<int> CycleSpace::reduce(std::vector<int> c) const {
  while (!c.empty()) {
    const int low = c.back();
    if (low >= static_cast<int>(pivot_.size()) || pivot_[low] < 0) break;
    symmetric_difference_inplace(c, columns_[pivot_[low]]);
  }
  return c;
}

bool CycleSpace::add(const Chain& c) {
  auto r = reduce(c.ids);
  if (r.empty()) return false;
  const int low = r.back();
  if (low >= static_cast<int>(pivot_.size())) pivot_.resize(low + 1, -1);
  pivot_[low] = static_cast<int>(columns_.size());
  columns_.push_back(std::move(r));
  return true;
}

bool null_homologous(const Chain& c, const SimplicialComplex& complex) {
  for (int id : c.ids)
    if (complex.simplex(id).dim() != 1) throw ArgumentError("null_homologous: expected edges");
  if (!complex.boundary(c).empty()) throw ArgumentError("null_homologous: chain is not a cycle");
  return CycleSpace(complex).contains(c);
}

std::vector<Chain> fundamental_cycles(const EdgeGraph& graph) {
  const int n = graph.vertex_count;
  std::vector<std::vector<std::pair<int, int>>> adj(n);  // (neighbor, edge index)
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    auto [a, b] = graph.edges[e];
    if (a < 0 || b < 0 || a >= n || b >= n) throw ArgumentError("edge references unknown vertex");
    adj[a].emplace_back(b, static_cast<int>(e));
    adj[b].emplace_back(a, static_cast<int>(e));
  }
  std::vector<int> parent_edge(n, -1), depth(n, -1);
  std::vector<char> tree(graph.edges.size(), 0);
  for (int root = 0; root < n; ++root) {
    if (depth[root] >= 0) continue;
    depth[root] = 0;
    std::queue<int> q;
    q.push(root);
    while (!q.empty()) {
      int v = q.front();
      q.pop();
      for (auto [w, e] : adj[v])
        if (depth[w] < 0) {
          depth[w] = depth[v] + 1;
          parent_edge[w] = e;
          tree[e] = 1;
          q.push(w);
        }
    }
  }
  auto up = [&](int v) {
    auto [a, b] = graph.edges[parent_edge[v]];
    return a == v ? b : a;
  };
  std::vector<Chain> cycles;
  for (std::size_t e = 0; e < graph.edges.size(); ++e) {
    if (tree[e]) continue;
    auto [a, b] = graph.edges[e];
    Chain c{1, {static_cast<int>(e)}};
    while (a != b) {
      if (depth[a] >= depth[b]) {
        c.ids.push_back(parent_edge[a]);
        a = up(a);
      } else {
        c.ids.push_back(parent_edge[b]);
        b = up(b);
      }
    }
    std::sort(c.ids.begin(), c.ids.end());
    // A parallel edge pair can reach here; symmetric difference keeps Z/2 semantics.
    c.ids.erase(std::unique(c.ids.begin(), c.ids.end()), c.ids.end());
    cycles.push_back(std::move(c));
  }
  return cycles;
}

Chain transfer_edges(const Chain& c, const SimplicialComplex& from, const SimplicialComplex& to) {
  Chain out{c.dim, {}};
  out.ids.reserve(c.ids.size());
  for (int id : c.ids) out.ids.push_back(to.id_of(from.simplex(id)));
  std::sort(out.ids.begin(), out.ids.end());
  return out;
}

namespace {

double walk_length(const std::vector<int>& seq, const TriMesh& mesh) {
  double len = 0.0;
  for (std::size_t i = 0; i < seq.size(); ++i)
    len += distance(mesh.vertices[seq[i]], mesh.vertices[seq[(i + 1) % seq.size()]]);
  return len;
}

double chain_length(const Chain& c, const SimplicialComplex& cx, const TriMesh& mesh) {
  double len = 0.0;
  for (int id : c.ids) {
    const auto& s = cx.simplex(id);
    len += distance(mesh.vertices[s[0]], mesh.vertices[s[1]]);
  }
  return len;
}

// Closed walks covering each component of an even-degree edge set once.
std::vector<std::vector<int>> euler_walks(const std::vector<std::pair<int, int>>& edges) {
  std::map<int, std::vector<std::pair<int, int>>> adj;
  for (std::size_t e = 0; e < edges.size(); ++e) {
    adj[edges[e].first].emplace_back(edges[e].second, static_cast<int>(e));
    adj[edges[e].second].emplace_back(edges[e].first, static_cast<int>(e));
  }
  // Deterministic traversal: neighbors in increasing vertex id.
  for (auto& [v, nb] : adj) std::sort(nb.begin(), nb.end());
  std::vector<char> used(edges.size(), 0);
  std::map<int, std::size_t> next;
  std::vector<std::vector<int>> walks;
  for (auto& [start, nb] : adj) {
    bool any = false;
    for (auto [w, e] : nb)
      if (!used[e]) any = true;
    if (!any) continue;
    // Hierholzer.
    std::vector<int> stack{start}, circuit;
    while (!stack.empty()) {
      int v = stack.back();
      auto& list = adj[v];
      auto& k = next[v];
      while (k < list.size() && used[list[k].second]) ++k;
      if (k == list.size()) {
        circuit.push_back(v);
        stack.pop_back();
      } else {
        used[list[k].second] = 1;
        stack.push_back(list[k].first);
      }
    }
    std::reverse(circuit.begin(), circuit.end());
    circuit.pop_back();  // closing repeat of start
    walks.push_back(std::move(circuit));
  }
  return walks;
}

std::vector<int> shortest_path(const EdgeTopology& topo, int from, int to) {
  const std::size_t n = topo.vertex_neighbors.size();
  std::vector<int> prev(n, -1), dist(n, -1);
  std::queue<int> q;
  q.push(from);
  dist[from] = 0;
  while (!q.empty()) {
    int v = q.front();
    q.pop();
    if (v == to) break;
    for (int w : topo.vertex_neighbors[v])
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        prev[w] = v;
        q.push(w);
      }
  }
  std::vector<int> path;
  for (int v = to; v >= 0; v = prev[v]) path.push_back(v);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace

LoopCycle make_loop(const Chain& edges, LoopKind kind, const TriMesh& surface,
                    const SimplicialComplex& surface_cx) {
  if (!surface_cx.boundary(edges).empty()) throw ArgumentError("make_loop: chain is not a cycle");
  std::vector<std::pair<int, int>> pairs;
  for (int id : edges.ids) {
    const auto& s = surface_cx.simplex(id);
    if (s.dim() != 1) throw ArgumentError("make_loop: chain must contain edges");
    pairs.emplace_back(s[0], s[1]);
  }
  LoopCycle loop;
  loop.kind = kind;
  loop.edges = edges;
  loop.edges.dim = 1;
  loop.length = chain_length(edges, surface_cx, surface);
  auto walks = euler_walks(pairs);
  if (walks.empty()) return loop;
  std::vector<int> seq = walks[0];
  if (walks.size() > 1) {
    // Join components with paths walked there and back; they cancel in Z/2.
    EdgeTopology topo(surface);
    for (std::size_t w = 1; w < walks.size(); ++w) {
      auto path = shortest_path(topo, seq.front(), walks[w].front());
      std::vector<int> joined = seq;
      joined.push_back(seq.front());
      joined.insert(joined.end(), path.begin() + 1, path.end() - 1);
      joined.insert(joined.end(), walks[w].begin(), walks[w].end());
      joined.push_back(walks[w].front());
      joined.insert(joined.end(), path.rbegin() + 1, path.rend() - 1);
      seq = std::move(joined);
    }
  }
  loop.vertex_sequence = std::move(seq);
  return loop;
}

LoopCycle shorten_loop(const LoopCycle& loop, const TriMesh& surface, const ShortenOptions& opts) {
  EdgeTopology topo(surface);
  std::vector<int> seq = loop.vertex_sequence;
  const int nverts = static_cast<int>(surface.vertices.size());
  for (std::size_t i = 0; i < seq.size(); ++i) {
    const int a = seq[i], b = seq[(i + 1) % seq.size()];
    if (a < 0 || a >= nverts || b < 0 || b >= nverts || topo.find_edge(a, b) < 0)
      throw ArgumentError("shorten_loop: loop does not follow surface edges");
  }
  {
    std::vector<int> sorted = seq;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) return loop;
  }
  const int window = std::max(3, opts.window);
  const auto& P = surface.vertices;

  std::vector<char> in_loop(nverts, 0);
  for (int v : seq) in_loop[v] = 1;

  for (int round = 0; round < opts.max_rounds; ++round) {
    bool improved = false;
    for (std::size_t i = 0; i < seq.size(); ++i) {
      const int m = static_cast<int>(seq.size());
      const int w = std::min(window, m - 1);
      if (w < 3) break;
      std::vector<int> arc(w);
      for (int k = 0; k < w; ++k) arc[k] = seq[(i + k) % m];
      const int A = arc.front(), B = arc.back();

      std::set<int> region;
      for (int k = 1; k + 1 < w; ++k)
        for (int f : topo.vertex_faces[arc[k]]) region.insert(f);
      // Dijkstra over edges of the region triangles.
      std::map<int, std::vector<int>> adj;
      for (int f : region)
        for (int k = 0; k < 3; ++k) {
          int a = surface.faces[f][k], b = surface.faces[f][(k + 1) % 3];
          adj[a].push_back(b);
          adj[b].push_back(a);
        }
      std::set<int> arc_set(arc.begin(), arc.end());
      auto allowed = [&](int v) { return !in_loop[v] || arc_set.count(v); };
      std::map<int, double> dist;
      std::map<int, int> prev;
      using Item = std::pair<double, int>;
      std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
      dist[A] = 0.0;
      pq.push({0.0, A});
      while (!pq.empty()) {
        auto [d, v] = pq.top();
        pq.pop();
        if (d > dist[v]) continue;
        if (v == B) break;
        for (int u : adj[v]) {
          if (!allowed(u)) continue;
          const double nd = d + distance(P[v], P[u]);
          auto it = dist.find(u);
          if (it == dist.end() || nd < it->second) {
            dist[u] = nd;
            prev[u] = v;
            pq.push({nd, u});
          }
        }
      }
      if (!dist.count(B)) continue;
      double old_len = 0.0;
      for (int k = 0; k + 1 < w; ++k) old_len += distance(P[arc[k]], P[arc[k + 1]]);
      if (!(dist[B] < old_len - 1e-12 * std::max(1.0, old_len))) continue;

      std::vector<int> path;
      for (int v = B; v != A; v = prev[v]) path.push_back(v);
      path.push_back(A);
      std::reverse(path.begin(), path.end());
      const int new_m = m - (w - 2) + (static_cast<int>(path.size()) - 2);
      if (new_m < 3) continue;

      // The swapped arcs must bound inside the region.
      std::vector<Simplex> tris;
      for (int f : region)
        tris.push_back(Simplex{surface.faces[f][0], surface.faces[f][1], surface.faces[f][2]});
      auto local = SimplicialComplex::from_simplices(tris);
      Chain swap{1, {}};
      auto toggle = [&](int a, int b) {
        std::vector<int> e{local.id_of(Simplex{a, b})};
        symmetric_difference_inplace(swap.ids, e);
      };
      for (int k = 0; k + 1 < w; ++k) toggle(arc[k], arc[k + 1]);
      for (std::size_t k = 0; k + 1 < path.size(); ++k) toggle(path[k], path[k + 1]);
      if (!swap.ids.empty() && !CycleSpace(local).contains(swap)) continue;

      std::vector<int> next;
      next.reserve(new_m);
      next.insert(next.end(), path.begin(), path.end() - 1);
      for (int k = w - 1; k < m; ++k) next.push_back(seq[(i + k) % m]);
      for (int k = 1; k + 1 < w; ++k) in_loop[arc[k]] = 0;
      for (int v : path) in_loop[v] = 1;
      seq = std::move(next);
      // seq now starts at position i of the old sequence.
      std::rotate(seq.begin(), seq.end() - std::min<std::size_t>(i, seq.size() - 1), seq.end());
      improved = true;
    }
    if (!improved) break;
  }

  LoopCycle out;
  out.kind = loop.kind;
  out.vertex_sequence = seq;
  out.length = walk_length(seq, surface);
  auto cx = surface_complex(surface);
  out.edges.dim = 1;
  for (std::size_t i = 0; i < seq.size(); ++i) {
    std::vector<int> e{cx.id_of(Simplex{seq[i], seq[(i + 1) % seq.size()]})};
    symmetric_difference_inplace(out.edges.ids, e);
  }
  return out;
}

namespace {

struct Phase {
  std::shared_ptr<const SimplicialComplex> volume;
  Filtration filtration;
  Pairing pairing;
  std::vector<bool> on_surface;
  int generators = 0;
  // (killer triangle, generator edge) in filtration order of the killer.
  std::vector<std::pair<int, int>> killed;
};

Phase run_phase(const TriMesh& surface, const SimplicialComplex& surface_cx,
                const TetComplex& volume) {
  Phase ph;
  ph.volume = volume.complex_ptr();
  const auto& V = *ph.volume;
  const auto& P = volume.vertices();
  ph.on_surface.assign(V.size(), false);
  double longest = 0.0;
  std::vector<double> key(V.size(), 0.0);
  for (std::size_t id = 0; id < V.size(); ++id) {
    const Simplex& s = V.simplex(static_cast<int>(id));
    if (!surface_cx.contains(s)) continue;
    ph.on_surface[id] = true;
    if (s.dim() == 1) {
      key[id] = distance(P[s[0]], P[s[1]]);
      longest = std::max(longest, key[id]);
    }
  }
  const double offset = longest + 1.0;
  for (std::size_t id = 0; id < V.size(); ++id) {
    if (ph.on_surface[id]) continue;
    const Simplex& s = V.simplex(static_cast<int>(id));
    Vec3 bary;
    for (int v : s.vertices()) bary += P[v];
    bary = bary / static_cast<double>(s.size());
    double best = HUGE_VAL;
    for (const auto& f : surface.faces)
      best = std::min(best, point_triangle_distance(bary, surface.vertices[f[0]],
                                                    surface.vertices[f[1]], surface.vertices[f[2]]));
    key[id] = offset + best;
  }
  ph.filtration = build_filtration(ph.volume, key);
  ph.pairing = pair(ph.filtration);
  for (int id : ph.filtration.order()) {
    if (!ph.on_surface[id] || V.simplex(id).dim() != 1 || !ph.pairing.is_positive(id)) continue;
    const int killer = ph.pairing.partner[id];
    if (killer >= 0 && ph.on_surface[killer]) continue;
    ++ph.generators;
  }
  for (int id : ph.filtration.order()) {
    if (ph.on_surface[id] || V.simplex(id).dim() != 2 || !ph.pairing.is_negative(id)) continue;
    const int gen = ph.pairing.partner[id];
    if (ph.on_surface[gen]) ph.killed.emplace_back(id, gen);
  }
  return ph;
}

std::vector<LoopCycle> loops_from_phase(const Phase& ph, LoopKind kind, const TriMesh& surface,
                                        const SimplicialComplex& surface_cx,
                                        std::vector<std::string>& notes) {
  std::vector<LoopCycle> out;
  std::set<int> used_edges;
  for (auto [killer, gen] : ph.killed) {
    Chain c = mark_loop(ph.pairing, killer, ph.filtration, ph.on_surface);
    bool on_surface = !c.empty();
    for (int e : c.ids) on_surface = on_surface && ph.on_surface[e];
    if (!on_surface) {
      notes.push_back(std::string(to_string(kind)) + " trace left the surface; skipped");
      continue;
    }
    Chain sc = transfer_edges(c, *ph.volume, surface_cx);
    for (int e : sc.ids)
      if (!used_edges.insert(e).second) {
        notes.push_back(std::string(to_string(kind)) +
                        " loops share surface edges; kept in pairing order");
        break;
      }
    out.push_back(make_loop(sc, kind, surface, surface_cx));
  }
  return out;
}

}  // namespace

LoopReport detect_loops(const TriMesh& surface, const TetComplex& interior,
                        const std::optional<TetComplex>& exterior, const DetectOptions& opts) {
  LoopReport report;
  report.genus = genus(surface);
  if (!interior.conforms_to(surface))
    throw ConformanceError("interior complex does not contain the surface");
  if (exterior && !exterior->conforms_to(surface))
    throw ConformanceError("exterior complex does not contain the surface");
  const auto surface_cx = surface_complex(surface);

  Phase inner = run_phase(surface, surface_cx, interior);
  report.surface_generators = inner.generators;
  report.interior_killed = static_cast<int>(inner.killed.size());
  report.handles = loops_from_phase(inner, LoopKind::handle, surface, surface_cx, report.notes);

  if (exterior) {
    Phase outer = run_phase(surface, surface_cx, *exterior);
    report.exterior_killed = static_cast<int>(outer.killed.size());
    report.tunnels = loops_from_phase(outer, LoopKind::tunnel, surface, surface_cx, report.notes);
  } else if (report.genus > 0) {
    CycleSpace space(surface_cx);
    for (const auto& h : report.handles) space.add(h.edges);
    const auto edge_ids = surface_cx.ids_of_dim(1);
    EdgeGraph graph;
    graph.vertex_count = static_cast<int>(surface.vertices.size());
    for (int id : edge_ids) {
      const auto& s = surface_cx.simplex(id);
      graph.edges.emplace_back(s[0], s[1]);
    }
    auto cycles = fundamental_cycles(graph);
    for (auto& c : cycles)
      for (int& e : c.ids) e = edge_ids[e];
    std::vector<std::pair<double, int>> by_length;
    for (std::size_t k = 0; k < cycles.size(); ++k)
      by_length.emplace_back(chain_length(cycles[k], surface_cx, surface), static_cast<int>(k));
    std::sort(by_length.begin(), by_length.end());
    for (auto [len, k] : by_length) {
      if (static_cast<int>(report.tunnels.size()) >= report.genus) break;
      if (!space.add(cycles[k])) continue;
      report.tunnels.push_back(make_loop(cycles[k], LoopKind::tunnel, surface, surface_cx));
    }
  }

  if (opts.shorten_loops) {
    for (auto& l : report.handles) l = shorten_loop(l, surface, opts.shorten);
    for (auto& l : report.tunnels) l = shorten_loop(l, surface, opts.shorten);
  }
  return report;
}

void write_loops(const LoopReport& report, std::ostream& out) {
  auto emit = [&](const LoopCycle& l) {
    out << to_string(l.kind) << ' ' << l.vertex_sequence.size();
    for (int v : l.vertex_sequence) out << ' ' << v;
    if (!l.vertex_sequence.empty()) out << ' ' << l.vertex_sequence.front();
    out << '\n';
  };
  for (const auto& l : report.handles) emit(l);
  for (const auto& l : report.tunnels) emit(l);
}

LoopReport read_loops(std::istream& in, const TriMesh& surface) {
  LoopReport report;
  const auto cx = surface_complex(surface);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::string kind;
    std::size_t count = 0;
    if (!(ss >> kind)) continue;
    if (!(ss >> count) || (kind != "handle" && kind != "tunnel"))
      throw ParseError("loop record malformed (line " + std::to_string(lineno) + ")");
    std::vector<int> walk(count + 1);
    for (auto& v : walk)
      if (!(ss >> v)) throw ParseError("loop record short (line " + std::to_string(lineno) + ")");
    if (count > 0 && walk.front() != walk.back())
      throw ParseError("loop record not closed (line " + std::to_string(lineno) + ")");
    walk.pop_back();
    Chain edges{1, {}};
    for (std::size_t i = 0; i < walk.size(); ++i) {
      std::vector<int> e{cx.id_of(Simplex{walk[i], walk[(i + 1) % walk.size()]})};
      symmetric_difference_inplace(edges.ids, e);
    }
    LoopCycle l;
    l.kind = kind == "handle" ? LoopKind::handle : LoopKind::tunnel;
    l.edges = edges;
    l.vertex_sequence = walk;
    l.length = walk_length(walk, surface);
    (l.kind == LoopKind::handle ? report.handles : report.tunnels).push_back(std::move(l));
  }
  return report;
}

std::string loops_json(const LoopReport& report) {
  nlohmann::json j;
  j["genus"] = report.genus;
  j["surface_generators"] = report.surface_generators;
  j["interior_killed"] = report.interior_killed;
  j["exterior_killed"] = report.exterior_killed;
  j["loops"] = nlohmann::json::array();
  for (const auto* list : {&report.handles, &report.tunnels})
    for (const auto& l : *list)
      j["loops"].push_back({{"kind", to_string(l.kind)},
                            {"vertex_count", l.vertex_sequence.size()},
                            {"length", l.length}});
  j["notes"] = report.notes;
  return j.dump(2);
}

}  // namespace phir

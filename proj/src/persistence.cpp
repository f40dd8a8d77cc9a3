#include "phir/persistence.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "phir/errors.hpp"

namespace phir {

std::size_t Pairing::pair_count() const {
  return static_cast<std::size_t>(
      std::count(sign.begin(), sign.end(), Sign::negative));
}

std::size_t Pairing::positive_count() const { return sign.size() - pair_count(); }

std::vector<std::pair<int, int>> Pairing::pairs(const Filtration& f) const {
  std::vector<std::pair<int, int>> out;
  for (int id : f.order())
    if (is_negative(id)) out.emplace_back(partner[id], id);
  return out;
}

Chain Pairing::reduced_chain(int negative_id, const Filtration& f) const {
  if (negative_id < 0 || static_cast<std::size_t>(negative_id) >= size() ||
      !is_negative(negative_id))
    throw ArgumentError("reduced_chain: simplex is not negative");
  Chain c;
  c.dim = f.complex().simplex(negative_id).dim() - 1;
  for (int pos : reduced_positions[negative_id]) c.ids.push_back(f.simplex_at(pos));
  std::sort(c.ids.begin(), c.ids.end());
  return c;
}

Pairing pair(const Filtration& f) {
  const auto& k = f.complex();
  const std::size_t n = f.size();
  Pairing p;
  p.sign.assign(n, Sign::positive);
  p.partner.assign(n, -1);
  p.reduced_positions.assign(n, {});
  // killer[pos] = position of the negative simplex whose reduced chain has
  // youngest element pos.
  std::vector<int> killer(n, -1);

  std::vector<int> c;
  for (std::size_t j = 0; j < n; ++j) {
    const int sigma = f.simplex_at(j);
    c.clear();
    for (int face : k.facet_ids(sigma)) c.push_back(f.position(face));
    std::sort(c.begin(), c.end());
    while (!c.empty()) {
      const int tau = c.back();
      if (killer[tau] < 0) break;
      symmetric_difference_inplace(c, p.reduced_positions[f.simplex_at(killer[tau])]);
    }
    if (c.empty()) continue;
    const int tau = c.back();
    const int tau_id = f.simplex_at(tau);
    assert(p.sign[tau_id] == Sign::positive);
    p.sign[sigma] = Sign::negative;
    p.partner[sigma] = tau_id;
    p.partner[tau_id] = sigma;
    killer[tau] = static_cast<int>(j);
    p.reduced_positions[sigma] = c;
  }
  for (int id : f.order())
    if (p.sign[id] == Sign::positive && p.partner[id] < 0) p.unpaired.push_back(id);
  return p;
}

Chain mark_loop(const Pairing& pairing, int d, const Filtration& f,
                const std::vector<bool>& on_surface) {
  const auto& k = f.complex();
  if (d < 0 || static_cast<std::size_t>(d) >= pairing.size())
    throw ArgumentError("mark_loop: unknown simplex");
  if (k.simplex(d).dim() != 2 || !pairing.is_negative(d))
    throw ArgumentError("mark_loop: expected a negative triangle");

  auto surface_generator = [&](int edge) {
    if (on_surface.empty() || !on_surface[edge]) return false;
    const int killer = pairing.partner[edge];
    return killer < 0 || !on_surface[killer];
  };

  std::vector<int> c;
  for (int face : k.facet_ids(d)) c.push_back(f.position(face));
  std::sort(c.begin(), c.end());
  while (!c.empty()) {
    const int tau = f.simplex_at(c.back());
    if (surface_generator(tau)) break;
    const int killer = pairing.partner[tau];
    if (killer < 0 || killer == d || !pairing.is_negative(killer)) break;
    symmetric_difference_inplace(c, pairing.reduced_positions[killer]);
  }

  Chain out;
  out.dim = 1;
  for (int pos : c) out.ids.push_back(f.simplex_at(pos));
  std::sort(out.ids.begin(), out.ids.end());
  return out;
}

std::size_t PersistenceDiagram::count(int dim, bool finite_only) const {
  return static_cast<std::size_t>(std::count_if(points.begin(), points.end(), [&](const auto& p) {
    return p.dim == dim && (!finite_only || !p.infinite());
  }));
}

PersistenceDiagram diagram(const Pairing& pairing, const Filtration& f,
                           bool keep_zero_persistence) {
  PersistenceDiagram d;
  const auto& k = f.complex();
  for (int id : f.order()) {
    if (pairing.is_negative(id)) {
      const int pos = pairing.partner[id];
      DiagramPoint pt{k.simplex(pos).dim(), f.value(pos), f.value(id)};
      if (keep_zero_persistence || pt.death > pt.birth) d.points.push_back(pt);
    }
  }
  for (int id : pairing.unpaired) d.points.push_back({k.simplex(id).dim(), f.value(id)});
  std::stable_sort(d.points.begin(), d.points.end(), [](const auto& a, const auto& b) {
    if (a.dim != b.dim) return a.dim < b.dim;
    if (a.birth != b.birth) return a.birth < b.birth;
    return a.death < b.death;
  });
  return d;
}

void write_diagram_csv(const PersistenceDiagram& d, std::ostream& out) {
  out << "dim,birth,death\n";
  char buf[64];
  for (const auto& p : d.points) {
    out << p.dim << ',';
    std::snprintf(buf, sizeof buf, "%.17g", p.birth);
    out << buf << ',';
    if (p.infinite()) {
      out << "inf\n";
    } else {
      std::snprintf(buf, sizeof buf, "%.17g", p.death);
      out << buf << '\n';
    }
  }
}

double min_enclosing_diameter(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double ab = distance(a, b), bc = distance(b, c), ca = distance(c, a);
  const double la = dot(b - a, c - a), lb = dot(a - b, c - b), lc = dot(a - c, b - c);
  // Right or obtuse: the longest side is a diameter.
  if (la <= 0.0 || lb <= 0.0 || lc <= 0.0) return std::max({ab, bc, ca});
  const double twice_area = norm(cross(b - a, c - a));
  return ab * bc * ca / twice_area;
}

namespace {

template <class TriangleValue>
Filtration point_cloud_filtration(std::span<const Vec3> points, double max_eps, int max_dim,
                                  TriangleValue triangle_value) {
  if (!(max_eps > 0.0)) throw ArgumentError("max_eps must be positive");
  if (max_dim < 0 || max_dim > 2) throw ArgumentError("max_dim must be 0, 1 or 2");
  const int n = static_cast<int>(points.size());
  std::vector<Simplex> simplices;
  std::vector<std::vector<double>> dist(n, std::vector<double>(n, 0.0));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) dist[i][j] = dist[j][i] = distance(points[i], points[j]);

  for (int i = 0; i < n; ++i) simplices.push_back(Simplex{i});
  if (max_dim >= 1)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (dist[i][j] <= max_eps) simplices.push_back(Simplex{i, j});
  if (max_dim >= 2)
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        if (dist[i][j] > max_eps) continue;
        for (int l = j + 1; l < n; ++l) {
          if (dist[i][l] > max_eps || dist[j][l] > max_eps) continue;
          if (triangle_value(i, j, l, dist) <= max_eps) simplices.push_back(Simplex{i, j, l});
        }
      }

  auto complex = std::make_shared<const SimplicialComplex>(
      SimplicialComplex::from_simplices(simplices));
  std::vector<double> key(complex->size(), 0.0);
  for (std::size_t id = 0; id < complex->size(); ++id) {
    const Simplex& s = complex->simplex(static_cast<int>(id));
    if (s.dim() == 1) key[id] = dist[s[0]][s[1]];
    if (s.dim() == 2) key[id] = triangle_value(s[0], s[1], s[2], dist);
  }
  return build_filtration(std::move(complex), key);
}

}  // namespace

Filtration rips_filtration(std::span<const Vec3> points, double max_eps, int max_dim) {
  return point_cloud_filtration(points, max_eps, max_dim,
                                [](int i, int j, int l, const auto& d) {
                                  return std::max({d[i][j], d[i][l], d[j][l]});
                                });
}

Filtration cech_filtration(std::span<const Vec3> points, double max_eps, int max_dim) {
  return point_cloud_filtration(points, max_eps, max_dim,
                                [&points](int i, int j, int l, const auto&) {
                                  return min_enclosing_diameter(points[i], points[j], points[l]);
                                });
}

std::vector<int> prefix_betti(const Pairing& pairing, const Filtration& f, std::size_t k,
                              int max_dim) {
  std::vector<int> betti(max_dim + 1, 0);
  const auto& cx = f.complex();
  for (std::size_t pos = 0; pos < k && pos < f.size(); ++pos) {
    const int id = f.simplex_at(pos);
    const int dim = cx.simplex(id).dim();
    if (pairing.is_positive(id)) {
      if (dim <= max_dim) ++betti[dim];
    } else if (dim - 1 <= max_dim) {
      --betti[dim - 1];
    }
  }
  return betti;
}

}  // namespace phir

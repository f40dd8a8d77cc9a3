#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "helpers.hpp"
#include "phir/fixtures.hpp"
#include "phir/persistence.hpp"

using namespace phir;

namespace {

Filtration random_filtration(const SimplicialComplex& cx, unsigned seed) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> key(cx.size());
  for (auto& k : key) k = u(rng);
  return build_filtration(std::make_shared<const SimplicialComplex>(cx), key);
}

std::vector<Vec3> circle(int n) {
  std::vector<Vec3> pts;
  for (int i = 0; i < n; ++i)
    pts.push_back({std::cos(2 * M_PI * i / n), std::sin(2 * M_PI * i / n), 0.0});
  return pts;
}

}  // namespace

TEST_CASE("pairing Betti numbers match the oracle on every prefix") {
  const std::vector<SimplicialComplex> complexes{surface_complex(testing::grid_torus(3)),
                                                 surface_complex(make_icosahedron()),
                                                 surface_complex(testing::genus2_connected_sum())};
  for (const auto& cx : complexes)
    for (unsigned seed = 0; seed < 3; ++seed) {
      const Filtration f = random_filtration(cx, seed);
      const Pairing p = pair(f);
      for (std::size_t k = 0; k <= f.size(); k += 7) {
        const auto b = prefix_betti(p, f, k, 2);
        const auto prefix = f.prefix_complex(k);
        for (int d = 0; d <= 2; ++d) CHECK(b[d] == betti_oracle(prefix, d));
      }
    }
}

TEST_CASE("unpaired simplices give the homology of the full complex") {
  const Filtration f = random_filtration(surface_complex(testing::genus2_connected_sum()), 11);
  const Pairing p = pair(f);
  int by_dim[3] = {0, 0, 0};
  for (int id : p.unpaired) ++by_dim[f.complex().simplex(id).dim()];
  CHECK(by_dim[0] == 1);
  CHECK(by_dim[1] == 4);
  CHECK(by_dim[2] == 1);
  CHECK(p.pair_count() + p.positive_count() == f.size());
}

TEST_CASE("reduced chain of a negative triangle is a cycle") {
  const Filtration f = random_filtration(surface_complex(testing::grid_torus(4)), 3);
  const Pairing p = pair(f);
  for (int id : f.order()) {
    if (!p.is_negative(id) || f.complex().simplex(id).dim() != 2) continue;
    const Chain c = p.reduced_chain(id, f);
    CHECK(f.complex().boundary(c).empty());
    CHECK(c.contains(p.partner[id]));
  }
}

TEST_CASE("mark_loop without a mask returns the reduced chain") {
  const Filtration f = random_filtration(surface_complex(testing::grid_torus(3)), 5);
  const Pairing p = pair(f);
  for (int id : f.order())
    if (p.is_negative(id) && f.complex().simplex(id).dim() == 2)
      CHECK(mark_loop(p, id, f) == p.reduced_chain(id, f));
}

TEST_CASE("8-point circle has one finite H1 point under Rips") {
  const auto pts = circle(8);
  const Filtration f = rips_filtration(pts, 2.5, 2);
  const PersistenceDiagram d = diagram(pair(f), f);
  CHECK(d.count(1, true) == 1);
  CHECK(d.count(0, false) - d.count(0, true) == 1);
  std::ostringstream csv;
  write_diagram_csv(d, csv);
  CHECK(csv.str().rfind("dim,birth,death\n", 0) == 0);
  CHECK(csv.str().find("inf") != std::string::npos);
}

TEST_CASE("Cech triangle values exceed Rips on the equilateral triangle") {
  const std::vector<Vec3> tri{{0, 0, 0}, {1, 0, 0}, {0.5, std::sqrt(3.0) / 2.0, 0}};
  CHECK(min_enclosing_diameter(tri[0], tri[1], tri[2]) == doctest::Approx(2.0 / std::sqrt(3.0)).epsilon(1e-12));
  const Filtration r = rips_filtration(tri, 3.0, 2);
  const Filtration c = cech_filtration(tri, 3.0, 2);
  const int t = r.complex().id_of(Simplex{0, 1, 2});
  CHECK(std::abs(r.value(t) - 1.0) < 1e-9);
  CHECK(std::abs(c.value(t) - 2.0 / std::sqrt(3.0)) < 1e-9);
  // Obtuse triangle: the longest side is the diameter.
  CHECK(min_enclosing_diameter({0, 0, 0}, {2, 0, 0}, {1, 0.1, 0}) == doctest::Approx(2.0));
}

TEST_CASE("zero-persistence pairs are dropped unless requested") {
  const auto pts = circle(8);
  const Filtration f = rips_filtration(pts, 2.5, 2);
  const Pairing p = pair(f);
  CHECK(diagram(p, f, true).points.size() > diagram(p, f).points.size());
  CHECK(diagram(p, f, true).points.size() == p.pair_count() + p.unpaired.size());
}

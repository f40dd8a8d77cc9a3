#include <doctest.h>

#include <memory>

#include "helpers.hpp"
#include "phir/complex.hpp"
#include "phir/errors.hpp"
#include "phir/fixtures.hpp"

using namespace phir;

TEST_CASE("simplex vertices are sorted and validated") {
  Simplex s{3, 1, 2};
  CHECK(s.dim() == 2);
  CHECK(s[0] == 1);
  CHECK(s[2] == 3);
  CHECK_THROWS_AS(Simplex({1, 1}), ArgumentError);
  CHECK_THROWS_AS(Simplex({0, 1, 2, 3, 4}), ArgumentError);
  CHECK(s.facets().size() == 3);
  CHECK(s.facets()[0] == Simplex{2, 3});
}

TEST_CASE("complex closure and ids") {
  std::vector<Simplex> top{Simplex{0, 1, 2}, Simplex{1, 2, 3}};
  auto cx = SimplicialComplex::from_simplices(top);
  CHECK(cx.count(0) == 4);
  CHECK(cx.count(1) == 5);
  CHECK(cx.count(2) == 2);
  CHECK(cx.find(Simplex{0, 3}) == -1);
  CHECK_THROWS_AS(cx.id_of(Simplex{0, 3}), LookupError);
  // Ids ordered by dimension.
  for (std::size_t i = 1; i < cx.size(); ++i)
    CHECK(cx.simplex(static_cast<int>(i - 1)).dim() <= cx.simplex(static_cast<int>(i)).dim());
}

TEST_CASE("boundary of a boundary vanishes") {
  auto cx = surface_complex(make_icosphere(1));
  for (int t : cx.ids_of_dim(2)) {
    Chain b = cx.boundary(t);
    CHECK(b.size() == 3);
    CHECK(cx.boundary(b).empty());
  }
}

TEST_CASE("chain addition is symmetric difference") {
  Chain a{1, {1, 3, 5}}, b{1, {3, 4}};
  CHECK(add_chains(a, b).ids == std::vector<int>{1, 4, 5});
  Chain c{2, {0}};
  CHECK_THROWS_AS(add_chains(a, c), DimensionMismatch);
  CHECK(add_chains(a, Chain{}).ids == a.ids);
}

TEST_CASE("filtration validation") {
  auto cx = std::make_shared<const SimplicialComplex>(
      SimplicialComplex::from_simplices(std::vector<Simplex>{Simplex{0, 1}}));
  // ids: 0 -> {0}, 1 -> {1}, 2 -> {0,1}
  CHECK_NOTHROW(Filtration(cx, {0, 1, 2}, {0.0, 0.0, 1.0}));
  CHECK_THROWS_AS(Filtration(cx, {2, 0, 1}, {0.0, 0.0, 0.0}), PreconditionError);
  CHECK_THROWS_AS(Filtration(cx, {0, 1, 2}, {0.0, 2.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(Filtration(cx, {0, 0, 2}, {0.0, 0.0, 1.0}), PreconditionError);
  CHECK_THROWS_AS(Filtration(cx, {0, 1, 2}, {-1.0, 0.0, 1.0}), PreconditionError);
}

TEST_CASE("build_filtration repairs keys so faces come first") {
  auto cx = std::make_shared<const SimplicialComplex>(
      SimplicialComplex::from_simplices(std::vector<Simplex>{Simplex{0, 1, 2}}));
  std::vector<double> key(cx->size(), 0.0);
  key[cx->id_of(Simplex{0})] = 5.0;
  Filtration f = build_filtration(cx, key);
  CHECK(f.value(cx->id_of(Simplex{0, 1})) == 5.0);
  CHECK(f.value(cx->id_of(Simplex{0, 1, 2})) == 5.0);
  CHECK(f.position(cx->id_of(Simplex{0})) < f.position(cx->id_of(Simplex{0, 1})));
}

TEST_CASE("betti oracle on closed surfaces") {
  auto sphere = surface_complex(make_icosahedron());
  CHECK(betti_oracle(sphere, 0) == 1);
  CHECK(betti_oracle(sphere, 1) == 0);
  CHECK(betti_oracle(sphere, 2) == 1);
  auto torus = surface_complex(testing::grid_torus(3));
  CHECK(torus.size() == 54);
  CHECK(betti_oracle(torus, 1) == 2);
  CHECK(betti_oracle(torus, 2) == 1);
  auto g2 = surface_complex(testing::genus2_connected_sum());
  CHECK(g2.size() == 100);
  CHECK(betti_oracle(g2, 0) == 1);
  CHECK(betti_oracle(g2, 1) == 4);
  CHECK(betti_oracle(g2, 2) == 1);
}

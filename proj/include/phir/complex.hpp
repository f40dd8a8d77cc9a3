#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace phir {

// A simplex of dimension 0-3 given by strictly increasing vertex ids.
class Simplex {
 public:
  Simplex() = default;
  // Sorts the vertices; throws ArgumentError on duplicates or bad size.
  Simplex(std::initializer_list<int> vertices);
  explicit Simplex(std::span<const int> vertices);

  int dim() const { return size_ - 1; }
  int size() const { return size_; }
  int operator[](int i) const { return v_[i]; }
  std::span<const int> vertices() const { return {v_.data(), static_cast<std::size_t>(size_)}; }

  // Codimension-1 faces, the i-th omitting vertex i.
  std::vector<Simplex> facets() const;

  friend bool operator==(const Simplex& a, const Simplex& b) {
    return a.size_ == b.size_ && a.v_ == b.v_;
  }
  friend bool operator<(const Simplex& a, const Simplex& b) {
    if (a.size_ != b.size_) return a.size_ < b.size_;
    return a.v_ < b.v_;
  }

 private:
  std::array<int, 4> v_{-1, -1, -1, -1};
  int size_ = 0;
};

struct SimplexHash {
  std::size_t operator()(const Simplex& s) const noexcept;
};

// Z/2 chain: a set of simplex ids of one dimension, kept sorted.
// dim == -1 marks a chain with no dimension attached (only valid when empty).
struct Chain {
  int dim = -1;
  std::vector<int> ids;

  bool empty() const { return ids.empty(); }
  std::size_t size() const { return ids.size(); }
  bool contains(int id) const;
  friend bool operator==(const Chain& a, const Chain& b) { return a.ids == b.ids; }
};

// Symmetric difference. Throws DimensionMismatch for nonempty chains of
// different dimension.
Chain add_chains(const Chain& a, const Chain& b);

// In-place symmetric difference of sorted id vectors.
void symmetric_difference_inplace(std::vector<int>& acc, std::span<const int> other);

// Face-closed simplicial complex. Ids are dense, ordered by
// (dimension, lexicographic vertices), and fixed at construction.
class SimplicialComplex {
 public:
  SimplicialComplex() = default;

  // Adds every face of every given simplex.
  static SimplicialComplex from_simplices(std::span<const Simplex> simplices);

  std::size_t size() const { return simplices_.size(); }
  int dimension() const { return dimension_; }
  std::size_t count(int dim) const;

  const Simplex& simplex(int id) const;
  std::span<const Simplex> simplices() const { return simplices_; }

  // Id of s, or -1 when absent.
  int find(const Simplex& s) const;
  // Id of s; throws LookupError when absent.
  int id_of(const Simplex& s) const;
  bool contains(const Simplex& s) const { return find(s) >= 0; }

  // Facet ids of a simplex, sorted ascending. Empty for vertices.
  std::span<const int> facet_ids(int id) const;
  Chain boundary(int id) const;
  // Boundary of a chain: sum of facet boundaries.
  Chain boundary(const Chain& c) const;

  // Ids of simplices of one dimension in id order.
  std::vector<int> ids_of_dim(int dim) const;

 private:
  std::vector<Simplex> simplices_;
  std::unordered_map<Simplex, int, SimplexHash> index_;
  std::vector<int> facet_offsets_;
  std::vector<int> facets_;
  int dimension_ = -1;
};

// Ordered simplices with nondecreasing scale values; faces precede cofaces.
class Filtration {
 public:
  Filtration() = default;

  // Validates the order and values; throws PreconditionError.
  Filtration(std::shared_ptr<const SimplicialComplex> complex, std::vector<int> order,
             std::vector<double> values);

  const SimplicialComplex& complex() const { return *complex_; }
  std::shared_ptr<const SimplicialComplex> complex_ptr() const { return complex_; }

  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  std::span<const int> order() const { return order_; }
  int simplex_at(std::size_t pos) const { return order_[pos]; }
  int position(int id) const { return position_[id]; }
  double value(int id) const { return values_[id]; }
  std::span<const double> values() const { return values_; }

  // Complex made of the first k simplices of the order.
  SimplicialComplex prefix_complex(std::size_t k) const;

 private:
  std::shared_ptr<const SimplicialComplex> complex_;
  std::vector<int> order_;
  std::vector<int> position_;
  std::vector<double> values_;
};

// Sorts by (value, dimension, id) after raising each simplex's value to the
// max over its faces, so any key yields a valid filtration.
Filtration build_filtration(std::shared_ptr<const SimplicialComplex> complex,
                            std::span<const double> key);
Filtration build_filtration(std::shared_ptr<const SimplicialComplex> complex,
                            const std::function<double(const Simplex&)>& key);

// rank H_p by dense Gaussian elimination over Z/2 on the full boundary
// matrices. Independent of the persistence code; used as a test oracle.
int betti_oracle(const SimplicialComplex& complex, int p);

// rank of the boundary map from dimension p to p-1 (0 for p == 0).
int boundary_rank(const SimplicialComplex& complex, int p);

}  // namespace phir

#include "phir/complex.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <set>
#include <string>

#include "phir/errors.hpp"

namespace phir {

Simplex::Simplex(std::initializer_list<int> vertices)
    : Simplex(std::span<const int>(vertices.begin(), vertices.size())) {}

Simplex::Simplex(std::span<const int> vertices) {
  if (vertices.empty() || vertices.size() > 4)
    throw ArgumentError("simplex must have 1 to 4 vertices, got " +
                        std::to_string(vertices.size()));
  size_ = static_cast<int>(vertices.size());
  std::copy(vertices.begin(), vertices.end(), v_.begin());
  std::sort(v_.begin(), v_.begin() + size_);
  for (int i = 0; i < size_; ++i) {
    if (v_[i] < 0) throw ArgumentError("negative vertex id in simplex");
    if (i > 0 && v_[i] == v_[i - 1]) throw ArgumentError("repeated vertex in simplex");
  }
}

std::vector<Simplex> Simplex::facets() const {
  std::vector<Simplex> out;
  if (size_ <= 1) return out;
  out.reserve(size_);
  for (int skip = 0; skip < size_; ++skip) {
    std::array<int, 3> f{};
    int k = 0;
    for (int i = 0; i < size_; ++i)
      if (i != skip) f[k++] = v_[i];
    out.emplace_back(std::span<const int>(f.data(), static_cast<std::size_t>(k)));
  }
  return out;
}

std::size_t SimplexHash::operator()(const Simplex& s) const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL * static_cast<std::uint64_t>(s.size());
  for (int v : s.vertices()) {
    h ^= static_cast<std::uint64_t>(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  h ^= h >> 31;
  h *= 0xbf58476d1ce4e5b9ULL;
  h ^= h >> 27;
  return static_cast<std::size_t>(h);
}

bool Chain::contains(int id) const { return std::binary_search(ids.begin(), ids.end(), id); }

void symmetric_difference_inplace(std::vector<int>& acc, std::span<const int> other) {
  if (other.empty()) return;
  std::vector<int> out;
  out.reserve(acc.size() + other.size());
  std::set_symmetric_difference(acc.begin(), acc.end(), other.begin(), other.end(),
                                std::back_inserter(out));
  acc.swap(out);
}

Chain add_chains(const Chain& a, const Chain& b) {
  if (!a.empty() && !b.empty() && a.dim != b.dim)
    throw DimensionMismatch("cannot add chains of dimension " + std::to_string(a.dim) +
                            " and " + std::to_string(b.dim));
  Chain out;
  out.dim = a.empty() ? b.dim : a.dim;
  out.ids = a.ids;
  symmetric_difference_inplace(out.ids, b.ids);
  return out;
}

SimplicialComplex SimplicialComplex::from_simplices(std::span<const Simplex> simplices) {
  std::set<Simplex> closure;
  std::vector<Simplex> stack(simplices.begin(), simplices.end());
  while (!stack.empty()) {
    Simplex s = stack.back();
    stack.pop_back();
    if (!closure.insert(s).second) continue;
    for (auto& f : s.facets()) stack.push_back(f);
  }

  SimplicialComplex k;
  // std::set<Simplex> iterates by (size, lexicographic vertices).
  k.simplices_.assign(closure.begin(), closure.end());
  k.index_.reserve(k.simplices_.size());
  for (std::size_t i = 0; i < k.simplices_.size(); ++i) {
    k.index_.emplace(k.simplices_[i], static_cast<int>(i));
    k.dimension_ = std::max(k.dimension_, k.simplices_[i].dim());
  }
  k.facet_offsets_.assign(k.simplices_.size() + 1, 0);
  for (std::size_t i = 0; i < k.simplices_.size(); ++i) {
    const Simplex& s = k.simplices_[i];
    std::vector<int> ids;
    for (auto& f : s.facets()) ids.push_back(k.index_.at(f));
    std::sort(ids.begin(), ids.end());
    k.facets_.insert(k.facets_.end(), ids.begin(), ids.end());
    k.facet_offsets_[i + 1] = static_cast<int>(k.facets_.size());
  }
  return k;
}

std::size_t SimplicialComplex::count(int dim) const {
  return static_cast<std::size_t>(std::count_if(
      simplices_.begin(), simplices_.end(), [dim](const Simplex& s) { return s.dim() == dim; }));
}

const Simplex& SimplicialComplex::simplex(int id) const {
  if (id < 0 || static_cast<std::size_t>(id) >= simplices_.size())
    throw LookupError("unknown simplex id " + std::to_string(id));
  return simplices_[id];
}

int SimplicialComplex::find(const Simplex& s) const {
  auto it = index_.find(s);
  return it == index_.end() ? -1 : it->second;
}

int SimplicialComplex::id_of(const Simplex& s) const {
  int id = find(s);
  if (id < 0) throw LookupError("simplex not in complex");
  return id;
}

std::span<const int> SimplicialComplex::facet_ids(int id) const {
  simplex(id);  // bounds check
  return {facets_.data() + facet_offsets_[id],
          static_cast<std::size_t>(facet_offsets_[id + 1] - facet_offsets_[id])};
}

Chain SimplicialComplex::boundary(int id) const {
  auto f = facet_ids(id);
  Chain c;
  c.dim = simplices_[id].dim() - 1;
  c.ids.assign(f.begin(), f.end());
  if (c.dim < 0) c.dim = -1;
  return c;
}

Chain SimplicialComplex::boundary(const Chain& c) const {
  Chain out;
  out.dim = c.dim >= 1 ? c.dim - 1 : -1;
  for (int id : c.ids) symmetric_difference_inplace(out.ids, facet_ids(id));
  return out;
}

std::vector<int> SimplicialComplex::ids_of_dim(int dim) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < simplices_.size(); ++i)
    if (simplices_[i].dim() == dim) out.push_back(static_cast<int>(i));
  return out;
}

Filtration::Filtration(std::shared_ptr<const SimplicialComplex> complex, std::vector<int> order,
                       std::vector<double> values)
    : complex_(std::move(complex)), order_(std::move(order)), values_(std::move(values)) {
  const std::size_t n = complex_->size();
  if (order_.size() != n || values_.size() != n)
    throw PreconditionError("filtration must order every simplex exactly once");
  position_.assign(n, -1);
  for (std::size_t pos = 0; pos < n; ++pos) {
    int id = order_[pos];
    if (id < 0 || static_cast<std::size_t>(id) >= n || position_[id] != -1)
      throw PreconditionError("filtration order is not a permutation");
    position_[id] = static_cast<int>(pos);
  }
  for (std::size_t pos = 0; pos < n; ++pos) {
    int id = order_[pos];
    if (!(values_[id] >= 0.0)) throw PreconditionError("filtration values must be >= 0");
    if (pos > 0 && values_[id] < values_[order_[pos - 1]])
      throw PreconditionError("filtration values decrease along the order");
    for (int f : complex_->facet_ids(id))
      if (position_[f] > static_cast<int>(pos))
        throw PreconditionError("face appears after its coface in filtration");
  }
}

SimplicialComplex Filtration::prefix_complex(std::size_t k) const {
  std::vector<Simplex> s;
  s.reserve(k);
  for (std::size_t i = 0; i < k && i < order_.size(); ++i) s.push_back(complex_->simplex(order_[i]));
  return SimplicialComplex::from_simplices(s);
}

Filtration build_filtration(std::shared_ptr<const SimplicialComplex> complex,
                            std::span<const double> key) {
  const auto& k = *complex;
  if (key.size() != k.size()) throw ArgumentError("filtration key must cover every simplex");
  std::vector<double> values(key.begin(), key.end());
  // Ids are ordered by dimension, so faces are repaired before cofaces.
  for (std::size_t id = 0; id < k.size(); ++id) {
    for (int f : k.facet_ids(static_cast<int>(id))) values[id] = std::max(values[id], values[f]);
    values[id] = std::max(values[id], 0.0);
  }
  std::vector<int> order(k.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values[a] != values[b]) return values[a] < values[b];
    int da = k.simplex(a).dim(), db = k.simplex(b).dim();
    if (da != db) return da < db;
    return a < b;
  });
  return Filtration(std::move(complex), std::move(order), std::move(values));
}

Filtration build_filtration(std::shared_ptr<const SimplicialComplex> complex,
                            const std::function<double(const Simplex&)>& key) {
  std::vector<double> values(complex->size());
  for (std::size_t id = 0; id < values.size(); ++id)
    values[id] = key(complex->simplex(static_cast<int>(id)));
  return build_filtration(std::move(complex), values);
}

namespace {

// Rank over Z/2 of the matrix whose columns are the given bitsets.
int gf2_rank(std::vector<std::vector<std::uint64_t>> cols, std::size_t rows) {
  int rank = 0;
  const std::size_t m = cols.size();
  for (std::size_t r = 0; r < rows && static_cast<std::size_t>(rank) < m; ++r) {
    const std::size_t word = r / 64;
    const std::uint64_t bit = std::uint64_t{1} << (r % 64);
    std::size_t pivot = m;
    for (std::size_t c = rank; c < m; ++c)
      if (cols[c][word] & bit) {
        pivot = c;
        break;
      }
    if (pivot == m) continue;
    std::swap(cols[rank], cols[pivot]);
    for (std::size_t c = rank + 1; c < m; ++c)
      if (cols[c][word] & bit)
        for (std::size_t w = word; w < cols[c].size(); ++w) cols[c][w] ^= cols[rank][w];
    ++rank;
  }
  return rank;
}

}  // namespace

int boundary_rank(const SimplicialComplex& complex, int p) {
  if (p <= 0) return 0;
  std::vector<int> row_index(complex.size(), -1);
  std::size_t rows = 0;
  for (std::size_t id = 0; id < complex.size(); ++id)
    if (complex.simplex(static_cast<int>(id)).dim() == p - 1) row_index[id] = static_cast<int>(rows++);
  const std::size_t words = (rows + 63) / 64;
  std::vector<std::vector<std::uint64_t>> cols;
  for (std::size_t id = 0; id < complex.size(); ++id) {
    if (complex.simplex(static_cast<int>(id)).dim() != p) continue;
    std::vector<std::uint64_t> col(words, 0);
    for (int f : complex.facet_ids(static_cast<int>(id))) {
      auto r = static_cast<std::size_t>(row_index[f]);
      col[r / 64] |= std::uint64_t{1} << (r % 64);
    }
    cols.push_back(std::move(col));
  }
  return gf2_rank(std::move(cols), rows);
}

int betti_oracle(const SimplicialComplex& complex, int p) {
  if (p < 0) return 0;
  const int n_p = static_cast<int>(complex.count(p));
  return n_p - boundary_rank(complex, p) - boundary_rank(complex, p + 1);
}

}  // namespace phir

#pragma once

#include <iosfwd>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "phir/complex.hpp"
#include "phir/geometry.hpp"

namespace phir {

enum class Sign : std::uint8_t { positive, negative };

// Result of the persistence pairing over one filtration. All ids refer to
// the filtration's complex.
struct Pairing {
  std::vector<Sign> sign;        // by simplex id
  std::vector<int> partner;      // by simplex id, -1 when unpaired
  std::vector<int> unpaired;     // positive simplices without partner, in filtration order
  // Reduced boundary chain of each negative simplex at pairing time, sorted
  // by filtration position; empty for positive simplices.
  std::vector<std::vector<int>> reduced_positions;

  std::size_t size() const { return sign.size(); }
  bool is_positive(int id) const { return sign[id] == Sign::positive; }
  bool is_negative(int id) const { return sign[id] == Sign::negative; }
  std::size_t pair_count() const;
  std::size_t positive_count() const;
  // (positive, negative) pairs in order of the negative simplex.
  std::vector<std::pair<int, int>> pairs(const Filtration& f) const;
  // The reduced chain of a negative simplex, in simplex ids.
  Chain reduced_chain(int negative_id, const Filtration& f) const;
};

// Processes simplices in filtration order. The boundary of each simplex is
// reduced by adding stored chains until its youngest simplex is an unpaired
// positive one (negative, paired with it) or the chain vanishes (positive).
Pairing pair(const Filtration& f);

// Re-traces the reduction of the boundary of negative triangle d and stops
// as soon as the youngest edge is a surface generator, i.e. an edge marked
// in on_surface that no surface triangle kills. Without a surface mask the
// trace stops at d's own partner and returns d's reduced chain.
Chain mark_loop(const Pairing& pairing, int d, const Filtration& f,
                const std::vector<bool>& on_surface = {});

struct DiagramPoint {
  int dim = 0;
  double birth = 0.0;
  double death = std::numeric_limits<double>::infinity();

  bool infinite() const { return death == std::numeric_limits<double>::infinity(); }
  double persistence() const { return death - birth; }
  friend bool operator==(const DiagramPoint&, const DiagramPoint&) = default;
};

struct PersistenceDiagram {
  std::vector<DiagramPoint> points;

  std::size_t count(int dim, bool finite_only = false) const;
};

// One point per pair and one infinite point per unpaired positive simplex.
// Pairs born and killed at the same value are dropped unless requested.
PersistenceDiagram diagram(const Pairing& pairing, const Filtration& f,
                           bool keep_zero_persistence = false);

// CSV with header `dim,birth,death`; infinite deaths written as `inf`.
void write_diagram_csv(const PersistenceDiagram& d, std::ostream& out);

// Vietoris-Rips: simplex value = largest pairwise vertex distance.
Filtration rips_filtration(std::span<const Vec3> points, double max_eps, int max_dim);

// Cech restricted to dimension <= 2: triangles enter at the diameter of the
// smallest ball enclosing their three vertices.
Filtration cech_filtration(std::span<const Vec3> points, double max_eps, int max_dim);

// Diameter of the minimal enclosing ball of three points.
double min_enclosing_diameter(const Vec3& a, const Vec3& b, const Vec3& c);

// Pairing-derived Betti numbers of the first k simplices of f.
std::vector<int> prefix_betti(const Pairing& pairing, const Filtration& f, std::size_t k,
                              int max_dim);

}  // namespace phir

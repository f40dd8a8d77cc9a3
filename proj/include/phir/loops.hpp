#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "phir/complex.hpp"
#include "phir/mesh.hpp"

namespace phir {

enum class LoopKind { handle, tunnel };
const char* to_string(LoopKind k);

// Closed edge cycle on a surface. `edges` are ids in surface_complex(mesh).
struct LoopCycle {
  Chain edges;
  LoopKind kind = LoopKind::handle;
  // Closed walk; the first vertex is not repeated at the end.
  std::vector<int> vertex_sequence;
  double length = 0.0;
};

struct LoopReport {
  std::vector<LoopCycle> handles;
  std::vector<LoopCycle> tunnels;
  int genus = 0;
  // Surface edges left unpaired by the surface-only prefix (2g expected).
  int surface_generators = 0;
  // Generators killed by interior / exterior triangles (g each expected).
  int interior_killed = 0;
  int exterior_killed = 0;
  std::vector<std::string> notes;
};

// Span of the 2-boundaries of a complex, in echelon form over Z/2, that can
// be extended with extra 1-cycles to test homological independence.
class CycleSpace {
 public:
  explicit CycleSpace(const SimplicialComplex& complex);

  // Reduces c against the span; empty result means c is in the span.
  std::vector<int> reduce(std::vector<int> c) const;
  bool contains(const Chain& c) const { return reduce(c.ids).empty(); }
  // Adds c to the span; returns false when it was already dependent.
  bool add(const Chain& c);
  std::size_t rank() const { return columns_.size(); }

 private:
  std::vector<std::vector<int>> columns_;
  std::vector<int> pivot_;  // edge id -> column index, -1 when none
};

// True iff the 1-cycle c (ids in `complex`) is a boundary. Throws
// ArgumentError when c is not a cycle.
bool null_homologous(const Chain& c, const SimplicialComplex& complex);

struct EdgeGraph {
  int vertex_count = 0;
  std::vector<std::pair<int, int>> edges;
};

// BFS spanning forest rooted at the lowest vertex id of each component; one
// cycle (edge indices into graph.edges) per co-tree edge.
std::vector<Chain> fundamental_cycles(const EdgeGraph& graph);

struct ShortenOptions {
  int max_rounds = 50;
  int window = 5;  // sub-arc length in vertices
};

// Local curve shortening: sub-arcs are replaced by shortest edge paths
// inside the star of their interior vertices when that strictly shortens
// the loop and the swapped region bounds on the surface.
LoopCycle shorten_loop(const LoopCycle& loop, const TriMesh& surface,
                       const ShortenOptions& opts = {});

// Builds a LoopCycle from a 1-cycle given in surface-complex edge ids.
LoopCycle make_loop(const Chain& edges, LoopKind kind, const TriMesh& surface,
                    const SimplicialComplex& surface_cx);

struct DetectOptions {
  ShortenOptions shorten;
  bool shorten_loops = true;
};

// Handle loops from the surface+interior filtration; tunnel loops from the
// surface+exterior filtration, or, without an exterior complex, from
// fundamental cycles independent of the handles and surface boundaries.
LoopReport detect_loops(const TriMesh& surface, const TetComplex& interior,
                        const std::optional<TetComplex>& exterior,
                        const DetectOptions& opts = {});

// Maps a chain of edges in one complex onto the equivalent edges of another.
Chain transfer_edges(const Chain& c, const SimplicialComplex& from, const SimplicialComplex& to);

// Line-set export: `kind vertex_count v0 v1 ... v0` per loop, where
// vertex_count is the number of distinct walk positions.
void write_loops(const LoopReport& report, std::ostream& out);
LoopReport read_loops(std::istream& in, const TriMesh& surface);
// JSON sidecar with genus, counts and per-loop lengths.
std::string loops_json(const LoopReport& report);

}  // namespace phir

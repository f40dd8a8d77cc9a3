#pragma once

#include <filesystem>
#include <iosfwd>

#include "phir/mesh.hpp"

namespace phir {

// Wavefront OBJ, `v` and `f` records only. Polygons are fan-triangulated
// from their first corner; negative (relative) indices are accepted.
TriMesh read_obj(std::istream& in);
TriMesh load_obj(const std::filesystem::path& path);
void write_obj(const TriMesh& mesh, std::ostream& out);
void save_obj(const TriMesh& mesh, const std::filesystem::path& path);

// TetGen .node/.ele. The index base (0 or 1) is taken from the first node
// record, as TetGen itself does.
TetComplex read_tetgen(std::istream& node, std::istream& ele);
TetComplex load_tetgen(const std::filesystem::path& node_path,
                       const std::filesystem::path& ele_path);
void save_tetgen(const TetComplex& tets, const std::filesystem::path& node_path,
                 const std::filesystem::path& ele_path);

}  // namespace phir

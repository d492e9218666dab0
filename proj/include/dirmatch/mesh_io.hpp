#pragma once

#include <string>
#include <variant>

#include "dirmatch/mesh.hpp"

namespace dirmatch {

enum class ShapeFormat { OFF, OBJ, PLY, XYZ };

using LoadedShape = std::variant<TriangleMesh, PointCloud>;

/// Format from file extension (case-insensitive). Throws ParseError on
/// unknown extensions.
ShapeFormat format_from_path(const std::string& path);

/// ASCII readers. XYZ yields a PointCloud, the mesh formats a TriangleMesh.
/// Vertex order is preserved exactly as in the file.
LoadedShape load_shape(const std::string& path, ShapeFormat format, const MeshOptions& opts = {});
LoadedShape load_shape(const std::string& path, const MeshOptions& opts = {});

void save_mesh(const std::string& path, const TriangleMesh& mesh, ShapeFormat format);
void save_point_cloud(const std::string& path, const PointCloud& cloud);
void save_shape(const std::string& path, const LoadedShape& shape);

}  // namespace dirmatch

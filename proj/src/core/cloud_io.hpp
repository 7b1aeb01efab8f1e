#ifndef QRECT_CORE_CLOUD_IO_HPP
#define QRECT_CORE_CLOUD_IO_HPP

#include <string>

#include "core/types.hpp"

namespace qrect {

/// Cloud file format: one JSON header line
///   {"ambient_dim":n,"resolution":h,"count":m,"weights":bool}
/// followed by `count` CSV rows of coordinates (weight appended as the last
/// column when present).
void save_cloud(const PointCloud& cloud, const std::string& path);
PointCloud load_cloud(const std::string& path);

std::string cloud_to_string(const PointCloud& cloud);
PointCloud cloud_from_string(const std::string& text);

}  // namespace qrect

#endif

#include "core/cloud_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace qrect {

std::string cloud_to_string(const PointCloud& cloud) {
  nlohmann::ordered_json header;
  header["ambient_dim"] = cloud.ambient_dim();
  header["resolution"] = cloud.resolution();
  header["count"] = static_cast<std::int64_t>(cloud.size());
  header["weights"] = cloud.has_weights();
  std::ostringstream out;
  out << header.dump() << "\n";
  char buf[64];
  for (Eigen::Index i = 0; i < cloud.size(); ++i) {
    for (int a = 0; a < cloud.ambient_dim(); ++a) {
      std::snprintf(buf, sizeof buf, "%.17g", cloud.points()(i, a));
      out << (a ? "," : "") << buf;
    }
    if (cloud.has_weights()) {
      std::snprintf(buf, sizeof buf, "%.17g", cloud.weights()[static_cast<std::size_t>(i)]);
      out << "," << buf;
    }
    out << "\n";
  }
  return out.str();
}

PointCloud cloud_from_string(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("cloud file: missing header");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidArgument(std::string("cloud file: bad header: ") + e.what());
  }
  const int n = header.at("ambient_dim").get<int>();
  const double resolution = header.at("resolution").get<double>();
  const std::int64_t count = header.at("count").get<std::int64_t>();
  const bool weighted = header.value("weights", false);
  if (n < 1 || count < 0) throw InvalidArgument("cloud file: bad header values");

  Mat pts(count, n);
  std::vector<double> w;
  if (weighted) w.reserve(static_cast<std::size_t>(count));
  for (std::int64_t i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw InvalidArgument("cloud file: truncated body");
    std::istringstream row(line);
    std::string field;
    for (int a = 0; a < n; ++a) {
      if (!std::getline(row, field, ',')) throw InvalidArgument("cloud file: short row");
      pts(i, a) = std::stod(field);
    }
    if (weighted) {
      if (!std::getline(row, field, ',')) throw InvalidArgument("cloud file: missing weight");
      w.push_back(std::stod(field));
    }
  }
  return PointCloud(std::move(pts), resolution, std::move(w));
}

void save_cloud(const PointCloud& cloud, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InvalidArgument("cannot open for writing: " + path);
  out << cloud_to_string(cloud);
  if (!out) throw InvalidArgument("write failed: " + path);
}

PointCloud load_cloud(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return cloud_from_string(buf.str());
}

}  // namespace qrect

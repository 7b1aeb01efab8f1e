#ifndef QRECT_CORE_GENERATORS_HPP
#define QRECT_CORE_GENERATORS_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "core/types.hpp"

namespace qrect {

/// Ground truth attached to a generated cloud, for oracle tests.
struct GroundTruth {
  double dimension = 1.0;        // similarity/box dimension of the idealized set
  bool uniformly_non_flat = false;
  std::string pbp_class;         // qualitative: "full" | "degenerate" | "graph"
};

struct GeneratedCloud {
  PointCloud cloud;
  GroundTruth truth;
};

/// Four-corner Cantor set: 4^m cell representatives (corners) of the maps
/// x -> lambda x + (1 - lambda) corner. dimension = log 4 / log(1/lambda).
GeneratedCloud cantor4(double lambda, int depth);

/// Koch-type curve from 4 similarity maps of the given ratio (tent angle
/// determined by the ratio); 4^m + 1 vertices. ratio in [1/4, 1/2);
/// dimension = log 4 / log(1/ratio), degenerating to a segment at 1/4.
GeneratedCloud koch(double ratio, int depth);

/// N samples of a midpoint-displacement function with global Lipschitz
/// constant <= L, verified exhaustively over all sample pairs before return.
GeneratedCloud lipschitz_graph(double L, int n_samples, std::uint64_t seed);

/// N evenly spaced samples of [0,1] x {0} in R^2.
GeneratedCloud segment(int n_samples);

/// N samples of a circular arc of the given radius spanning `angle` radians.
GeneratedCloud arc(double radius, double angle, int n_samples);

/// Cartesian product cloud E x [0,1] in R^{n+1}.
GeneratedCloud product_with_segment(const GeneratedCloud& base, int samples);

/// Generator spec for the CLI: kind + parameters.
struct GeneratorSpec {
  std::string kind;  // cantor4 | koch | lipschitz_graph | segment | arc | product
  double lambda = 0.25;   // cantor4
  double ratio = 1.0 / 3; // koch
  double lipschitz = 0.5; // lipschitz_graph
  double radius = 1.0;    // arc
  double angle = 1.5707963267948966; // arc
  int depth = 5;
  int count = 0;          // sample count where applicable (0 = derive from depth)
  int product_samples = 0;  // >0 wraps the base set into E x [0,1]
  std::uint64_t seed = 0;
};

GeneratedCloud generate(const GeneratorSpec& spec);

}  // namespace qrect

#endif

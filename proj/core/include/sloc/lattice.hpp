#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sloc/hermitian_operator.hpp"
#include "sloc/types.hpp"

namespace sloc {

enum class Sublattice : std::uint8_t { A, B };
enum class Boundary { Open, Periodic };

struct Site {
  Vec2 position;
  Sublattice sublattice = Sublattice::A;
  std::array<int, 2> cell{0, 0};
};

/// Site geometry, independent of any Hamiltonian. Lengths are in units of the
/// nearest-neighbour spacing a_l.
class SiteLattice {
 public:
  SiteLattice() = default;
  SiteLattice(std::vector<Site> sites, int dimension, Boundary boundary,
              std::vector<Vec2> periods = {});

  Index size() const { return static_cast<Index>(sites_.size()); }
  const Site& site(Index i) const { return sites_[static_cast<std::size_t>(i)]; }
  const std::vector<Site>& sites() const { return sites_; }
  const Vec2& position(Index i) const { return site(i).position; }
  int dimension() const { return dimension_; }
  Boundary boundary() const { return boundary_; }
  const std::vector<Vec2>& periods() const { return periods_; }

  Vec2 lower_corner() const { return lo_; }
  Vec2 upper_corner() const { return hi_; }
  /// Centre of the bounding box.
  Vec2 center() const { return 0.5 * (lo_ + hi_); }
  /// Index of the site closest to p (first one on ties).
  Index nearest_site(const Vec2& p) const;

  /// Sorted indices of sites inside the region: ball keeps |p-x|_2 < r,
  /// box keeps |p-x|_inf < r/2.
  std::vector<Index> sites_within(const Vec2& x, double r,
                                  RegionShape shape = RegionShape::Ball) const;

 private:
  std::vector<Site> sites_;
  int dimension_ = 2;
  Boundary boundary_ = Boundary::Open;
  std::vector<Vec2> periods_;
  Vec2 lo_ = Vec2::Zero();
  Vec2 hi_ = Vec2::Zero();
};

struct HaldaneParams {
  double t = 1.0;
  double t_c = 0.0;
  double phi = 0.0;
  double M = 0.0;

  /// |M| < 3*sqrt(3)*t_c*sin(phi)
  bool topological() const;
  void validate() const;

  static HaldaneParams haldane_default();   ///< t_c = t/2, phi = pi/2, M = 0
  static HaldaneParams massive_graphene();  ///< t_c = 0, M = (sqrt(3)/2) t
};

struct Model {
  SiteLattice lattice;
  HermitianOperator hamiltonian;
};

/// Honeycomb nearest-neighbour vectors from an A site.
std::array<Vec2, 3> honeycomb_bonds();

/// nx*ny honeycomb cells in a brick layout; cell (i,j) holds A at
/// (sqrt3*(i + (j%2)/2), 1.5*j) and B directly above it. Periodic boundaries
/// need ny even.
Model build_haldane(int nx, int ny, const HaldaneParams& p, Boundary boundary = Boundary::Open);

/// Left half (cells i < nx/2) uses `left`, right half uses `right`. Bonds
/// that cross the interface take the parameters of the side that owns the
/// bond midpoint.
Model build_heterostructure(int nx, int ny, const HaldaneParams& left, const HaldaneParams& right);

/// Open SSH chain with H(2c,2c+1) = t1 and H(2c+1,2c+2) = t2, sites at x = n.
Model build_ssh(int n_cells, double t1, double t2);

struct DisorderSpec {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  /// Disk region; empty means the whole lattice.
  std::optional<Vec2> disk_center;
  double disk_radius = 0.0;

  void validate() const;
};

/// Per-site uniform values on [-1/2, 1/2] from the counter-based stream: site n
/// always draws block n, so values do not depend on the region.
RealVector disorder_values(const SiteLattice& lat, std::uint64_t seed);

/// H + lambda * sum_{n in region} v_n |n><n|.
HermitianOperator apply_disorder(const HermitianOperator& H, const SiteLattice& lat,
                                 const DisorderSpec& d);

/// JSON export: {"schema_version", "dimension", "sites":[{x,y,sublattice}],
/// "entries":[{row,col,re,im}]} with upper-triangle entries only.
std::string export_json(const SiteLattice& lat, const HermitianOperator& H);

inline constexpr int lattice_schema_version = 1;

}  // namespace sloc

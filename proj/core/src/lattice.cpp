#include "sloc/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <utility>

#include <json.hpp>

#include "sloc/rng.hpp"

namespace sloc {

namespace {

constexpr double kSqrt3 = std::numbers::sqrt3;

bool finite(double v) { return std::isfinite(v); }

// Honeycomb positions live on the integer grid (u, v) with x = u*sqrt3/2 and
// y = v/2, which makes neighbour lookup exact.
using GridKey = std::pair<int, int>;

GridKey grid_key(const Vec2& p) {
  return {static_cast<int>(std::lround(2.0 * p.x() / kSqrt3)),
          static_cast<int>(std::lround(2.0 * p.y()))};
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

struct HoneycombBuilder {
  int nx, ny;
  Boundary boundary;
  std::vector<Site> sites;
  std::map<GridKey, Index> lookup;

  HoneycombBuilder(int nx_, int ny_, Boundary b) : nx(nx_), ny(ny_), boundary(b) {
    sites.reserve(static_cast<std::size_t>(2 * nx * ny));
    for (int j = 0; j < ny; ++j) {
      for (int i = 0; i < nx; ++i) {
        const Vec2 a(kSqrt3 * (i + 0.5 * (j % 2)), 1.5 * j);
        sites.push_back({a, Sublattice::A, {i, j}});
        sites.push_back({a + Vec2(0.0, 1.0), Sublattice::B, {i, j}});
      }
    }
    for (Index n = 0; n < static_cast<Index>(sites.size()); ++n) {
      lookup.emplace(grid_key(sites[static_cast<std::size_t>(n)].position), n);
    }
  }

  std::optional<Index> find(GridKey k) const {
    if (boundary == Boundary::Periodic) {
      const int mu = 2 * nx, mv = 3 * ny;
      k.first = ((k.first % mu) + mu) % mu;
      k.second = ((k.second % mv) + mv) % mv;
    }
    auto it = lookup.find(k);
    if (it == lookup.end()) return std::nullopt;
    return it->second;
  }

  static GridKey shift(GridKey k, const Vec2& d) {
    const GridKey dk = grid_key(d);
    return {k.first + dk.first, k.second + dk.second};
  }

  SiteLattice lattice() const {
    std::vector<Vec2> periods;
    if (boundary == Boundary::Periodic) {
      periods = {Vec2(kSqrt3 * nx, 0.0), Vec2(0.0, 1.5 * ny)};
    }
    return SiteLattice(sites, 2, boundary, std::move(periods));
  }
};

// Parameters for a site or bond given twice its grid u-coordinate. Cells
// i < nx/2 sit at u <= nx - 1, so the interface is the line u = nx - 1/2;
// a bond midpoint lying exactly on it belongs to the right side.
const HaldaneParams& side_params(int twice_u, int nx, const HaldaneParams& left,
                                 const HaldaneParams& right) {
  return twice_u < 2 * nx - 1 ? left : right;
}

Model build_honeycomb(int nx, int ny, Boundary boundary, const HaldaneParams& left,
                      const HaldaneParams& right, int split_nx) {
  HoneycombBuilder b(nx, ny, boundary);
  const auto deltas = honeycomb_bonds();
  std::vector<Triplet> upper;
  const Index n_sites = static_cast<Index>(b.sites.size());

  for (Index m = 0; m < n_sites; ++m) {
    const Site& s = b.sites[static_cast<std::size_t>(m)];
    const GridKey km = grid_key(s.position);
    const double sign = s.sublattice == Sublattice::A ? 1.0 : -1.0;

    const HaldaneParams& own = side_params(2 * km.first, split_nx, left, right);
    if (own.M != 0.0) upper.emplace_back(m, m, Complex(sign * own.M, 0.0));

    for (const Vec2& delta : deltas) {
      const Vec2 d1 = sign * delta;
      const auto k = b.find(HoneycombBuilder::shift(km, d1));
      if (k && s.sublattice == Sublattice::A) {
        const int twice = 2 * km.first + grid_key(d1).first;
        const HaldaneParams& p = side_params(twice, split_nx, left, right);
        const Index lo = std::min(m, *k), hi = std::max(m, *k);
        upper.emplace_back(lo, hi, Complex(-p.t, 0.0));
      }
      // Next-nearest hops m -> n through the (possibly virtual) middle site m + d1.
      for (const Vec2& delta2 : deltas) {
        const Vec2 d2 = -sign * delta2;
        const Vec2 e = d1 + d2;
        if (e.norm() < 0.5) continue;
        const auto n = b.find(HoneycombBuilder::shift(km, e));
        if (!n || *n <= m) continue;
        const int twice = 2 * km.first + grid_key(e).first;
        const HaldaneParams& p = side_params(twice, split_nx, left, right);
        if (p.t_c == 0.0) continue;
        const double nu = cross(d1, d2) > 0.0 ? 1.0 : -1.0;
        // H(n,m) = -t_c e^{i phi nu}; store the (m,n) entry, its conjugate.
        upper.emplace_back(m, *n, -p.t_c * std::polar(1.0, -p.phi * nu));
      }
    }
  }
  return {b.lattice(), HermitianOperator::from_upper(n_sites, upper)};
}

}  // namespace

SiteLattice::SiteLattice(std::vector<Site> sites, int dimension, Boundary boundary,
                         std::vector<Vec2> periods)
    : sites_(std::move(sites)), dimension_(dimension), boundary_(boundary),
      periods_(std::move(periods)) {
  if (dimension_ != 1 && dimension_ != 2) throw InvalidArgument("dimension must be 1 or 2");
  if (sites_.empty()) throw InvalidArgument("lattice has no sites");
  lo_ = Vec2::Constant(std::numeric_limits<double>::infinity());
  hi_ = -lo_;
  for (const Site& s : sites_) {
    lo_ = lo_.cwiseMin(s.position);
    hi_ = hi_.cwiseMax(s.position);
  }
}

Index SiteLattice::nearest_site(const Vec2& p) const {
  Index best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < size(); ++i) {
    const double d = (position(i) - p).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

std::vector<Index> SiteLattice::sites_within(const Vec2& x, double r, RegionShape shape) const {
  std::vector<Index> kept;
  for (Index i = 0; i < size(); ++i) {
    const Vec2 d = position(i) - x;
    const bool inside = shape == RegionShape::Ball ? d.norm() < r : d.cwiseAbs().maxCoeff() < 0.5 * r;
    if (inside) kept.push_back(i);
  }
  return kept;
}

bool HaldaneParams::topological() const {
  return std::abs(M) < 3.0 * kSqrt3 * t_c * std::sin(phi);
}

void HaldaneParams::validate() const {
  if (!finite(t) || !finite(t_c) || !finite(phi) || !finite(M)) {
    throw InvalidArgument("Haldane parameters must be finite");
  }
}

HaldaneParams HaldaneParams::haldane_default() {
  return {1.0, 0.5, std::numbers::pi / 2.0, 0.0};
}

HaldaneParams HaldaneParams::massive_graphene() {
  return {1.0, 0.0, 0.0, kSqrt3 / 2.0};
}

std::array<Vec2, 3> honeycomb_bonds() {
  return {Vec2(0.0, 1.0), Vec2(kSqrt3 / 2.0, -0.5), Vec2(-kSqrt3 / 2.0, -0.5)};
}

Model build_haldane(int nx, int ny, const HaldaneParams& p, Boundary boundary) {
  if (nx < 1 || ny < 1) throw InvalidArgument("nx and ny must be >= 1");
  p.validate();
  if (boundary == Boundary::Periodic && (nx < 2 || ny < 2 || ny % 2 != 0)) {
    throw InvalidArgument("periodic honeycomb needs nx >= 2 and even ny >= 2");
  }
  return build_honeycomb(nx, ny, boundary, p, p, nx);
}

Model build_heterostructure(int nx, int ny, const HaldaneParams& left, const HaldaneParams& right) {
  if (nx < 2 || ny < 1 || nx % 2 != 0) throw InvalidArgument("heterostructure needs even nx >= 2");
  left.validate();
  right.validate();
  return build_honeycomb(nx, ny, Boundary::Open, left, right, nx);
}

Model build_ssh(int n_cells, double t1, double t2) {
  if (n_cells < 1) throw InvalidArgument("n_cells must be >= 1");
  if (!finite(t1) || !finite(t2)) throw InvalidArgument("SSH hoppings must be finite");
  std::vector<Site> sites;
  const Index n = 2 * static_cast<Index>(n_cells);
  for (Index i = 0; i < n; ++i) {
    sites.push_back({Vec2(static_cast<double>(i), 0.0), i % 2 == 0 ? Sublattice::A : Sublattice::B,
                     {static_cast<int>(i / 2), 0}});
  }
  std::vector<Triplet> upper;
  for (Index i = 0; i + 1 < n; ++i) upper.emplace_back(i, i + 1, Complex(i % 2 == 0 ? t1 : t2, 0.0));
  return {SiteLattice(std::move(sites), 1, Boundary::Open), HermitianOperator::from_upper(n, upper)};
}

void DisorderSpec::validate() const {
  if (!finite(lambda)) throw InvalidArgument("disorder strength must be finite");
  if (disk_center && !(disk_radius > 0.0 && finite(disk_radius))) {
    throw InvalidArgument("disorder disk radius must be positive");
  }
}

RealVector disorder_values(const SiteLattice& lat, std::uint64_t seed) {
  const Philox4x32 rng(seed);
  RealVector v(lat.size());
  for (Index n = 0; n < lat.size(); ++n) v(n) = rng.uniform(static_cast<std::uint64_t>(n)) - 0.5;
  return v;
}

HermitianOperator apply_disorder(const HermitianOperator& H, const SiteLattice& lat,
                                 const DisorderSpec& d) {
  d.validate();
  if (H.dim() != lat.size()) throw InvalidArgument("operator and lattice sizes differ");
  if (d.lambda == 0.0) return H;
  const RealVector v = disorder_values(lat, d.seed);
  RealVector diag = RealVector::Zero(lat.size());
  for (Index n = 0; n < lat.size(); ++n) {
    if (d.disk_center && (lat.position(n) - *d.disk_center).norm() > d.disk_radius) continue;
    diag(n) = d.lambda * v(n);
  }
  return H + HermitianOperator::diagonal(diag);
}

std::string export_json(const SiteLattice& lat, const HermitianOperator& H) {
  nlohmann::json j;
  j["schema_version"] = lattice_schema_version;
  j["dimension"] = lat.dimension();
  j["boundary"] = lat.boundary() == Boundary::Open ? "open" : "periodic";
  auto& sites = j["sites"] = nlohmann::json::array();
  for (const Site& s : lat.sites()) {
    sites.push_back({{"x", s.position.x()},
                     {"y", s.position.y()},
                     {"sublattice", s.sublattice == Sublattice::A ? "A" : "B"}});
  }
  auto& entries = j["entries"] = nlohmann::json::array();
  const SparseMatrix& m = H.matrix();
  for (Index c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      if (it.row() > it.col()) continue;
      entries.push_back({{"row", it.row()}, {"col", it.col()},
                         {"re", it.value().real()}, {"im", it.value().imag()}});
    }
  }
  return j.dump();
}

}  // namespace sloc

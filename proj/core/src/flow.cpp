#include "sloc/flow.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sloc/linalg.hpp"
#include "sloc/operators.hpp"

namespace sloc {

// --- ProbePath -------------------------------------------------------------

double ProbePath::length() const {
  double len = 0.0;
  for (std::size_t i = 1; i < waypoints.size(); ++i) len += (waypoints[i] - waypoints[i - 1]).norm();
  return len;
}

Vec2 ProbePath::at(double t) const {
  if (waypoints.empty()) throw InvalidArgument("path has no waypoints");
  const double total = length();
  if (total == 0.0 || waypoints.size() == 1) return waypoints.front();
  double target = std::clamp(t, 0.0, 1.0) * total;
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    const double seg = (waypoints[i] - waypoints[i - 1]).norm();
    if (target <= seg || i + 1 == waypoints.size()) {
      const double u = seg > 0.0 ? std::min(target / seg, 1.0) : 0.0;
      return waypoints[i - 1] + u * (waypoints[i] - waypoints[i - 1]);
    }
    target -= seg;
  }
  return waypoints.back();
}

void ProbePath::validate() const {
  if (waypoints.empty()) throw InvalidArgument("path has no waypoints");
  if (t_grid.size() < 2 || t_grid.front() != 0.0 || t_grid.back() != 1.0) {
    throw InvalidArgument("t_grid must start at 0 and end at 1");
  }
  if (!std::is_sorted(t_grid.begin(), t_grid.end())) throw InvalidArgument("t_grid must be sorted");
  if (lambda.empty()) throw InvalidArgument("path Lambda is empty");
}

namespace {

double distance_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double len2 = ab.squaredNorm();
  const double u = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + u * ab)).norm();
}

}  // namespace

ProbePath ProbePath::through(const SiteLattice& lat, std::vector<Vec2> waypoints, double rho,
                             int samples) {
  if (waypoints.empty()) throw InvalidArgument("path has no waypoints");
  if (samples < 2) throw InvalidArgument("path needs at least two samples");
  ProbePath path;
  path.waypoints = std::move(waypoints);
  for (int i = 0; i < samples; ++i) path.t_grid.push_back(static_cast<double>(i) / (samples - 1));
  path.t_grid.back() = 1.0;
  const Vec2 x0 = path.waypoints.front(), x1 = path.waypoints.back();
  for (Index n = 0; n < lat.size(); ++n) {
    const Vec2& p = lat.position(n);
    bool keep = (p - x0).norm() < 1.5 * rho || (p - x1).norm() < 1.5 * rho;
    for (std::size_t i = 0; !keep && i < path.waypoints.size(); ++i) {
      const Vec2& a = path.waypoints[i];
      const Vec2& b = i + 1 < path.waypoints.size() ? path.waypoints[i + 1] : a;
      keep = distance_to_segment(p, a, b) < rho;
    }
    if (keep) path.lambda.push_back(n);
  }
  return path;
}

// --- spectral flow ---------------------------------------------------------

namespace {

struct Sample {
  double t = 0.0;
  RealVector values;
  DenseMatrix vectors;
};

class Tracker {
 public:
  Tracker(const HermitianOperator& H, const SiteLattice& lat, const Probe& probe,
          const ProbePath& path, const FlowOptions& opts)
      : H_(H), lat_(lat), probe_(probe), path_(path), opts_(opts), length_(path.length()) {}

  Sample sample(double t) const {
    Probe p = probe_;
    p.x = path_.at(t);
    const LocalizerMatrix lm = assemble(H_, lat_, p, path_.lambda);
    linalg::LanczosOptions lo;
    lo.vectors = true;
    lo.tol = 1e-10;
    auto ne = linalg::nearest_eigenpairs(lm.matrix, 0.0, opts_.tracked, lo);
    return {t, std::move(ne.values), std::move(ne.vectors)};
  }

  void run(FlowResult& out) {
    converged_ = true;
    std::vector<Sample> samples;
    Sample prev = sample(path_.t_grid.front());
    samples.push_back(prev);
    for (std::size_t i = 1; i < path_.t_grid.size(); ++i) {
      Sample next = sample(path_.t_grid[i]);
      interval(prev, next, 0, out.crossings, samples);
      samples.push_back(next);
      prev = std::move(next);
    }
    std::sort(samples.begin(), samples.end(), [](const Sample& a, const Sample& b) { return a.t < b.t; });
    for (const Sample& s : samples) {
      RealVector v = s.values;
      std::sort(v.data(), v.data() + v.size());
      out.spectrum.push_back({s.t, v});
    }
    std::sort(out.crossings.begin(), out.crossings.end(),
              [](const Crossing& a, const Crossing& b) { return a.t < b.t; });
    out.crossing_flow = 0;
    for (const Crossing& c : out.crossings) out.crossing_flow += c.direction;
    out.tracking_converged = converged_;
  }

 private:
  // Signed crossings between two samples, or nullopt if the matching is ambiguous.
  std::optional<std::vector<Crossing>> match(const Sample& a, const Sample& b) const {
    // No eigenvalue moves by more than kappa times the distance travelled.
    const double step = probe_.kappa * (b.t - a.t) * length_;
    const double wa = a.values.cwiseAbs().maxCoeff();
    const double wb = b.values.cwiseAbs().maxCoeff();
    if (step >= std::min(wa, wb)) return std::nullopt;
    std::vector<Crossing> found;
    auto best = [](const Vector& u, const DenseMatrix& vs, Index& arg) {
      const RealVector ov = (vs.adjoint() * u).cwiseAbs();
      return ov.maxCoeff(&arg);
    };
    for (Index i = 0; i < a.values.size(); ++i) {
      if (std::abs(a.values(i)) > step) continue;
      Index j = 0;
      if (best(a.vectors.col(i), b.vectors, j) < opts_.min_overlap) return std::nullopt;
      Index back = 0;
      if (best(b.vectors.col(j), a.vectors, back) < opts_.min_overlap || back != i) return std::nullopt;
      const double la = a.values(i), lb = b.values(j);
      if ((la < 0.0) != (lb < 0.0)) {
        const double u = la / (la - lb);
        found.push_back({a.t + u * (b.t - a.t), lb >= 0.0 ? 1 : -1});
      }
    }
    // Anything near zero at b must come from a near-zero eigenvalue at a.
    for (Index j = 0; j < b.values.size(); ++j) {
      if (std::abs(b.values(j)) > step) continue;
      Index i = 0;
      if (best(b.vectors.col(j), a.vectors, i) < opts_.min_overlap) return std::nullopt;
      if (std::abs(a.values(i)) > step && (a.values(i) < 0.0) != (b.values(j) < 0.0)) return std::nullopt;
    }
    return found;
  }

  void interval(const Sample& a, const Sample& b, int depth, std::vector<Crossing>& crossings,
                std::vector<Sample>& samples) {
    if (auto m = match(a, b)) {
      crossings.insert(crossings.end(), m->begin(), m->end());
      return;
    }
    if (depth >= opts_.max_refinements) {
      converged_ = false;
      return;
    }
    Sample mid = sample(0.5 * (a.t + b.t));
    interval(a, mid, depth + 1, crossings, samples);
    interval(mid, b, depth + 1, crossings, samples);
    samples.push_back(std::move(mid));
  }

  const HermitianOperator& H_;
  const SiteLattice& lat_;
  const Probe& probe_;
  const ProbePath& path_;
  const FlowOptions& opts_;
  double length_;
  bool converged_ = true;
};

void check_path_cover(const SiteLattice& lat, const Probe& probe, const ProbePath& path) {
  std::vector<Index> lam = path.lambda;
  std::sort(lam.begin(), lam.end());
  for (double t : path.t_grid) {
    const auto ball = lat.sites_within(path.at(t), probe.rho, probe.shape);
    if (!std::includes(lam.begin(), lam.end(), ball.begin(), ball.end())) {
      throw InvalidArgument("path Lambda does not cover the probe region at t=" + std::to_string(t));
    }
  }
}

}  // namespace

FlowResult spectral_flow(const HermitianOperator& H, const SiteLattice& lat, const Probe& probe,
                         const ProbePath& path, const FlowOptions& opts) {
  probe.validate();
  path.validate();
  if (opts.tracked < 1) throw InvalidArgument("need at least one tracked eigenpair");
  check_path_cover(lat, probe, path);

  FlowResult out;
  for (int e = 0; e < 2; ++e) {
    Probe p = probe;
    p.x = path.at(e == 0 ? 0.0 : 1.0);
    const LocalizerMatrix lm = assemble(H, lat, p, path.lambda);
    out.endpoints[static_cast<std::size_t>(e)] = half_signature(lm, opts.zero_tol);
    if (out.endpoints[static_cast<std::size_t>(e)].gap_closed) {
      throw InvalidArgument(std::string("localizer gap closed at the ") + (e == 0 ? "start" : "end") +
                            " of the path; flow undefined");
    }
  }
  out.flow = static_cast<int>((out.endpoints[1].signature() - out.endpoints[0].signature()) / 2);

  Tracker tracker(H, lat, probe, path, opts);
  tracker.run(out);
  out.method_agreement = out.tracking_converged && out.crossing_flow == out.flow;
  return out;
}

FlowStabilityReport flow_stability_check(const HermitianOperator& H, const HermitianOperator& W,
                                         const SiteLattice& lat, const Probe& probe,
                                         const ProbePath& path, const FlowOptions& opts) {
  const std::vector<Index> supp = support(W.matrix());
  for (int e = 0; e < 2; ++e) {
    const auto ball = lat.sites_within(path.at(e == 0 ? 0.0 : 1.0), probe.rho, probe.shape);
    for (Index s : ball) {
      if (std::binary_search(supp.begin(), supp.end(), s)) {
        throw InvalidArgument("perturbation touches an endpoint region");
      }
    }
  }
  FlowStabilityReport rep;
  rep.clean = spectral_flow(H, lat, probe, path, opts);
  rep.perturbed = spectral_flow(H + W, lat, probe, path, opts);
  rep.stable = rep.clean.flow == rep.perturbed.flow;
  for (const SpectrumSample& s : rep.perturbed.spectrum) {
    rep.t.push_back(s.t);
    rep.mu_perturbed.push_back(s.eigenvalues.cwiseAbs().minCoeff());
  }
  return rep;
}

double kernel_locality_check(const LocalizerMatrix& lm, double mu, const Vector& phi, double h_norm) {
  if (phi.size() != lm.dim()) throw InvalidArgument("eigenvector size mismatch");
  if (std::abs(phi.norm() - 1.0) > 1e-8) throw InvalidArgument("eigenvector is not normalized");
  const RealVector d = lm.distance();
  const double spread = (d.cast<Complex>().cwiseProduct(phi)).norm();
  return spread - (h_norm + std::abs(mu)) / lm.probe.kappa;
}

}  // namespace sloc

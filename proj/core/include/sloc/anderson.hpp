#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sloc/lattice.hpp"
#include "sloc/localizer.hpp"
#include "sloc/types.hpp"

namespace sloc {

/// Disorder ensemble H + lambda V_omega on an nx x ny Haldane lattice.
struct EnsembleSpec {
  int nx = 30;
  int ny = 30;
  HaldaneParams params = HaldaneParams::haldane_default();
  std::vector<double> lambda_list;
  int n_realizations = 0;
  std::vector<std::uint64_t> seeds;
  /// Probe centre, kappa and energy; rho comes from rho_grid. An empty
  /// centre means the site nearest to the lattice centre.
  Probe probe;
  std::optional<Vec2> center;
  std::vector<double> rho_grid;
  double dos_sigma = 0.05;

  void validate() const;
};

/// One (lambda, seed, rho) realization.
struct EnsembleRow {
  double lambda = 0.0;
  std::uint64_t seed = 0;
  double rho = 0.0;
  double g_rho = 0.0;
  double mu = 0.0;
  std::optional<int> index;  ///< empty when the localizer gap is closed
  double ratio = 0.0;        ///< g_rho / mu
  double dos0 = 0.0;
  bool failed = false;       ///< solver failure, see error
  std::string error;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};

struct EnsembleAggregate {
  double lambda = 0.0;
  double rho = 0.0;
  MeanStd g_rho, mu, index, ratio, dos0;
  int n_defined = 0;      ///< realizations with a defined index
  int n_undefined = 0;    ///< gap closed or solver failure
  int modal_index = 0;
  double agreement = 0.0; ///< fraction of defined indices equal to modal_index
};

struct EnsembleStats {
  std::vector<EnsembleRow> rows;  ///< lambda-major, then seed, then rho
  std::vector<EnsembleAggregate> aggregates;
};

/// Mean and population standard deviation; exactly zero spread for equal values.
MeanStd mean_std(const std::vector<double>& v);

/// Every realization is independent; rows are stored by position, so the
/// result does not depend on the thread count.
EnsembleStats run_ensemble(const EnsembleSpec& spec, int threads = 1);

/// 1 / (rho^d dos0), the heuristic expected local gap.
double expected_gap_estimate(double rho, double dos0, int d);

/// (C_F ||H|| ||[D,H]|| dos0^2)^(-1/(2d-1)).
double rho_c_estimate(double h_norm, double comm_norm, double dos0, double C_F, int d);

}  // namespace sloc

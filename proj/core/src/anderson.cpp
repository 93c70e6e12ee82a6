#include "sloc/anderson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "sloc/linalg.hpp"
#include "sloc/localgap.hpp"
#include "sloc/parallel.hpp"

namespace sloc {

void EnsembleSpec::validate() const {
  if (nx < 2 || ny < 2 || ny % 2 != 0) throw InvalidArgument("ensemble lattice needs nx >= 2 and even ny >= 2");
  params.validate();
  if (lambda_list.empty()) throw InvalidArgument("lambda_list is empty");
  for (double l : lambda_list) {
    if (!(l >= 0.0) || !std::isfinite(l)) throw InvalidArgument("disorder strengths must be finite and >= 0");
  }
  if (n_realizations < 1) throw InvalidArgument("n_realizations must be positive");
  if (seeds.size() != static_cast<std::size_t>(n_realizations)) {
    throw InvalidArgument("seeds must list exactly n_realizations entries");
  }
  if (rho_grid.empty()) throw InvalidArgument("rho_grid is empty");
  for (double r : rho_grid) {
    if (!(r > 0.0)) throw InvalidArgument("rho values must be positive");
  }
  if (!(probe.kappa > 0.0)) throw InvalidArgument("kappa must be positive");
  if (!(dos_sigma > 0.0)) throw InvalidArgument("dos_sigma must be positive");
}

MeanStd mean_std(const std::vector<double>& v) {
  if (v.empty()) return {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
  if (std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); })) return {v.front(), 0.0};
  double sum = 0.0;
  for (double x : v) sum += x;
  const double mean = sum / static_cast<double>(v.size());
  double ss = 0.0;
  for (double x : v) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(v.size()))};
}

namespace {

EnsembleAggregate aggregate(double lambda, double rho, const std::vector<const EnsembleRow*>& rows) {
  EnsembleAggregate a;
  a.lambda = lambda;
  a.rho = rho;
  std::vector<double> g, mu, idx, ratio, dos;
  std::map<int, int> counts;
  for (const EnsembleRow* r : rows) {
    if (r->failed) {
      ++a.n_undefined;
      continue;
    }
    g.push_back(r->g_rho);
    mu.push_back(r->mu);
    dos.push_back(r->dos0);
    if (std::isfinite(r->ratio)) ratio.push_back(r->ratio);
    if (r->index) {
      idx.push_back(*r->index);
      ++counts[*r->index];
    } else {
      ++a.n_undefined;
    }
  }
  a.n_defined = static_cast<int>(idx.size());
  a.g_rho = mean_std(g);
  a.mu = mean_std(mu);
  a.index = mean_std(idx);
  a.ratio = mean_std(ratio);
  a.dos0 = mean_std(dos);
  int best = -1;
  for (const auto& [value, n] : counts) {
    if (n > best) {
      best = n;
      a.modal_index = value;
    }
  }
  a.agreement = a.n_defined > 0 ? static_cast<double>(best) / a.n_defined : 0.0;
  return a;
}

}  // namespace

EnsembleStats run_ensemble(const EnsembleSpec& spec, int threads) {
  spec.validate();
  const Model open = build_haldane(spec.nx, spec.ny, spec.params, Boundary::Open);
  const Model periodic = build_haldane(spec.nx, spec.ny, spec.params, Boundary::Periodic);
  const Vec2 x = spec.center.value_or(open.lattice.center());
  const std::size_t n_seeds = spec.seeds.size();
  const std::size_t n_rho = spec.rho_grid.size();

  EnsembleStats stats;
  stats.rows.resize(spec.lambda_list.size() * n_seeds * n_rho);
  parallel_for(spec.lambda_list.size() * n_seeds, threads, [&](std::size_t job) {
    const double lambda = spec.lambda_list[job / n_seeds];
    const std::uint64_t seed = spec.seeds[job % n_seeds];
    EnsembleRow* out = &stats.rows[job * n_rho];
    for (std::size_t r = 0; r < n_rho; ++r) {
      out[r].lambda = lambda;
      out[r].seed = seed;
      out[r].rho = spec.rho_grid[r];
    }
    try {
      const DisorderSpec dis{lambda, seed, std::nullopt, 0.0};
      const HermitianOperator h = apply_disorder(open.hamiltonian, open.lattice, dis);
      const HermitianOperator hp = apply_disorder(periodic.hamiltonian, periodic.lattice, dis);
      const double dos0 = dos_window(hp, spec.probe.energy, spec.dos_sigma);
      for (std::size_t r = 0; r < n_rho; ++r) {
        EnsembleRow& row = out[r];
        row.dos0 = dos0;
        try {
          row.g_rho = local_gap(h, open.lattice, x, row.rho, spec.probe.energy, spec.probe.shape).g_rho;
          Probe p = spec.probe;
          p.x = x;
          p.rho = row.rho;
          const IndexResult ir = half_signature(assemble(h, open.lattice, p));
          row.mu = ir.mu;
          row.index = ir.index();
          row.ratio = row.mu > 0.0 ? row.g_rho / row.mu : std::numeric_limits<double>::infinity();
        } catch (const Error& e) {
          row.failed = true;
          row.error = e.what();
        }
      }
    } catch (const Error& e) {
      for (std::size_t r = 0; r < n_rho; ++r) {
        out[r].failed = true;
        out[r].error = e.what();
      }
    }
  });

  for (std::size_t l = 0; l < spec.lambda_list.size(); ++l) {
    for (std::size_t r = 0; r < n_rho; ++r) {
      std::vector<const EnsembleRow*> cell;
      for (std::size_t s = 0; s < n_seeds; ++s) cell.push_back(&stats.rows[(l * n_seeds + s) * n_rho + r]);
      stats.aggregates.push_back(aggregate(spec.lambda_list[l], spec.rho_grid[r], cell));
    }
  }
  return stats;
}

double expected_gap_estimate(double rho, double dos0, int d) {
  if (!(rho > 0.0)) throw InvalidArgument("rho must be positive");
  if (!(dos0 > 0.0)) throw InvalidArgument("dos0 must be positive");
  if (d < 1) throw InvalidArgument("dimension must be positive");
  return 1.0 / (std::pow(rho, d) * dos0);
}

double rho_c_estimate(double h_norm, double comm_norm, double dos0, double C_F, int d) {
  if (!(h_norm > 0.0) || !(comm_norm > 0.0) || !(C_F > 0.0) || !(dos0 >= 0.0) || d < 1) {
    throw InvalidArgument("rho_c estimate needs positive inputs");
  }
  if (dos0 == 0.0) return std::numeric_limits<double>::infinity();
  return std::pow(C_F * h_norm * comm_norm * dos0 * dos0, -1.0 / (2.0 * d - 1.0));
}

}  // namespace sloc

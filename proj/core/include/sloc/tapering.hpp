#pragma once

#include <optional>
#include <vector>

#include "sloc/hermitian_operator.hpp"
#include "sloc/lattice.hpp"
#include "sloc/tapering_profile.hpp"
#include "sloc/types.hpp"

namespace sloc {

struct CfFourierOptions {
  double rel_tol = 1e-3;   ///< on the extrapolated tail
  int initial_blocks = 16; ///< one block = two periods of sin(p/2)
  int max_blocks = 2048;
};

struct CfFourierResult {
  double value = 0.0;
  double truncated = 0.0;    ///< integral up to p_max
  double tail = 0.0;         ///< power-law extrapolation beyond p_max
  double tail_uncertainty = 0.0;
  double decay_exponent = 0.0;
  double p_max = 0.0;
};

/// |hat phi(p)| with hat phi(p) = (1/2 pi) int_0^1 e^{-ipx} phi(x) dx.
double phi_hat_abs(const TaperingProfile& f, double p);

/// C_F = (4 / C_phi) int |hat phi(p)| |sin(p/2)| dp. Throws ConvergenceError
/// when the integral diverges (tail decaying no faster than 1/p) or the tail
/// cannot be pinned down within max_blocks.
CfFourierResult cf_fourier_detailed(const TaperingProfile& f, const CfFourierOptions& opts = {});
double cf_fourier(const TaperingProfile& f, const CfFourierOptions& opts = {});

/// rho ||[F_rho, H] R|| / ||[D, H] R|| with F_rho = F(|X - x| / rho) and
/// R = (i + D / delta)^{-1}, or plain norms without delta. Requires rho to be
/// at most a third of the smallest lattice extent.
double cf_direct(const HermitianOperator& H, const SiteLattice& lat, const Vec2& x, double rho,
                 const TaperingProfile& f, std::optional<double> delta = std::nullopt);

struct CfSweepRow {
  double k = 0.0;
  double rho = 0.0;
  double cf = 0.0;
};

std::vector<CfSweepRow> cf_sweep(const HermitianOperator& H, const SiteLattice& lat, const Vec2& x,
                                 const std::vector<double>& rho_grid, TaperFamily family,
                                 const std::vector<double>& k_list,
                                 std::optional<double> delta = std::nullopt, int threads = 1);

/// Smallest extent of the lattice bounding box over its dimensions.
double lattice_extent(const SiteLattice& lat);

}  // namespace sloc

#pragma once

#include <string>

namespace sloc {

enum class TaperFamily {
  Beta,  ///< phi_k(x) = x^k (1-x)^k
  Exp,   ///< phi_k(x) = exp(-2^-k / x) exp(-2^-k / (1-x))
};

/// Even tapering profile F: 1 on [-1/2, 1/2], 0 outside (-1, 1), built from the
/// normalized step function varphi(x) = (1/C_phi) int_0^x phi.
class TaperingProfile {
 public:
  TaperingProfile(TaperFamily family, double k);

  TaperFamily family() const { return family_; }
  double k() const { return k_; }
  /// C_phi = int_0^1 phi.
  double c_phi() const { return c_phi_; }
  std::string name() const;

  /// Bump function on [0, 1]; zero outside.
  double phi(double x) const;
  /// Normalized step function, clamped to 0 below 0 and 1 above 1.
  double step(double x) const;
  /// F(y) = 1 - step(2|y| - 1).
  double operator()(double y) const;

 private:
  double partial_integral(double a, double b) const;

  TaperFamily family_;
  double k_;
  double c_phi_;
};

TaperingProfile build_profile(TaperFamily family, double k);

TaperFamily parse_taper_family(const std::string& s);
std::string to_string(TaperFamily f);

}  // namespace sloc

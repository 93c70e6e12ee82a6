#include "sloc/tapering_profile.hpp"

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "sloc/types.hpp"

namespace sloc {

TaperingProfile::TaperingProfile(TaperFamily family, double k) : family_(family), k_(k) {
  if (!(k >= 0.0) || !std::isfinite(k)) throw InvalidArgument("tapering parameter k must be >= 0");
  if (family_ == TaperFamily::Beta) {
    c_phi_ = boost::math::beta(k + 1.0, k + 1.0);
  } else {
    c_phi_ = 2.0 * partial_integral(0.0, 0.5);
  }
}

std::string TaperingProfile::name() const {
  std::ostringstream os;
  os << to_string(family_) << '(' << k_ << ')';
  return os.str();
}

double TaperingProfile::phi(double x) const {
  if (x < 0.0 || x > 1.0) return 0.0;
  if (family_ == TaperFamily::Beta) {
    if (k_ == 0.0) return 1.0;
    return std::pow(x * (1.0 - x), k_);
  }
  if (x == 0.0 || x == 1.0) return 0.0;
  const double s = std::pow(2.0, -k_);
  return std::exp(-s / x - s / (1.0 - x));
}

double TaperingProfile::partial_integral(double a, double b) const {
  if (b <= a) return 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      [this](double x) { return phi(x); }, a, b, 10, 1e-11);
}

double TaperingProfile::step(double x) const {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  if (family_ == TaperFamily::Beta) return boost::math::ibeta(k_ + 1.0, k_ + 1.0, x);
  // phi is symmetric about 1/2; integrate over the shorter side.
  if (x <= 0.5) return partial_integral(0.0, x) / c_phi_;
  return 1.0 - partial_integral(x, 1.0) / c_phi_;
}

double TaperingProfile::operator()(double y) const { return 1.0 - step(2.0 * std::abs(y) - 1.0); }

TaperingProfile build_profile(TaperFamily family, double k) { return TaperingProfile(family, k); }

TaperFamily parse_taper_family(const std::string& s) {
  if (s == "beta") return TaperFamily::Beta;
  if (s == "exp") return TaperFamily::Exp;
  throw InvalidArgument("unknown tapering family '" + s + "' (expected beta or exp)");
}

std::string to_string(TaperFamily f) { return f == TaperFamily::Beta ? "beta" : "exp"; }

}  // namespace sloc

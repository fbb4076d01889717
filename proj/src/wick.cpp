#include "phi4/wick.hpp"

#include <cmath>
#include <stdexcept>

namespace phi4 {

double hermite(int k, double x, double sigma) {
  switch (k) {
    case 0:
      return 1.0;
    case 1:
      return x;
    case 2:
      return x * x - sigma;
    case 3:
      return x * (x * x - 3.0 * sigma);
    case 4:
      return x * x * (x * x - 6.0 * sigma) + 3.0 * sigma * sigma;
    default:
      throw std::invalid_argument("hermite: unsupported degree (need 0 <= k <= 4)");
  }
}

namespace {

struct KahanAcc {
  double sum = 0.0, comp = 0.0;
  void add(double x) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

}  // namespace

WickConstants wick_constants(int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("wick_constants: cutoff must be >= 0");
  KahanAcc c, cw;
  for (int n1 = -cutoff; n1 <= cutoff; ++n1) {
    for (int n2 = -cutoff; n2 <= cutoff; ++n2) {
      if (!in_ball(n1, n2, cutoff)) continue;
      const double k2 = static_cast<double>(n1) * n1 + static_cast<double>(n2) * n2;
      c.add(1.0 / (1.0 + k2));
      cw.add(1.0 / (2.0 + k2));
    }
  }
  return {cutoff, c.sum, cw.sum, c.sum - cw.sum};
}

double d_limit() {
  static const double value = wick_constants(kLimitCutoff).d_n;
  return value;
}

WickBundle wick_powers(const GridField& v, double sigma) {
  if (sigma < 0.0) throw std::invalid_argument("wick_powers: sigma must be >= 0");
  const int m = v.size();
  WickBundle b{v, GridField(m), GridField(m), GridField(m), sigma};
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const double x = v.at(j, k);
      b.p2.at(j, k) = hermite(2, x, sigma);
      b.p3.at(j, k) = hermite(3, x, sigma);
      b.p4.at(j, k) = hermite(4, x, sigma);
    }
  }
  return b;
}

WickBundle convert_reference(const WickBundle& b, double d) {
  const double sigma_new = b.sigma - d;
  if (sigma_new < 0.0)
    throw std::invalid_argument("convert_reference: target variance sigma - d is negative");
  const int m = b.grid_size();
  WickBundle out{b.v, GridField(m), GridField(m), GridField(m), sigma_new};
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const double x = b.v.at(j, k);
      const double q2 = b.p2.at(j, k) + d;
      out.p2.at(j, k) = q2;
      out.p3.at(j, k) = b.p3.at(j, k) + 3.0 * d * x;
      out.p4.at(j, k) = b.p4.at(j, k) + 6.0 * d * q2 - 3.0 * d * d;
    }
  }
  return out;
}

}  // namespace phi4

#pragma once

#include <array>
#include <memory>
#include <vector>

#include "phi4/spectral_field.hpp"
#include "phi4/wick.hpp"

namespace phi4 {

/// Truncated power-series helpers (coefficient vectors in t).
namespace series {

std::vector<double> mul(const std::vector<double>& a, const std::vector<double>& b,
                        int max_order = -1);
std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b);

/// exp of a series with zero constant term, truncated at max_order.
std::vector<double> exp(const std::vector<double>& u, int max_order);

double eval(const std::vector<double>& p, double t);

}  // namespace series

/// Prepared per-sample data for observable evaluation: Wick integral means of
/// the field and spectral pairings, computed once and reused.
class FieldEval {
 public:
  FieldEval(const SpectralField& phi, double sigma);

  /// int :phi^k: dx for k = 0..4 (k = 0 gives 1, k = 1 the spatial mean).
  double wick_mean(int k) const { return wick_means_.at(static_cast<std::size_t>(k)); }

  /// <phi, f> = sum_n phi_n conj(f_n); real for real fields.
  double pair_with(const SpectralField& f) const;

  double sigma() const { return sigma_; }

 private:
  const SpectralField* phi_;
  double sigma_;
  std::array<double, 5> wick_means_{};
};

/// Polynomial observable built from the primitives
///   const c,  pair(f) = <phi, f>,  wickint(k) = int :phi^k: dx,
/// closed under sum, product and integer powers. Polynomial growth holds by
/// construction, and the Taylor expansion at a constant field is exact.
class Observable {
 public:
  Observable() = default;

  static Observable constant(double c);
  static Observable pair(SpectralField f);
  static Observable wick_integral(int k);

  Observable operator+(const Observable& other) const;
  Observable operator*(const Observable& other) const;
  Observable operator*(double s) const;
  Observable pow(int p) const;

  /// Maximal degree in the field.
  int degree() const;

  /// Evaluates F at the field scale * phi, with Wick primitives taken at
  /// variance scale^2 * sigma(phi): pair contributes scale * <phi, f> and
  /// wickint(k) contributes scale^k * int :phi^k:.
  double eval(const FieldEval& ev, double scale = 1.0) const;

  /// F(phi) with Wick variance sigma for phi's reference measure.
  double eval_at(const SpectralField& phi, double sigma) const;

  /// Exact coefficients of t in F(w + t v), the Wick variance of the argument
  /// scaling as t^2 * sigma(v); v's enhanced data enters through its bundle
  /// means. Length degree()+1.
  std::vector<double> taylor_at(double w, const FieldEval& v_eval) const;

 private:
  struct Primitive {
    enum class Kind { Pair, WickInt };
    Kind kind = Kind::WickInt;
    int k = 0;
    std::shared_ptr<const SpectralField> f;
  };
  struct Factor {
    std::size_t prim = 0;
    int power = 1;
  };
  struct Term {
    double coeff = 0.0;
    std::vector<Factor> factors;
  };

  std::size_t intern(const Primitive& p);
  static Observable from_parts(std::vector<Primitive> prims, std::vector<Term> terms);

  std::vector<Primitive> prims_;
  std::vector<Term> terms_;
};

/// Evaluates F at phi = sqrt(eps) * psi where sigma is the Wick variance of
/// psi's reference, so the primitives see variance eps * sigma.
double observable_eval(const Observable& f, const SpectralField& psi, double eps, double sigma);

}  // namespace phi4

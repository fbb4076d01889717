#pragma once

#include <complex>
#include <vector>

namespace phi4 {

/// Integer frequency on the dual lattice of the torus.
struct Frequency {
  int n1 = 0;
  int n2 = 0;

  int norm2() const { return n1 * n1 + n2 * n2; }
};

inline bool in_ball(int n1, int n2, int cutoff) {
  return n1 * n1 + n2 * n2 <= cutoff * cutoff;
}

/// Dyadic shell index of a frequency: shell 0 is {|n| <= 1}, shell j >= 1 is
/// {2^{j-1} < |n| <= 2^j}. Integer arithmetic only.
int shell_index(int norm2);

/// Real scalar field on the torus represented by its Fourier coefficients on
/// the Euclidean ball {|n| <= N}. Hermitian symmetry coeff(-n) = conj(coeff(n))
/// makes the field real; all frequencies outside the ball are zero.
class SpectralField {
 public:
  SpectralField() : SpectralField(0) {}
  explicit SpectralField(int cutoff);

  int cutoff() const { return cutoff_; }

  std::complex<double> coeff(int n1, int n2) const {
    if (!in_ball(n1, n2, cutoff_)) return {0.0, 0.0};
    return a_[index(n1, n2)];
  }

  /// Sets coeff(n); throws outside the ball.
  void set_coeff(int n1, int n2, std::complex<double> value);

  /// Sets coeff(n) and coeff(-n) = conj(value) in one call.
  void set_pair(int n1, int n2, std::complex<double> value);

  /// Largest violation of coeff(-n) == conj(coeff(n)).
  double hermitian_defect() const;

  SpectralField& operator*=(double s);
  SpectralField& operator+=(const SpectralField& other);  // requires same cutoff
  void add_constant(double c) { a_[index(0, 0)] += c; }

  bool all_finite() const;

  template <typename Fn>
  void for_each(Fn&& fn) const {
    for (int n1 = -cutoff_; n1 <= cutoff_; ++n1)
      for (int n2 = -cutoff_; n2 <= cutoff_; ++n2)
        if (in_ball(n1, n2, cutoff_)) fn(n1, n2, a_[index(n1, n2)]);
  }

 private:
  std::size_t index(int n1, int n2) const {
    return static_cast<std::size_t>(n1 + cutoff_) * side_ + (n2 + cutoff_);
  }

  int cutoff_;
  int side_;
  std::vector<std::complex<double>> a_;
};

/// Real samples on the uniform M x M grid x_{jk} = (2*pi*j/M, 2*pi*k/M).
class GridField {
 public:
  GridField() : GridField(1) {}
  explicit GridField(int size, double fill = 0.0);

  int size() const { return size_; }
  double at(int j, int k) const { return v_[static_cast<std::size_t>(j) * size_ + k]; }
  double& at(int j, int k) { return v_[static_cast<std::size_t>(j) * size_ + k]; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }

  /// Grid mean, i.e. the integral against the normalized measure (2pi)^{-2} dx.
  double mean() const;

 private:
  int size_;
  std::vector<double> v_;
};

/// Frequency projector: keeps coefficients with |n| <= N.
SpectralField project(const SpectralField& f, int cutoff);

/// Synthesis onto the M x M grid. Requires M >= 2*cutoff + 2.
GridField to_grid(const SpectralField& f, int grid_size);

/// Analysis back to cutoff N. Requires grid_size >= 2*cutoff + 2.
SpectralField to_spectral(const GridField& g, int cutoff);

enum class NormKind { L2, H1, Cminus };

/// L2 = sqrt(sum |c_n|^2); H1 = sqrt(sum (1+|n|^2)|c_n|^2);
/// Cminus(eta) = max_j 2^{-eta j} max_{n in shell j} |c_n|, a sharp-shell
/// Besov proxy used for diagnostics and region indicators.
double field_norm(const SpectralField& f, NormKind kind, double eta = 0.5);

}  // namespace phi4

#include "phi4/spectral_field.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace phi4 {

int shell_index(int norm2) {
  if (norm2 <= 1) return 0;
  // smallest j with |n|^2 <= 4^j
  int j = 1;
  long long bound = 4;
  while (norm2 > bound) {
    bound *= 4;
    ++j;
  }
  return j;
}

SpectralField::SpectralField(int cutoff) : cutoff_(cutoff), side_(2 * cutoff + 1) {
  if (cutoff < 0) throw std::invalid_argument("SpectralField: cutoff must be >= 0");
  a_.assign(static_cast<std::size_t>(side_) * side_, {0.0, 0.0});
}

void SpectralField::set_coeff(int n1, int n2, std::complex<double> value) {
  if (!in_ball(n1, n2, cutoff_))
    throw std::out_of_range("SpectralField: frequency outside the ball |n| <= N");
  a_[index(n1, n2)] = value;
}

void SpectralField::set_pair(int n1, int n2, std::complex<double> value) {
  set_coeff(n1, n2, value);
  set_coeff(-n1, -n2, std::conj(value));
}

double SpectralField::hermitian_defect() const {
  double worst = 0.0;
  for_each([&](int n1, int n2, std::complex<double> c) {
    worst = std::max(worst, std::abs(c - std::conj(coeff(-n1, -n2))));
  });
  return worst;
}

SpectralField& SpectralField::operator*=(double s) {
  for (auto& c : a_) c *= s;
  return *this;
}

SpectralField& SpectralField::operator+=(const SpectralField& other) {
  if (other.cutoff_ != cutoff_)
    throw std::invalid_argument("SpectralField: cutoff mismatch in +=");
  for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += other.a_[i];
  return *this;
}

bool SpectralField::all_finite() const {
  for (const auto& c : a_)
    if (!std::isfinite(c.real()) || !std::isfinite(c.imag())) return false;
  return true;
}

GridField::GridField(int size, double fill) : size_(size) {
  if (size < 1) throw std::invalid_argument("GridField: size must be >= 1");
  v_.assign(static_cast<std::size_t>(size_) * size_, fill);
}

double GridField::mean() const {
  double sum = 0.0, comp = 0.0;
  for (double x : v_) {
    double y = x - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  return sum / static_cast<double>(v_.size());
}

SpectralField project(const SpectralField& f, int cutoff) {
  if (cutoff < 0) throw std::invalid_argument("project: cutoff must be >= 0");
  int out_cut = std::min(cutoff, f.cutoff());
  SpectralField out(out_cut);
  for (int n1 = -out_cut; n1 <= out_cut; ++n1)
    for (int n2 = -out_cut; n2 <= out_cut; ++n2)
      if (in_ball(n1, n2, out_cut)) out.set_coeff(n1, n2, f.coeff(n1, n2));
  return out;
}

namespace {

// FFTW plans per grid size; plan creation is not thread-safe, execution via
// fftw_execute_dft on caller buffers is.
struct PlanPair {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
};

std::mutex g_plan_mutex;
std::map<int, PlanPair>& plan_cache() {
  static std::map<int, PlanPair> cache;
  return cache;
}

PlanPair get_plans(int m) {
  std::lock_guard<std::mutex> lock(g_plan_mutex);
  auto& cache = plan_cache();
  auto it = cache.find(m);
  if (it != cache.end()) return it->second;
  std::vector<std::complex<double>> scratch(static_cast<std::size_t>(m) * m);
  auto* ptr = reinterpret_cast<fftw_complex*>(scratch.data());
  PlanPair p;
  p.forward = fftw_plan_dft_2d(m, m, ptr, ptr, FFTW_FORWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  p.backward = fftw_plan_dft_2d(m, m, ptr, ptr, FFTW_BACKWARD, FFTW_ESTIMATE | FFTW_UNALIGNED);
  cache.emplace(m, p);
  return p;
}

int wrap(int n, int m) { return ((n % m) + m) % m; }

}  // namespace

GridField to_grid(const SpectralField& f, int grid_size) {
  const int n = f.cutoff();
  if (grid_size < 2 * n + 2)
    throw std::invalid_argument("to_grid: grid size must be >= 2N+2 for cutoff N");
  const int m = grid_size;
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(m) * m, {0.0, 0.0});
  f.for_each([&](int n1, int n2, std::complex<double> c) {
    buf[static_cast<std::size_t>(wrap(n1, m)) * m + wrap(n2, m)] = c;
  });
  auto plans = get_plans(m);
  auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plans.backward, ptr, ptr);
  GridField out(m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) out.at(j, k) = buf[static_cast<std::size_t>(j) * m + k].real();
  return out;
}

SpectralField to_spectral(const GridField& g, int cutoff) {
  const int m = g.size();
  if (m < 2 * cutoff + 2)
    throw std::invalid_argument("to_spectral: grid size must be >= 2N+2 for cutoff N");
  std::vector<std::complex<double>> buf(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j)
    for (int k = 0; k < m; ++k) buf[static_cast<std::size_t>(j) * m + k] = g.at(j, k);
  auto plans = get_plans(m);
  auto* ptr = reinterpret_cast<fftw_complex*>(buf.data());
  fftw_execute_dft(plans.forward, ptr, ptr);
  const double scale = 1.0 / (static_cast<double>(m) * m);
  SpectralField out(cutoff);
  for (int n1 = -cutoff; n1 <= cutoff; ++n1)
    for (int n2 = -cutoff; n2 <= cutoff; ++n2)
      if (in_ball(n1, n2, cutoff))
        out.set_coeff(n1, n2, scale * buf[static_cast<std::size_t>(wrap(n1, m)) * m + wrap(n2, m)]);
  return out;
}

double field_norm(const SpectralField& f, NormKind kind, double eta) {
  switch (kind) {
    case NormKind::L2: {
      double s = 0.0;
      f.for_each([&](int, int, std::complex<double> c) { s += std::norm(c); });
      return std::sqrt(s);
    }
    case NormKind::H1: {
      double s = 0.0;
      f.for_each([&](int n1, int n2, std::complex<double> c) {
        s += (1.0 + n1 * n1 + n2 * n2) * std::norm(c);
      });
      return std::sqrt(s);
    }
    case NormKind::Cminus: {
      if (eta <= 0.0) throw std::invalid_argument("field_norm: Cminus requires eta > 0");
      double best = 0.0;
      f.for_each([&](int n1, int n2, std::complex<double> c) {
        int j = shell_index(n1 * n1 + n2 * n2);
        double val = std::pow(2.0, -eta * j) * std::abs(c);
        best = std::max(best, val);
      });
      return best;
    }
  }
  return 0.0;
}

}  // namespace phi4

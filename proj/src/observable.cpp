#include "phi4/observable.hpp"

#include <cmath>
#include <stdexcept>

#include "phi4/potential.hpp"

namespace phi4 {

namespace series {

std::vector<double> mul(const std::vector<double>& a, const std::vector<double>& b,
                        int max_order) {
  if (a.empty() || b.empty()) return {};
  std::size_t out_len = a.size() + b.size() - 1;
  if (max_order >= 0) out_len = std::min<std::size_t>(out_len, static_cast<std::size_t>(max_order) + 1);
  std::vector<double> out(out_len, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; j < b.size() && i + j < out_len; ++j) out[i + j] += a[i] * b[j];
  }
  return out;
}

std::vector<double> add(const std::vector<double>& a, const std::vector<double>& b) {
  std::vector<double> out(std::max(a.size(), b.size()), 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

std::vector<double> exp(const std::vector<double>& u, int max_order) {
  if (!u.empty() && u[0] != 0.0)
    throw std::invalid_argument("series::exp: constant term must vanish");
  std::vector<double> out{1.0};
  std::vector<double> power{1.0};
  double factorial = 1.0;
  for (int m = 1; m <= max_order; ++m) {
    power = mul(power, u, max_order);
    factorial *= m;
    bool all_zero = true;
    for (std::size_t i = 0; i < power.size(); ++i) {
      if (power[i] != 0.0) all_zero = false;
    }
    if (all_zero) break;
    std::vector<double> scaled(power.size());
    for (std::size_t i = 0; i < power.size(); ++i) scaled[i] = power[i] / factorial;
    out = add(out, scaled);
  }
  out.resize(static_cast<std::size_t>(max_order) + 1, 0.0);
  return out;
}

double eval(const std::vector<double>& p, double t) {
  double acc = 0.0;
  for (std::size_t i = p.size(); i-- > 0;) acc = acc * t + p[i];
  return acc;
}

}  // namespace series

FieldEval::FieldEval(const SpectralField& phi, double sigma) : phi_(&phi), sigma_(sigma) {
  const int m = aliasfree_grid(phi.cutoff());
  GridField g = to_grid(phi, m);
  std::array<double, 5> sums{};
  for (int j = 0; j < m; ++j) {
    for (int k = 0; k < m; ++k) {
      const double x = g.at(j, k);
      sums[1] += x;
      sums[2] += hermite(2, x, sigma);
      sums[3] += hermite(3, x, sigma);
      sums[4] += hermite(4, x, sigma);
    }
  }
  const double inv = 1.0 / (static_cast<double>(m) * m);
  wick_means_[0] = 1.0;
  for (int k = 1; k <= 4; ++k) wick_means_[static_cast<std::size_t>(k)] = sums[static_cast<std::size_t>(k)] * inv;
}

double FieldEval::pair_with(const SpectralField& f) const {
  double acc = 0.0;
  f.for_each([&](int n1, int n2, std::complex<double> fc) {
    acc += (phi_->coeff(n1, n2) * std::conj(fc)).real();
  });
  return acc;
}

std::size_t Observable::intern(const Primitive& p) {
  for (std::size_t i = 0; i < prims_.size(); ++i) {
    const Primitive& q = prims_[i];
    if (q.kind != p.kind) continue;
    if (p.kind == Primitive::Kind::WickInt && q.k == p.k) return i;
    if (p.kind == Primitive::Kind::Pair && q.f == p.f) return i;
  }
  prims_.push_back(p);
  return prims_.size() - 1;
}

Observable Observable::from_parts(std::vector<Primitive> prims, std::vector<Term> terms) {
  Observable o;
  o.prims_ = std::move(prims);
  o.terms_ = std::move(terms);
  return o;
}

Observable Observable::constant(double c) {
  Observable o;
  o.terms_.push_back({c, {}});
  return o;
}

Observable Observable::pair(SpectralField f) {
  Observable o;
  Primitive p;
  p.kind = Primitive::Kind::Pair;
  p.f = std::make_shared<const SpectralField>(std::move(f));
  o.prims_.push_back(p);
  o.terms_.push_back({1.0, {{0, 1}}});
  return o;
}

Observable Observable::wick_integral(int k) {
  if (k < 1 || k > 4)
    throw std::invalid_argument("wick_integral: degree must be in 1..4");
  Observable o;
  Primitive p;
  p.kind = Primitive::Kind::WickInt;
  p.k = k;
  o.prims_.push_back(p);
  o.terms_.push_back({1.0, {{0, 1}}});
  return o;
}

Observable Observable::operator+(const Observable& other) const {
  Observable out = *this;
  for (const Term& t : other.terms_) {
    Term nt;
    nt.coeff = t.coeff;
    for (const Factor& f : t.factors)
      nt.factors.push_back({out.intern(other.prims_[f.prim]), f.power});
    out.terms_.push_back(std::move(nt));
  }
  return out;
}

Observable Observable::operator*(const Observable& other) const {
  Observable out;
  out.prims_ = prims_;
  for (const Term& ta : terms_) {
    for (const Term& tb : other.terms_) {
      Term nt;
      nt.coeff = ta.coeff * tb.coeff;
      nt.factors = ta.factors;
      for (const Factor& f : tb.factors) {
        const std::size_t idx = out.intern(other.prims_[f.prim]);
        bool merged = false;
        for (Factor& g : nt.factors) {
          if (g.prim == idx) {
            g.power += f.power;
            merged = true;
            break;
          }
        }
        if (!merged) nt.factors.push_back({idx, f.power});
      }
      out.terms_.push_back(std::move(nt));
    }
  }
  return out;
}

Observable Observable::operator*(double s) const {
  Observable out = *this;
  for (Term& t : out.terms_) t.coeff *= s;
  return out;
}

Observable Observable::pow(int p) const {
  if (p < 0) throw std::invalid_argument("Observable::pow: exponent must be >= 0");
  Observable out = constant(1.0);
  for (int i = 0; i < p; ++i) out = out * (*this);
  return out;
}

int Observable::degree() const {
  int deg = 0;
  for (const Term& t : terms_) {
    int d = 0;
    for (const Factor& f : t.factors) {
      const Primitive& p = prims_[f.prim];
      d += f.power * (p.kind == Primitive::Kind::WickInt ? p.k : 1);
    }
    deg = std::max(deg, d);
  }
  return deg;
}

double Observable::eval(const FieldEval& ev, double scale) const {
  double acc = 0.0;
  for (const Term& t : terms_) {
    double val = t.coeff;
    for (const Factor& f : t.factors) {
      const Primitive& p = prims_[f.prim];
      double base;
      if (p.kind == Primitive::Kind::Pair) {
        base = scale * ev.pair_with(*p.f);
      } else {
        base = std::pow(scale, p.k) * ev.wick_mean(p.k);
      }
      for (int i = 0; i < f.power; ++i) val *= base;
    }
    acc += val;
  }
  return acc;
}

double Observable::eval_at(const SpectralField& phi, double sigma) const {
  return eval(FieldEval(phi, sigma), 1.0);
}

namespace {
double binom(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}
}  // namespace

std::vector<double> Observable::taylor_at(double w, const FieldEval& v_eval) const {
  const int deg = degree();
  std::vector<double> total(static_cast<std::size_t>(deg) + 1, 0.0);
  for (const Term& t : terms_) {
    std::vector<double> poly{t.coeff};
    for (const Factor& f : t.factors) {
      const Primitive& p = prims_[f.prim];
      std::vector<double> base;
      if (p.kind == Primitive::Kind::Pair) {
        // <w + t v, f> = w * f_hat(0) + t <v, f>
        base = {w * p.f->coeff(0, 0).real(), v_eval.pair_with(*p.f)};
      } else {
        // int H_k(w + t v; t^2 sigma) = sum_l binom(k,l) w^{k-l} t^l int :v^l:
        base.assign(static_cast<std::size_t>(p.k) + 1, 0.0);
        for (int l = 0; l <= p.k; ++l)
          base[static_cast<std::size_t>(l)] =
              binom(p.k, l) * std::pow(w, p.k - l) * v_eval.wick_mean(l);
      }
      for (int i = 0; i < f.power; ++i) poly = series::mul(poly, base);
    }
    total = series::add(total, poly);
  }
  total.resize(static_cast<std::size_t>(deg) + 1, 0.0);
  return total;
}

double observable_eval(const Observable& f, const SpectralField& psi, double eps, double sigma) {
  if (eps < 0.0) throw std::invalid_argument("observable_eval: eps must be >= 0");
  return f.eval(FieldEval(psi, sigma), std::sqrt(eps));
}

}  // namespace phi4

#include "cloudindex/model.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/special_functions/bessel.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "cloudindex/error.hpp"

namespace cloudindex {

namespace {

constexpr double kPi = std::numbers::pi;

double j0(double x) { return boost::math::cyl_bessel_j(0, x); }
double j1(double x) { return boost::math::cyl_bessel_j(1, x); }

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorKind::InvalidParams, what);
}

// λ²/(λ²+ρ²), the shape variable of the Bessel spectrum.
double shape_ratio(double lambda, double rho) {
  const double l2 = lambda * lambda;
  return l2 / (l2 + rho * rho);
}

}  // namespace

void BesselModelParams::validate() const {
  require(lambda.in_per_um() > 0.0 && std::isfinite(lambda.in_per_um()), "lambda must be positive");
  require(nu > 0.0 && std::isfinite(nu), "nu must be positive");
}

double bessel_correlation(double r_um, const BesselModelParams& p) {
  p.validate();
  require(r_um >= 0.0, "r must be nonnegative");
  const double x = p.lambda.in_per_um() * r_um;
  if (x == 0.0) return 1.0;
  const double k = std::cyl_bessel_k(p.nu, x);
  // log form keeps x^ν K_ν(x) finite where K_ν alone would overflow
  return std::exp(p.nu * std::log(x) + std::log(k) - (p.nu - 1.0) * std::numbers::ln2 - std::lgamma(p.nu));
}

double bessel_spectrum(InverseLength rho, const BesselModelParams& p) {
  p.validate();
  require(rho.in_per_um() >= 0.0, "rho must be nonnegative");
  const double lambda = p.lambda.in_per_um();
  return 2.0 * p.nu / (lambda * lambda) * std::pow(shape_ratio(lambda, rho.in_per_um()), p.nu + 1.0);
}

double model_band_integral(const BesselModelParams& p, InverseLength rho0, InverseLength rho1) {
  p.validate();
  const double a = rho0.in_per_um();
  const double b = rho1.in_per_um();
  require(a >= 0.0 && a <= b, "band must satisfy 0 <= rho0 <= rho1");
  const double lambda = p.lambda.in_per_um();
  const double lo = std::pow(shape_ratio(lambda, a), p.nu);
  const double hi = std::isinf(b) ? 0.0 : std::pow(shape_ratio(lambda, b), p.nu);
  return lo - hi;
}

double model_band_integral(const BesselModelParams& p, const FrequencyBand& band) {
  return model_band_integral(p, band.rho0, band.rho1);
}

std::vector<double> hankel_transform(std::span<const double> r, std::span<const double> f,
                                     std::span<const double> rho) {
  if (r.size() != f.size() || r.size() < 2) {
    throw Error(ErrorKind::InvalidParams, "hankel_transform needs matching grids of at least 2 samples");
  }
  if (r.front() < 0.0) throw Error(ErrorKind::InvalidParams, "radial grid must start at r >= 0");
  double h_max = 0.0;
  for (std::size_t i = 1; i < r.size(); ++i) {
    const double h = r[i] - r[i - 1];
    if (!(h > 0.0)) throw Error(ErrorKind::InvalidParams, "radial grid must be strictly increasing");
    h_max = std::max(h_max, h);
  }
  double rho_max = 0.0;
  for (double q : rho) rho_max = std::max(rho_max, std::abs(q));
  if (rho_max > 0.0 && h_max > 2.0 * kPi / rho_max / 8.0) {
    throw Error(ErrorKind::GridTooCoarse, "grid spacing " + std::to_string(h_max) +
                                              " under-resolves J0 at rho = " + std::to_string(rho_max) +
                                              " (need <= " + std::to_string(2.0 * kPi / rho_max / 8.0) + ")");
  }

  std::vector<double> rf(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) rf[i] = r[i] * f[i];
  std::vector<double> out(rho.size());
  for (std::size_t k = 0; k < rho.size(); ++k) {
    double s = 0.0;
    double prev = rf[0] * j0(r[0] * rho[k]);
    for (std::size_t i = 1; i < r.size(); ++i) {
      const double cur = rf[i] * j0(r[i] * rho[k]);
      s += 0.5 * (r[i] - r[i - 1]) * (prev + cur);
      prev = cur;
    }
    out[k] = s;
  }
  return out;
}

BesselModelParams fit_bessel_model(const RadialSpectrum& rs, const FrequencyBand& band) {
  return fit_bessel_model(rs, band, FitOptions{});
}

BesselModelParams fit_bessel_model(const RadialSpectrum& rs, const FrequencyBand& band, const FitOptions& opts) {
  band.validate();
  std::vector<double> rho2, logk;
  double first_rho = 0.0;
  std::vector<double> rho_in, k_in;
  for (std::size_t i = 0; i < rs.size(); ++i) {
    const double rho = rs.bin_centers[i];
    if (rho < band.rho0.in_per_um() || rho > band.rho1.in_per_um()) continue;
    const double k = rs.values[i];
    if (!(k > 0.0) || !std::isfinite(k)) {
      throw Error(ErrorKind::NonPositiveSpectrum, "spectrum value " + std::to_string(k) + " at rho = " +
                                                      std::to_string(rho) + " cannot be fitted in log space");
    }
    rho_in.push_back(rho);
    k_in.push_back(k);
  }
  if (rho_in.size() < opts.min_bins) {
    throw Error(ErrorKind::InsufficientBins, std::to_string(rho_in.size()) + " bins in band, need " +
                                                 std::to_string(opts.min_bins));
  }
  first_rho = rho_in.front();
  const std::size_t n = rho_in.size();
  for (std::size_t i = 0; i < n; ++i) {
    rho2.push_back(rho_in[i] * rho_in[i]);
    logk.push_back(std::log(k_in[i]));
  }

  // λ₀: where the spectrum first falls to half its in-band maximum
  const std::size_t imax = static_cast<std::size_t>(std::max_element(k_in.begin(), k_in.end()) - k_in.begin());
  double lambda0 = rho_in.back();
  for (std::size_t i = imax; i < n; ++i) {
    if (k_in[i] <= 0.5 * k_in[imax]) {
      lambda0 = rho_in[i];
      break;
    }
  }
  lambda0 = std::max(lambda0, first_rho);
  std::array<double, 2> p{std::log(lambda0), std::log(0.25)};

  auto residuals = [&](const std::array<double, 2>& q, std::vector<double>& res, std::vector<double>* jl,
                       std::vector<double>* jn) {
    const double lambda = std::exp(q[0]);
    const double nu = std::exp(q[1]);
    const double l2 = lambda * lambda;
    double cost = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double s = l2 + rho2[i];
      const double lt = std::log(l2 / s);  // ln t, t = λ²/(λ²+ρ²)
      res[i] = std::log(2.0 * nu) - 2.0 * q[0] + (nu + 1.0) * lt - logk[i];
      cost += res[i] * res[i];
      if (jl) {
        (*jl)[i] = -2.0 + 2.0 * (nu + 1.0) * rho2[i] / s;
        (*jn)[i] = 1.0 + nu * lt;
      }
    }
    return cost;
  };

  std::vector<double> res(n), jl(n), jn(n), trial(n);
  double cost = residuals(p, res, &jl, &jn);
  double mu = 1e-3;
  bool converged = false;
  int it = 0;
  for (; it < opts.max_iterations && !converged; ++it) {
    double a00 = 0, a01 = 0, a11 = 0, g0 = 0, g1 = 0;
    for (std::size_t i = 0; i < n; ++i) {
      a00 += jl[i] * jl[i];
      a01 += jl[i] * jn[i];
      a11 += jn[i] * jn[i];
      g0 += jl[i] * res[i];
      g1 += jn[i] * res[i];
    }
    // inner loop: raise damping until a step lowers the cost
    for (;;) {
      const double d00 = a00 + mu * std::max(a00, 1e-12);
      const double d11 = a11 + mu * std::max(a11, 1e-12);
      const double det = d00 * d11 - a01 * a01;
      std::array<double, 2> step{0.0, 0.0};
      if (det > 0.0 && std::isfinite(det)) {
        step = {(-g0 * d11 + g1 * a01) / det, (-g1 * d00 + g0 * a01) / det};
      }
      // keep trial parameters within a factor e^4 per step
      const double big = std::max(std::abs(step[0]), std::abs(step[1]));
      if (big > 4.0) {
        step[0] *= 4.0 / big;
        step[1] *= 4.0 / big;
      }
      const std::array<double, 2> q{p[0] + step[0], p[1] + step[1]};
      const double trial_cost = residuals(q, trial, nullptr, nullptr);
      if (std::isfinite(trial_cost) && trial_cost <= cost) {
        const bool tiny = std::max(std::abs(step[0]), std::abs(step[1])) < opts.step_tolerance;
        const bool stalled = trial_cost == cost;
        p = q;
        cost = residuals(p, res, &jl, &jn);
        mu = std::max(mu * 0.3, 1e-15);
        converged = tiny || stalled;
        break;
      }
      mu *= 10.0;
      if (mu > 1e16) {
        // no descent direction left: p is a minimum to working precision
        converged = true;
        break;
      }
    }
  }

  BesselModelParams out;
  out.lambda = InverseLength::per_um(std::exp(p[0]));
  out.nu = std::exp(p[1]);
  out.fit_residual = std::sqrt(cost / static_cast<double>(n));
  out.converged = converged;
  out.iterations = it;
  return out;
}

void FiberModelParams::validate() const {
  require(lambda.in_per_um() >= 0.0 && std::isfinite(lambda.in_per_um()), "fiber lambda must be >= 0");
  require(radius_um > 0.0 && std::isfinite(radius_um), "fiber radius must be positive");
  require(n_a_per_mm2 > 0.0 && std::isfinite(n_a_per_mm2), "N_A must be positive");
}

namespace {

// I(a) = ∫₀^∞ J₁²(z) / (z √(a² + z²)) dz, a = λR ≥ 0. Then ψ = a / I(a).
double psi_integral(double a) {
  using boost::math::quadrature::gauss_kronrod;
  auto f = [a](double z) {
    if (z == 0.0) return 0.0;
    const double j = j1(z);
    return j * j / (z * std::hypot(a, z));
  };
  constexpr double kRelTol = 1e-12;
  double total = 0.0;
  double err_total = 0.0;
  auto piece = [&](double lo, double hi) {
    double err = 0.0;
    total += gauss_kronrod<double, 21>::integrate(f, lo, hi, 12, kRelTol, &err);
    err_total += err;
  };

  // resolve the transition at z ~ a with decade-spaced pieces, then whole periods of J₁²
  double z = 0.0;
  if (a > 0.0 && a < kPi) {
    double next = a;
    piece(0.0, next);
    z = next;
    while (z * 10.0 < kPi) {
      piece(z, z * 10.0);
      z *= 10.0;
    }
  }
  constexpr int kPeriods = 2000;
  const double z_end = kPeriods * kPi;
  double edge = std::max(z, 0.0);
  for (int k = static_cast<int>(std::floor(edge / kPi)) + 1; k <= kPeriods; ++k) {
    piece(edge, k * kPi);
    edge = k * kPi;
  }
  // tail: J₁²(z) averages to 1/(πz), so the integrand averages to 1/(πz³) for z ≫ a
  const double zeff = std::sqrt(z_end * z_end + a * a);
  total += 1.0 / (2.0 * kPi * z_end * zeff);
  if (!(err_total <= 1e-10 * total) || !std::isfinite(total)) {
    throw Error(ErrorKind::QuadratureFailure,
                "psi integral error estimate " + std::to_string(err_total) + " too large for a = " + std::to_string(a));
  }
  return total;
}

}  // namespace

double compute_psi(InverseLength lambda, double radius_um) {
  const double l = lambda.in_per_um();
  require(l > 0.0 && std::isfinite(l), "psi needs lambda > 0");
  require(radius_um > 0.0 && std::isfinite(radius_um), "psi needs R > 0");
  const double a = l * radius_um;
  return a / psi_integral(a);
}

FiberSpectrum::FiberSpectrum(const FiberModelParams& p)
    : lambda_(p.lambda.in_per_um()), radius_(p.radius_um), psi_over_lambda_(0.0) {
  p.validate();
  psi_over_lambda_ = radius_ / psi_integral(lambda_ * radius_);
}

double FiberSpectrum::operator()(InverseLength rho) const {
  const double q = rho.in_per_um();
  require(q >= 0.0, "rho must be nonnegative");
  require(q > 0.0 || lambda_ > 0.0, "filament spectrum diverges at rho = 0");
  const double z = radius_ * q;
  const double j1_over_z = z < 1e-8 ? 0.5 : j1(z) / z;
  return psi_over_lambda_ / std::hypot(lambda_, q) * j1_over_z * j1_over_z;
}

double fiber_model_spectrum(InverseLength rho, const FiberModelParams& p) { return FiberSpectrum(p)(rho); }

double pair_correlation_lines(double r_mm, InverseLength lambda, double n_a_per_mm2) {
  const double l = lambda.in_per_mm();
  require(r_mm > 0.0, "pcf needs r > 0");
  require(l >= 0.0 && std::isfinite(l), "pcf needs lambda >= 0");
  require(n_a_per_mm2 > 0.0, "pcf needs N_A > 0");
  return 1.0 + l / (kPi * n_a_per_mm2 * r_mm) * std::exp(-l * r_mm);
}

}  // namespace cloudindex

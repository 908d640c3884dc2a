#pragma once

// Grid-sampled test drivers: fractional Brownian motion, random Fourier
// series and closed-form paths.
//
// Randomness comes from std::mt19937_64 seeded with DriverSpec::seed. Normal
// variates use the Box-Muller transform on 53-bit uniforms taken from the
// top bits of each draw, so samples are reproducible across standard
// libraries (std::normal_distribution is not).

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "roughinc/path.hpp"

namespace roughinc {

class NormalStream {
 public:
  explicit NormalStream(std::uint64_t seed) : gen_(seed) {}

  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

  double operator()() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = 1.0 - uniform();
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return r * std::cos(a);
  }

 private:
  std::mt19937_64 gen_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

enum class DriverKind { fbm, fourier, analytic };
enum class FbmMethod { automatic, cholesky, circulant };

struct DriverSpec {
  DriverKind kind = DriverKind::fbm;
  double hurst = 0.5;
  int dim = 1;
  std::uint64_t seed = 0;
  double horizon = 1.0;
  int level = 10;
  // analytic: line | sine | cosine | polynomial | circle
  std::string name = "line";
  FbmMethod method = FbmMethod::automatic;
  // fourier: number of modes; 0 means 2^(level-1)
  int modes = 0;
  // multiplies every sample
  double scale = 1.0;

  DyadicGrid grid() const { return DyadicGrid(horizon, level); }
};

// Covariance-factorization is O(n^3); above this level the automatic method
// switches to circulant embedding.
inline constexpr int kCholeskyLevelCap = 12;

inline double fbm_covariance(double s, double t, double h) {
  return 0.5 * (std::pow(s, 2 * h) + std::pow(t, 2 * h) - std::pow(std::abs(t - s), 2 * h));
}

namespace detail {

inline void check_hurst(double h) {
  if (!(h > 0.0 && h < 1.0)) throw std::invalid_argument("Hurst parameter must lie in (0,1)");
}

// Autocovariance of unit-step fractional Gaussian noise.
inline double fgn_autocov(std::int64_t k, double h) {
  double a = static_cast<double>(std::llabs(k));
  return 0.5 * (std::pow(a + 1.0, 2 * h) - 2.0 * std::pow(a, 2 * h) + std::pow(std::abs(a - 1.0), 2 * h));
}

}  // namespace detail

// Cholesky factor of the fBm covariance on the nonzero grid times, cached so
// batches of samples share one factorization.
class FbmSampler {
 public:
  FbmSampler(const DyadicGrid& grid, double hurst, FbmMethod method = FbmMethod::automatic) : grid_(grid), hurst_(hurst) {
    detail::check_hurst(hurst);
    method_ = method;
    if (method_ == FbmMethod::automatic) method_ = grid.level() <= kCholeskyLevelCap ? FbmMethod::cholesky : FbmMethod::circulant;
    const auto n = static_cast<Eigen::Index>(grid.cells());
    if (method_ == FbmMethod::cholesky) {
      Mat cov(n, n);
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j <= i; ++j) cov(i, j) = cov(j, i) = fbm_covariance(grid.time(i + 1), grid.time(j + 1), hurst);
      Eigen::LLT<Mat> llt(cov);
      if (llt.info() != Eigen::Success) throw std::runtime_error("fBm covariance is not positive definite at this level");
      factor_ = llt.matrixL();
    } else {
      prepare_circulant();
    }
  }

  FbmMethod method() const { return method_; }

  // One scalar component; draws 2^m (Cholesky) or 2^(m+1) (circulant) normals.
  Vec sample_component(NormalStream& normals) const {
    const auto n = static_cast<Eigen::Index>(grid_.cells());
    Vec out(n + 1);
    out[0] = 0.0;
    if (method_ == FbmMethod::cholesky) {
      Vec z(n);
      for (Eigen::Index i = 0; i < n; ++i) z[i] = normals();
      out.tail(n) = factor_.triangularView<Eigen::Lower>() * z;
      return out;
    }
    const std::size_t m = 2 * static_cast<std::size_t>(n);
    std::vector<std::complex<double>> w(m);
    for (std::size_t k = 0; k <= static_cast<std::size_t>(n); ++k) {
      if (k == 0 || k == static_cast<std::size_t>(n)) {
        w[k] = std::sqrt(eig_[k] / static_cast<double>(m)) * normals();
      } else {
        double a = normals(), b = normals();
        w[k] = std::sqrt(eig_[k] / (2.0 * static_cast<double>(m))) * std::complex<double>(a, b);
        w[m - k] = std::conj(w[k]);
      }
    }
    std::vector<std::complex<double>> f(m);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(w.data()), reinterpret_cast<fftw_complex*>(f.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    const double step = std::pow(grid_.spacing(), hurst_);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += f[static_cast<std::size_t>(i)].real() * step;
      out[i + 1] = acc;
    }
    return out;
  }

  Path sample(int dim, std::uint64_t seed, double scale = 1.0) const {
    NormalStream normals(seed);
    Mat v(dim, static_cast<Eigen::Index>(grid_.size()));
    for (int c = 0; c < dim; ++c) v.row(c) = scale * sample_component(normals).transpose();
    return Path::on_grid(grid_, std::move(v));
  }

 private:
  void prepare_circulant() {
    const std::int64_t n = grid_.cells();
    const std::size_t m = 2 * static_cast<std::size_t>(n);
    std::vector<std::complex<double>> c(m), lam(m);
    for (std::int64_t k = 0; k <= n; ++k) c[static_cast<std::size_t>(k)] = detail::fgn_autocov(k, hurst_);
    for (std::int64_t k = 1; k < n; ++k) c[m - static_cast<std::size_t>(k)] = detail::fgn_autocov(k, hurst_);
    fftw_plan plan = fftw_plan_dft_1d(static_cast<int>(m), reinterpret_cast<fftw_complex*>(c.data()), reinterpret_cast<fftw_complex*>(lam.data()),
                                      FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
    fftw_destroy_plan(plan);
    eig_.resize(m);
    for (std::size_t k = 0; k < m; ++k) {
      double e = lam[k].real();
      if (e < -1e-10) throw std::runtime_error("circulant embedding has a negative eigenvalue");
      eig_[k] = std::max(e, 0.0);
    }
  }

  DyadicGrid grid_;
  double hurst_;
  FbmMethod method_;
  Mat factor_;
  std::vector<double> eig_;
};

inline Path sample_fbm(const DriverSpec& ds) {
  detail::check_hurst(ds.hurst);
  FbmSampler sampler(ds.grid(), ds.hurst, ds.method);
  return sampler.sample(ds.dim, ds.seed, ds.scale);
}

// sum_k a_k (c_k cos(2 pi k t/T) + s_k sin(2 pi k t/T)), a_k = k^-(H+1/2).
// cos_coef and sin_coef are dim x modes.
inline Path fourier_series(const DyadicGrid& grid, double hurst, const Mat& cos_coef, const Mat& sin_coef, double scale = 1.0) {
  if (cos_coef.rows() != sin_coef.rows() || cos_coef.cols() != sin_coef.cols()) throw std::invalid_argument("fourier: coefficient shapes differ");
  const auto dim = cos_coef.rows();
  const auto modes = cos_coef.cols();
  Mat v = Mat::Zero(dim, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double u = grid.time(static_cast<std::int64_t>(i)) / grid.horizon();
    for (Eigen::Index k = 1; k <= modes; ++k) {
      double a = std::pow(static_cast<double>(k), -(hurst + 0.5));
      double w = 2.0 * std::numbers::pi * static_cast<double>(k) * u;
      v.col(static_cast<Eigen::Index>(i)) += scale * a * (cos_coef.col(k - 1) * std::cos(w) + sin_coef.col(k - 1) * std::sin(w));
    }
  }
  return Path::on_grid(grid, std::move(v));
}

inline Path sample_fourier(const DriverSpec& ds) {
  detail::check_hurst(ds.hurst);
  DyadicGrid grid = ds.grid();
  int modes = ds.modes > 0 ? ds.modes : static_cast<int>(std::max<std::int64_t>(1, grid.cells() / 2));
  NormalStream normals(ds.seed);
  Mat c(ds.dim, modes), s(ds.dim, modes);
  for (int k = 0; k < modes; ++k)
    for (int j = 0; j < ds.dim; ++j) {
      c(j, k) = normals();
      s(j, k) = normals();
    }
  return fourier_series(grid, ds.hurst, c, s, ds.scale);
}

// Closed-form paths: line t, sine sin t, cosine cos t, polynomial t^2, and
// the two-dimensional circle (sin t, cos t). Scalar names fill every
// component with the same values.
inline Path analytic(const std::string& name, const DyadicGrid& grid, int dim = 1, double scale = 1.0) {
  if (name == "circle" && dim != 2) throw std::invalid_argument("analytic circle is two-dimensional");
  Mat v(dim, static_cast<Eigen::Index>(grid.size()));
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double t = grid.time(static_cast<std::int64_t>(i));
    auto col = v.col(static_cast<Eigen::Index>(i));
    if (name == "line") col.setConstant(t);
    else if (name == "sine") col.setConstant(std::sin(t));
    else if (name == "cosine") col.setConstant(std::cos(t));
    else if (name == "polynomial") col.setConstant(t * t);
    else if (name == "circle") col << std::sin(t), std::cos(t);
    else throw std::invalid_argument("unknown analytic path '" + name + "'");
  }
  return Path::on_grid(grid, scale * v);
}

inline Path sample_driver(const DriverSpec& ds) {
  switch (ds.kind) {
    case DriverKind::fbm: return sample_fbm(ds);
    case DriverKind::fourier: return sample_fourier(ds);
    case DriverKind::analytic: return analytic(ds.name, ds.grid(), ds.dim, ds.scale);
  }
  throw std::invalid_argument("unknown driver kind");
}

}  // namespace roughinc

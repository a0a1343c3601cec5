// Copyright 2026 The nlhomog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "nlhomog/discretization.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <sstream>

#include "nlhomog/io.hpp"

namespace nlh {

using nlohmann::json;

Grid::Grid(int d, double R, int N) : d_(d), R_(R), N_(N) {
  require(d == 1 || d == 2, ErrorCode::invalid_parameter, "grid dimension must be 1 or 2");
  require(R > 0.0 && std::isfinite(R), ErrorCode::invalid_parameter, "grid R must be positive");
  require(N >= 8, ErrorCode::invalid_parameter, "grid N must be >= 8");
  h_ = 2.0 * R / N;
  vol_ = d == 1 ? h_ : h_ * h_;
  size_ = d == 1 ? std::size_t(N) : std::size_t(N) * std::size_t(N);
}

Point Grid::center(std::size_t idx) const {
  if (d_ == 1) return {axis_center(int(idx)), 0.0};
  return {axis_center(int(idx / N_)), axis_center(int(idx % N_))};
}

json Grid::to_json() const {
  return {{"dimension", d_}, {"R", R_}, {"N", N_}, {"h", h_}};
}

GridFunction::GridFunction(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  require(values.size() == grid.size(), ErrorCode::grid_mismatch,
          "grid function has the wrong number of values");
}

GridFunction GridFunction::sample(const Grid& g, const std::function<double(const Point&)>& f) {
  GridFunction u(g);
  for (std::size_t i = 0; i < g.size(); ++i) u.values[i] = f(g.center(i));
  return u;
}

double GridFunction::l2_norm() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s * grid.cell_volume());
}

void require_same_grid(const Grid& a, const Grid& b) {
  require(a == b, ErrorCode::grid_mismatch, "grid mismatch");
}

double inner(const GridFunction& u, const GridFunction& v) {
  require_same_grid(u.grid, v.grid);
  double s = 0.0;
  for (std::size_t i = 0; i < u.values.size(); ++i) s += u.values[i] * v.values[i];
  return s * u.grid.cell_volume();
}

std::string grid_function_csv(const GridFunction& u) {
  const Grid& g = u.grid;
  std::ostringstream out;
  out << "# nlhomog grid " << g.dimension() << ' ' << format_double(g.half_width()) << ' '
      << g.n_per_axis() << '\n';
  out << (g.dimension() == 1 ? "x,value\n" : "x,y,value\n");
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Point c = g.center(i);
    out << format_double(c[0]) << ',';
    if (g.dimension() == 2) out << format_double(c[1]) << ',';
    out << format_double(u.values[i]) << '\n';
  }
  return out.str();
}

GridFunction parse_grid_function_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::istringstream head(line);
  std::string hash, tag, kind;
  int d = 0, N = 0;
  double R = 0.0;
  head >> hash >> tag >> kind >> d >> R >> N;
  require(hash == "#" && tag == "nlhomog" && kind == "grid", ErrorCode::io_error,
          "grid CSV lacks the nlhomog grid header");
  Grid g(d, R, N);
  std::getline(in, line);  // column names
  std::vector<double> values;
  values.reserve(g.size());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    std::string cell;
    std::vector<double> cols;
    while (std::getline(row, cell, ',')) cols.push_back(std::stod(cell));
    require(int(cols.size()) == d + 1, ErrorCode::io_error, "malformed grid CSV row: " + line);
    const Point c = g.center(values.size());
    require(std::abs(cols[0] - c[0]) <= 1e-12 * R && (d == 1 || std::abs(cols[1] - c[1]) <= 1e-12 * R),
            ErrorCode::grid_mismatch, "grid CSV coordinates do not match the header grid");
    values.push_back(cols[d]);
  }
  return GridFunction(g, std::move(values));
}

json OperatorMeta::to_json() const {
  return {{"kind", kind},
          {"eps", eps},
          {"kernel", kernel},
          {"coefficient", coefficient},
          {"plan", plan},
          {"translation_invariant", translation_invariant}};
}

// ---------------------------------------------------------------------------
// FFT convolution

namespace {
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct NonlocalOperator::Fft {
  int d = 1;
  int N = 0;
  int P = 0;
  std::size_t real_size = 0;
  std::size_t complex_size = 0;
  double* buf = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::complex<double>> kernel_hat;
  std::mutex m;

  Fft(int d_, int N_) : d(d_), N(N_), P(2 * N_) {
    real_size = d == 1 ? std::size_t(P) : std::size_t(P) * P;
    complex_size = d == 1 ? std::size_t(P / 2 + 1) : std::size_t(P) * (P / 2 + 1);
    buf = fftw_alloc_real(real_size);
    spec = fftw_alloc_complex(complex_size);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (d == 1) {
      forward = fftw_plan_dft_r2c_1d(P, buf, spec, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_1d(P, spec, buf, FFTW_ESTIMATE);
    } else {
      forward = fftw_plan_dft_r2c_2d(P, P, buf, spec, FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r_2d(P, P, spec, buf, FFTW_ESTIMATE);
    }
  }
  ~Fft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(buf);
    fftw_free(spec);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  std::size_t slot(int a, int b) const {
    const int ma = (a + P) % P;
    if (d == 1) return std::size_t(ma);
    return std::size_t(ma) * P + std::size_t((b + P) % P);
  }
};

NonlocalOperator::NonlocalOperator(Grid grid, std::vector<double> weights,
                                   std::vector<double> kappa, OperatorMeta meta)
    : grid_(std::move(grid)),
      n_(grid_.size()),
      w_(std::move(weights)),
      kappa_(std::move(kappa)),
      meta_(std::move(meta)) {
  require(w_.size() == n_ * n_, ErrorCode::grid_mismatch, "weight matrix size mismatch");
  require(kappa_.size() == n_, ErrorCode::grid_mismatch, "kappa size mismatch");
  row_sums_.assign(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    require(w_[i * n_ + i] == 0.0, ErrorCode::invalid_parameter, "diagonal weights must be zero");
    require(kappa_[i] >= 0.0 && std::isfinite(kappa_[i]), ErrorCode::invalid_parameter,
            "kappa must be finite and nonnegative");
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) {
      const double w = w_[i * n_ + j];
      require(w >= 0.0 && std::isfinite(w), ErrorCode::invalid_parameter,
              "weights must be finite and nonnegative");
      require(w == w_[j * n_ + i], ErrorCode::invalid_parameter, "weights must be symmetric");
      s += w;
    }
    row_sums_[i] = s;
  }
  if (meta_.translation_invariant) build_convolution();
}

void NonlocalOperator::build_convolution() {
  const int d = grid_.dimension();
  const int N = grid_.n_per_axis();
  auto fft = std::make_shared<Fft>(d, N);
  std::fill(fft->buf, fft->buf + fft->real_size, 0.0);
  if (d == 1) {
    for (int o = -(N - 1); o <= N - 1; ++o) {
      const std::size_t i = std::max(o, 0), j = std::max(-o, 0);
      fft->buf[fft->slot(o, 0)] = w_[i * n_ + j];
    }
  } else {
    for (int ox = -(N - 1); ox <= N - 1; ++ox)
      for (int oy = -(N - 1); oy <= N - 1; ++oy) {
        const std::size_t I = std::size_t(std::max(ox, 0)) * N + std::max(oy, 0);
        const std::size_t J = std::size_t(std::max(-ox, 0)) * N + std::max(-oy, 0);
        fft->buf[fft->slot(ox, oy)] = w_[I * n_ + J];
      }
  }
  fftw_execute(fft->forward);
  fft->kernel_hat.resize(fft->complex_size);
  const double scale = 1.0 / double(fft->real_size);
  for (std::size_t k = 0; k < fft->complex_size; ++k)
    fft->kernel_hat[k] = std::complex<double>(fft->spec[k][0], fft->spec[k][1]) * scale;
  fft_ = std::move(fft);
}

double NonlocalOperator::max_row_sum() const {
  double m = 0.0;
  for (std::size_t i = 0; i < n_; ++i) m = std::max(m, row_sums_[i] + kappa_[i]);
  return m;
}

void NonlocalOperator::apply(const double* u, double* out) const {
  const std::ptrdiff_t n = std::ptrdiff_t(n_);
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double* r = w_.data() + std::size_t(i) * n_;
    const double ui = u[i];
    double s = 0.0;
    for (std::ptrdiff_t j = 0; j < n; ++j) s += r[j] * (u[j] - ui);
    out[i] = s - kappa_[i] * ui;
  }
}

GridFunction NonlocalOperator::apply(const GridFunction& u) const {
  require_same_grid(grid_, u.grid);
  GridFunction out(grid_);
  apply(u.values.data(), out.values.data());
  return out;
}

double NonlocalOperator::energy(const GridFunction& u, const GridFunction& v) const {
  require_same_grid(grid_, u.grid);
  require_same_grid(grid_, v.grid);
  const std::ptrdiff_t n = std::ptrdiff_t(n_);
  std::vector<double> rows(n_);
  const double* a = u.values.data();
  const double* b = v.values.data();
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const double* r = w_.data() + std::size_t(i) * n_;
    double s = 0.0;
    for (std::ptrdiff_t j = 0; j < n; ++j) s += r[j] * (a[j] - a[i]) * (b[j] - b[i]);
    rows[i] = 0.5 * s + kappa_[i] * a[i] * b[i];
  }
  double total = 0.0;
  for (double s : rows) total += s;
  return total * grid_.cell_volume();
}

void NonlocalOperator::fast_apply(const double* u, double* out) const {
  require(has_convolution(), ErrorCode::inapplicable_structure,
          "convolution fast path needs a translation-invariant operator (constant coefficient)");
  Fft& f = *fft_;
  std::lock_guard<std::mutex> lock(f.m);
  std::fill(f.buf, f.buf + f.real_size, 0.0);
  const int N = f.N;
  if (f.d == 1) {
    std::copy(u, u + N, f.buf);
  } else {
    for (int ix = 0; ix < N; ++ix)
      std::copy(u + std::size_t(ix) * N, u + std::size_t(ix + 1) * N, f.buf + std::size_t(ix) * f.P);
  }
  fftw_execute(f.forward);
  for (std::size_t k = 0; k < f.complex_size; ++k) {
    const std::complex<double> z =
        std::complex<double>(f.spec[k][0], f.spec[k][1]) * f.kernel_hat[k];
    f.spec[k][0] = z.real();
    f.spec[k][1] = z.imag();
  }
  fftw_execute(f.backward);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t src = f.d == 1 ? i : (i / N) * f.P + (i % N);
    out[i] = f.buf[src] - (row_sums_[i] + kappa_[i]) * u[i];
  }
}

GridFunction NonlocalOperator::fast_apply(const GridFunction& u) const {
  require_same_grid(grid_, u.grid);
  GridFunction out(grid_);
  fast_apply(u.values.data(), out.values.data());
  return out;
}

void NonlocalOperator::apply_auto(const double* u, double* out) const {
  if (has_convolution())
    fast_apply(u, out);
  else
    apply(u, out);
}

NonlocalOperator NonlocalOperator::with_kappa(std::vector<double> kappa) const {
  return NonlocalOperator(grid_, w_, std::move(kappa), meta_);
}

std::string NonlocalOperator::export_text() const {
  std::ostringstream out;
  out << "# nlhomog operator v1\n";
  out << "# grid " << grid_.dimension() << ' ' << format_double(grid_.half_width()) << ' '
      << grid_.n_per_axis() << '\n';
  out << "# meta " << meta_.to_json().dump() << '\n';
  out << "weights\n";
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j) {
      const double w = w_[i * n_ + j];
      if (w != 0.0) out << i << ' ' << j << ' ' << format_double(w) << '\n';
    }
  out << "kappa\n";
  for (std::size_t i = 0; i < n_; ++i) out << i << ' ' << format_double(kappa_[i]) << '\n';
  return out.str();
}

}  // namespace nlh

#include "diracnls/fields.hpp"

#include <cmath>
#include <mutex>
#include <numbers>
#include <string>

#include <fftw3.h>

#include "diracnls/errors.hpp"

namespace diracnls {

namespace {

std::size_t wrap(int m, int n) {
  const int r = m % n;
  return static_cast<std::size_t>(r < 0 ? r + n : r);
}

bool is_smooth_size(int n) {
  for (int p : {2, 3, 5, 7})
    while (n % p == 0) n /= p;
  return n == 1;
}

// The FFTW planner is not re-entrant; execution with new arrays is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

BlochField::BlochField(std::shared_ptr<const IndexSet> set)
    : set_(std::move(set)), coeffs_(Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(set_->size()))) {}

BlochField::BlochField(std::shared_ptr<const IndexSet> set, Eigen::VectorXcd coeffs)
    : set_(std::move(set)), coeffs_(std::move(coeffs)) {
  if (static_cast<std::size_t>(coeffs_.size()) != set_->size())
    throw StructuralError("BlochField: coefficient count does not match the index set");
}

BlochField BlochField::plane_wave(std::shared_ptr<const IndexSet> set, FourierIndex idx) {
  BlochField f(std::move(set));
  const auto pos = f.index_set().find(idx);
  if (!pos) throw DomainError("plane_wave: index outside the set");
  f.coeffs_[static_cast<Eigen::Index>(*pos)] = 1.0;
  return f;
}

cd BlochField::coefficient(FourierIndex idx) const {
  const auto pos = set_->find(idx);
  return pos ? coeffs_[static_cast<Eigen::Index>(*pos)] : cd{};
}

bool BlochField::shares_set_with(const BlochField& other) const {
  if (!set_ || !other.set_) return false;
  return set_ == other.set_ || *set_ == *other.set_;
}

void require_same_set(const BlochField& a, const BlochField& b) {
  if (!a.shares_set_with(b)) throw StructuralError("fields live on different index sets");
}

BlochField& BlochField::operator+=(const BlochField& other) {
  require_same_set(*this, other);
  coeffs_ += other.coeffs_;
  return *this;
}

BlochField& BlochField::operator-=(const BlochField& other) {
  require_same_set(*this, other);
  coeffs_ -= other.coeffs_;
  return *this;
}

BlochField& BlochField::operator*=(cd scale) {
  coeffs_ *= scale;
  return *this;
}

cd inner_product(const BlochField& f, const BlochField& g) {
  require_same_set(f, g);
  return f.coeffs().dot(g.coeffs());
}

BlochField apply_rotation(const BlochField& f) {
  BlochField out(f.index_set_ptr());
  const auto& perm = f.index_set().rotation_permutation();
  for (std::size_t i = 0; i < perm.size(); ++i)
    out.coeffs()[static_cast<Eigen::Index>(perm[i])] = f.coeffs()[static_cast<Eigen::Index>(i)];
  return out;
}

BlochField conj_invert(const BlochField& f) {
  return BlochField(f.index_set_ptr(), f.coeffs().conjugate());
}

struct RealGrid::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    std::lock_guard lock(planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

int RealGrid::minimum_resolution(const IndexSet& set) { return 3 * (2 * set.cutoff() + 1); }

int RealGrid::dealiased_resolution(const IndexSet& set) {
  int n = std::max(minimum_resolution(set), 3 * set.span() + 1);
  while (!is_smooth_size(n)) ++n;
  return n;
}

RealGrid::RealGrid(std::shared_ptr<const IndexSet> set, const LatticeBasis& lattice, int resolution)
    : set_(std::move(set)), lattice_(lattice) {
  n_ = resolution > 0 ? resolution : dealiased_resolution(*set_);
  if (n_ < minimum_resolution(*set_) || n_ <= set_->span())
    throw DomainError("RealGrid: resolution " + std::to_string(n_) + " under-resolves cutoff " +
                      std::to_string(set_->cutoff()) + " (minimum " +
                      std::to_string(std::max(minimum_resolution(*set_), set_->span() + 1)) + ")");

  const std::size_t points = num_points();
  weight_ = lattice_.cell_area / static_cast<double>(points);

  slots_.resize(set_->size());
  for (std::size_t i = 0; i < set_->size(); ++i)
    slots_[i] = wrap((*set_)[i].m1, n_) * static_cast<std::size_t>(n_) + wrap((*set_)[i].m2, n_);

  // exp(i K.x) = exp(2 pi i (s - t) / (3 n)) on the sample points.
  const double sqrt_area = std::sqrt(lattice_.cell_area);
  to_phase_.resize(points);
  from_phase_.resize(points);
  for (int s = 0; s < n_; ++s) {
    for (int t = 0; t < n_; ++t) {
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(s - t) / (3.0 * n_);
      const cd phase = std::polar(1.0, angle);
      const std::size_t p = static_cast<std::size_t>(s) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(t);
      to_phase_[p] = phase / sqrt_area;
      from_phase_[p] = std::conj(phase) * sqrt_area / static_cast<double>(points);
    }
  }

  plans_ = std::make_unique<Plans>();
  std::vector<cd> scratch(points);
  auto* buf = reinterpret_cast<fftw_complex*>(scratch.data());
  std::lock_guard lock(planner_mutex());
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_dft_2d(n_, n_, buf, buf, FFTW_BACKWARD, flags);
  if (!plans_->forward || !plans_->backward) throw Error("RealGrid: FFTW planning failed");
}

RealGrid::~RealGrid() = default;

Vec2 RealGrid::position(std::size_t point) const {
  const auto n = static_cast<std::size_t>(n_);
  return lattice_.point(static_cast<double>(point / n) / n_, static_cast<double>(point % n) / n_);
}

std::vector<cd> RealGrid::to_grid(const BlochField& f) const {
  if (!(f.index_set_ptr() == set_ || f.index_set() == *set_))
    throw StructuralError("to_grid: field index set differs from the grid's");
  std::vector<cd> samples(num_points(), cd{});
  for (std::size_t i = 0; i < slots_.size(); ++i) samples[slots_[i]] = f[i];
  auto* buf = reinterpret_cast<fftw_complex*>(samples.data());
  fftw_execute_dft(plans_->backward, buf, buf);
  for (std::size_t p = 0; p < samples.size(); ++p) samples[p] *= to_phase_[p];
  return samples;
}

BlochField RealGrid::from_grid(std::span<const cd> samples) const {
  if (samples.size() != num_points()) throw StructuralError("from_grid: sample count mismatch");
  std::vector<cd> work(samples.size());
  for (std::size_t p = 0; p < work.size(); ++p) work[p] = samples[p] * from_phase_[p];
  auto* buf = reinterpret_cast<fftw_complex*>(work.data());
  fftw_execute_dft(plans_->forward, buf, buf);
  BlochField out(set_);
  for (std::size_t i = 0; i < slots_.size(); ++i) out.coeffs()[static_cast<Eigen::Index>(i)] = work[slots_[i]];
  return out;
}

double RealGrid::integrate(std::span<const double> samples) const {
  double sum = 0.0;
  for (double v : samples) sum += v;
  return sum * weight_;
}

cd RealGrid::integrate(std::span<const cd> samples) const {
  cd sum{};
  for (const cd& v : samples) sum += v;
  return sum * weight_;
}

std::vector<double> RealGrid::sample(const std::function<double(const Vec2&)>& fn) const {
  std::vector<double> out(num_points());
  for (std::size_t p = 0; p < out.size(); ++p) out[p] = fn(position(p));
  return out;
}

std::size_t RealGrid::inverted_point(std::size_t point) const {
  const auto n = static_cast<std::size_t>(n_);
  const std::size_t s = point / n, t = point % n;
  return ((n - s) % n) * n + (n - t) % n;
}

std::size_t RealGrid::rotated_point(std::size_t point) const {
  // R (alpha r1 + beta r2) = beta r1 - (alpha + beta) r2
  const auto n = static_cast<std::size_t>(n_);
  const std::size_t s = point / n, t = point % n;
  return t * n + (2 * n - s - t) % n;
}

std::vector<double> density(std::span<const cd> samples) {
  std::vector<double> out(samples.size());
  for (std::size_t p = 0; p < samples.size(); ++p) out[p] = std::norm(samples[p]);
  return out;
}

BlochField multiply(const RealGrid& grid, std::span<const double> multiplier, const BlochField& f) {
  if (multiplier.size() != grid.num_points()) throw StructuralError("multiply: multiplier size mismatch");
  auto samples = grid.to_grid(f);
  for (std::size_t p = 0; p < samples.size(); ++p) samples[p] *= multiplier[p];
  return grid.from_grid(samples);
}

BlochField pointwise_apply(const RealGrid& grid, const BlochField& f,
                           const std::function<double(const Vec2&, double)>& fn) {
  auto samples = grid.to_grid(f);
  for (std::size_t p = 0; p < samples.size(); ++p) samples[p] *= fn(grid.position(p), std::norm(samples[p]));
  return grid.from_grid(samples);
}

}  // namespace diracnls

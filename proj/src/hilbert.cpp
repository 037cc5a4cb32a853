#include "cqed/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "cqed/errors.hpp"

namespace cqed {

TruncationTooSmall::TruncationTooSmall(double tail_mass, std::size_t truncation)
    : Error([&] {
        std::ostringstream os;
        os << "coherent tail mass " << tail_mass << " beyond truncation " << truncation
           << " exceeds tolerance";
        return os.str();
      }()),
      tail_mass_(tail_mass),
      truncation_(truncation) {}

ConfigError::ConfigError(const std::string& key, const std::string& message, std::size_t line)
    : Error([&] {
        std::ostringstream os;
        if (line > 0) os << "line " << line << ": ";
        if (!key.empty()) os << "'" << key << "': ";
        os << message;
        return os.str();
      }()),
      key_(key),
      message_(message),
      line_(line) {}

// ---------------------------------------------------------------------------
// SubsystemLayout

SubsystemLayout::SubsystemLayout(std::vector<std::size_t> dims, std::vector<std::string> labels)
    : dims_(std::move(dims)), labels_(std::move(labels)) {
  if (labels_.empty()) labels_.resize(dims_.size());
  if (labels_.size() != dims_.size()) {
    throw Error("layout: label count does not match dimension count");
  }
  for (std::size_t k = 0; k < dims_.size(); ++k) {
    if (dims_[k] == 0) throw Error("layout: zero-dimensional subsystem");
    if (labels_[k] == "atom" && dims_[k] != 2) throw Error("layout: atom dimension must be 2");
  }
  total_ = std::accumulate(dims_.begin(), dims_.end(), std::size_t{1}, std::multiplies<>());
}

SubsystemLayout SubsystemLayout::atom_fields(std::size_t n1, std::size_t n2) {
  return SubsystemLayout({2, n1 + 1, n2 + 1}, {"atom", "field1", "field2"});
}

SubsystemLayout SubsystemLayout::single(std::size_t dim, std::string label) {
  return SubsystemLayout({dim}, {std::move(label)});
}

std::size_t SubsystemLayout::stride(std::size_t k) const {
  std::size_t s = 1;
  for (std::size_t j = k + 1; j < dims_.size(); ++j) s *= dims_[j];
  return s;
}

std::size_t SubsystemLayout::index_of(const std::string& label) const {
  auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) throw Error("layout: no subsystem labelled '" + label + "'");
  return static_cast<std::size_t>(it - labels_.begin());
}

SubsystemLayout SubsystemLayout::subset(std::span<const std::size_t> keep) const {
  std::vector<std::size_t> dims;
  std::vector<std::string> labels;
  for (std::size_t k : keep) {
    dims.push_back(dim(k));
    labels.push_back(labels_.at(k));
  }
  return SubsystemLayout(std::move(dims), std::move(labels));
}

SubsystemLayout SubsystemLayout::concat(const SubsystemLayout& other) const {
  auto dims = dims_;
  auto labels = labels_;
  dims.insert(dims.end(), other.dims_.begin(), other.dims_.end());
  labels.insert(labels.end(), other.labels_.begin(), other.labels_.end());
  return SubsystemLayout(std::move(dims), std::move(labels));
}

// ---------------------------------------------------------------------------
// States

PureState::PureState(SubsystemLayout layout, Vector amplitudes)
    : layout_(std::move(layout)), amplitudes_(std::move(amplitudes)) {
  if (static_cast<std::size_t>(amplitudes_.size()) != layout_.total_dim()) {
    throw Error("pure state: amplitude count does not match layout");
  }
  if (std::abs(amplitudes_.norm() - 1.0) > 1e-10) {
    throw NonPhysicalState("pure state: not normalised");
  }
}

DensityMatrix::DensityMatrix(SubsystemLayout layout, Matrix entries, Check level,
                             const PhysicalTolerance& tol)
    : layout_(std::move(layout)), entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols() ||
      static_cast<std::size_t>(entries_.rows()) != layout_.total_dim()) {
    throw Error("density matrix: shape does not match layout");
  }
  check(level, tol);
}

DensityMatrix::DensityMatrix(const PureState& psi)
    : layout_(psi.layout()), entries_(psi.amplitudes() * psi.amplitudes().adjoint()) {}

double DensityMatrix::purity() const {
  // Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho.
  return entries_.squaredNorm();
}

double DensityMatrix::min_eigenvalue() const {
  Eigen::SelfAdjointEigenSolver<Matrix> es(entries_, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void DensityMatrix::check(Check level, const PhysicalTolerance& tol) const {
  if (level == Check::kNone) return;
  const double herm = (entries_ - entries_.adjoint()).cwiseAbs().maxCoeff();
  if (herm > tol.hermiticity) {
    std::ostringstream os;
    os << "density matrix not Hermitian (max deviation " << herm << ")";
    throw NonPhysicalState(os.str());
  }
  const cd tr = trace();
  if (std::abs(tr - 1.0) > tol.trace) {
    std::ostringstream os;
    os << "density matrix trace " << tr.real() << "+" << tr.imag() << "i differs from 1";
    throw NonPhysicalState(os.str());
  }
  const double min_diag = entries_.diagonal().real().minCoeff();
  if (min_diag < tol.positivity) {
    std::ostringstream os;
    os << "density matrix has negative population " << min_diag;
    throw NonPhysicalState(os.str());
  }
  if (level == Check::kFull) {
    const double lmin = min_eigenvalue();
    if (lmin < tol.positivity) {
      std::ostringstream os;
      os << "density matrix has negative eigenvalue " << lmin;
      throw NonPhysicalState(os.str());
    }
  }
}

// ---------------------------------------------------------------------------
// Coherent states

Vector coherent_coefficients(cd amplitude, std::size_t truncation) {
  Vector c(truncation + 1);
  c(0) = std::exp(-0.5 * std::norm(amplitude));
  for (std::size_t n = 1; n <= truncation; ++n) {
    c(n) = c(n - 1) * amplitude / std::sqrt(static_cast<double>(n));
  }
  return c;
}

double coherent_tail_mass(cd amplitude, std::size_t truncation) {
  const double mean = std::norm(amplitude);
  if (mean == 0.0) return 0.0;
  // Poisson(mean) mass above `truncation`, summed in log space.
  double tail = 0.0;
  for (std::size_t n = truncation + 1;; ++n) {
    const double dn = static_cast<double>(n);
    const double term = std::exp(-mean + dn * std::log(mean) - std::lgamma(dn + 1.0));
    tail += term;
    if (dn > mean && term < 1e-18 * std::max(tail, 1e-300)) break;
    if (n > truncation + 100000) break;
  }
  return tail;
}

PureState coherent_state(cd amplitude, std::size_t truncation, double tail_tolerance) {
  if (truncation < 1) throw Error("coherent_state: truncation must be at least 1");
  const double tail = coherent_tail_mass(amplitude, truncation);
  if (tail > tail_tolerance) throw TruncationTooSmall(tail, truncation);
  Vector c = coherent_coefficients(amplitude, truncation);
  c /= c.norm();
  return PureState(SubsystemLayout::single(truncation + 1, "field"), std::move(c));
}

cd coherent_overlap(cd a, cd b) {
  return std::exp(-0.5 * std::norm(a) - 0.5 * std::norm(b) + std::conj(a) * b);
}

std::size_t default_truncation(cd amplitude) {
  const double r = std::abs(amplitude);
  return static_cast<std::size_t>(std::ceil(r * r + 8.0 * r + 6.0));
}

std::size_t truncation_for_tail(cd amplitude, double tail) {
  std::size_t n = 1;
  while (coherent_tail_mass(amplitude, n) > tail) ++n;
  return n;
}

PureState fock_state(std::size_t n, std::size_t truncation) {
  if (n > truncation) throw Error("fock_state: level above truncation");
  Vector v = Vector::Zero(truncation + 1);
  v(n) = 1.0;
  return PureState(SubsystemLayout::single(truncation + 1, "field"), std::move(v));
}

PureState atom_excited() {
  Vector v(2);
  v << 1.0, 0.0;
  return PureState(SubsystemLayout::single(2, "atom"), std::move(v));
}

PureState atom_ground() {
  Vector v(2);
  v << 0.0, 1.0;
  return PureState(SubsystemLayout::single(2, "atom"), std::move(v));
}

// ---------------------------------------------------------------------------
// Composition

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

PureState tensor_product(std::span<const PureState> factors) {
  if (factors.empty()) throw Error("tensor_product: no factors");
  SubsystemLayout layout = factors[0].layout();
  Matrix v = factors[0].amplitudes();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    layout = layout.concat(factors[k].layout());
    v = kron(v, factors[k].amplitudes());
  }
  return PureState(std::move(layout), v.col(0));
}

DensityMatrix tensor_product(std::span<const DensityMatrix> factors) {
  if (factors.empty()) throw Error("tensor_product: no factors");
  SubsystemLayout layout = factors[0].layout();
  Matrix m = factors[0].matrix();
  for (std::size_t k = 1; k < factors.size(); ++k) {
    layout = layout.concat(factors[k].layout());
    m = kron(m, factors[k].matrix());
  }
  return DensityMatrix(std::move(layout), std::move(m), Check::kNone);
}

Matrix tensor_product(std::span<const Matrix> factors) {
  if (factors.empty()) throw Error("tensor_product: no factors");
  Matrix m = factors[0];
  for (std::size_t k = 1; k < factors.size(); ++k) m = kron(m, factors[k]);
  return m;
}

Matrix partial_trace_matrix(const Matrix& rho, const SubsystemLayout& layout,
                            std::span<const std::size_t> keep) {
  const std::size_t nsub = layout.size();
  std::vector<bool> kept(nsub, false);
  for (std::size_t k : keep) {
    if (k >= nsub) throw Error("partial_trace: subsystem index out of range");
    kept[k] = true;
  }
  std::vector<std::size_t> traced;
  for (std::size_t k = 0; k < nsub; ++k)
    if (!kept[k]) traced.push_back(k);
  std::vector<std::size_t> kept_sorted(keep.begin(), keep.end());
  std::sort(kept_sorted.begin(), kept_sorted.end());

  auto flat_offsets = [&](const std::vector<std::size_t>& subs) {
    std::vector<std::size_t> offs{0};
    for (std::size_t k : subs) {
      std::vector<std::size_t> next;
      next.reserve(offs.size() * layout.dim(k));
      for (std::size_t o : offs)
        for (std::size_t n = 0; n < layout.dim(k); ++n) next.push_back(o + n * layout.stride(k));
      offs = std::move(next);
    }
    return offs;
  };
  const auto kept_off = flat_offsets(kept_sorted);
  const auto traced_off = flat_offsets(traced);

  const auto dk = static_cast<Eigen::Index>(kept_off.size());
  Matrix out = Matrix::Zero(dk, dk);
  for (Eigen::Index c = 0; c < dk; ++c) {
    for (Eigen::Index r = 0; r < dk; ++r) {
      cd acc = 0.0;
      for (std::size_t t : traced_off) {
        acc += rho(static_cast<Eigen::Index>(kept_off[r] + t),
                   static_cast<Eigen::Index>(kept_off[c] + t));
      }
      out(r, c) = acc;
    }
  }
  return out;
}

DensityMatrix partial_trace(const DensityMatrix& rho, std::span<const std::size_t> keep) {
  if (keep.empty()) throw Error("partial_trace: empty keep set");
  std::vector<std::size_t> kept_sorted(keep.begin(), keep.end());
  std::sort(kept_sorted.begin(), kept_sorted.end());
  kept_sorted.erase(std::unique(kept_sorted.begin(), kept_sorted.end()), kept_sorted.end());
  Matrix red = partial_trace_matrix(rho.matrix(), rho.layout(), kept_sorted);
  return DensityMatrix(rho.layout().subset(kept_sorted), std::move(red), Check::kNone);
}

// ---------------------------------------------------------------------------
// Metrics

double trace_distance(const Matrix& rho, const Matrix& sigma) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw Error("trace_distance: dimension mismatch");
  }
  Matrix diff = rho - sigma;
  diff = 0.5 * (diff + diff.adjoint()).eval();
  Eigen::SelfAdjointEigenSolver<Matrix> es(diff, Eigen::EigenvaluesOnly);
  return 0.5 * es.eigenvalues().cwiseAbs().sum();
}

TraceDistanceBounds trace_distance_bounds(const Matrix& rho, const Matrix& sigma,
                                          std::size_t probes) {
  if (rho.rows() != sigma.rows() || rho.cols() != sigma.cols()) {
    throw Error("trace_distance_bounds: dimension mismatch");
  }
  const Eigen::Index n = rho.rows();
  const auto k = std::min<Eigen::Index>(static_cast<Eigen::Index>(probes), n);
  if (k == n) {
    const double td = trace_distance(rho, sigma);
    return {td, td};
  }
  Matrix diff = rho - sigma;
  diff = 0.5 * (diff + diff.adjoint()).eval();

  std::mt19937_64 rng(0x5eed);
  std::normal_distribution<double> normal;
  Matrix probe(n, k);
  for (Eigen::Index c = 0; c < k; ++c) {
    for (Eigen::Index r = 0; r < n; ++r) probe(r, c) = cd(normal(rng), normal(rng));
  }
  // One power iteration sharpens the captured range.
  Matrix range = diff * (diff * probe).eval();
  Eigen::HouseholderQR<Matrix> qr(range);
  const Matrix q = qr.householderQ() * Matrix::Identity(n, k);
  const Matrix compressed = q.adjoint() * diff * q;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (compressed + compressed.adjoint()),
                                           Eigen::EigenvaluesOnly);
  const double captured = es.eigenvalues().cwiseAbs().sum();
  // diff - P diff P is Frobenius-orthogonal to P diff P for the projector P = q q^dag.
  const double rest = std::sqrt(std::max(0.0, diff.squaredNorm() - compressed.squaredNorm()));
  return {0.5 * captured, 0.5 * (captured + std::sqrt(static_cast<double>(n)) * rest)};
}

double trace_distance(const DensityMatrix& rho, const DensityMatrix& sigma) {
  if (!(rho.layout() == sigma.layout())) throw Error("trace_distance: layouts differ");
  return trace_distance(rho.matrix(), sigma.matrix());
}

std::vector<double> photon_number_distribution(const DensityMatrix& rho, std::size_t field) {
  if (field >= rho.layout().size() || rho.layout().labels()[field] == "atom") {
    throw Error("photon_number_distribution: not a Fock subsystem");
  }
  const std::size_t keep[] = {field};
  Matrix red = partial_trace_matrix(rho.matrix(), rho.layout(), keep);
  std::vector<double> p(static_cast<std::size_t>(red.rows()));
  for (Eigen::Index n = 0; n < red.rows(); ++n) p[n] = std::max(0.0, red(n, n).real());
  return p;
}

double mean_photon_number(const DensityMatrix& rho, std::size_t field) {
  const auto p = photon_number_distribution(rho, field);
  double mean = 0.0;
  for (std::size_t n = 0; n < p.size(); ++n) mean += static_cast<double>(n) * p[n];
  return mean;
}

}  // namespace cqed

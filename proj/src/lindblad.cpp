#include "gaugetrunc/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "gaugetrunc/error.hpp"

namespace gaugetrunc {

LindbladSystem::LindbladSystem(RVec energies, CMat coupling, double kappa,
                               double gap_tolerance)
    : energies_(std::move(energies)),
      coupling_(std::move(coupling)),
      kappa_(kappa),
      gap_tol_(gap_tolerance) {
  const long n = size();
  if (coupling_.rows() != n || coupling_.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "coupling does not match the level count");
  }
  if (!(kappa_ >= 0.0)) throw Error(ErrorCode::InvalidSpec, "kappa must be non-negative");
  if (!(gap_tol_ > 0.0)) throw Error(ErrorCode::InvalidSpec, "gap tolerance must be positive");
  if (hermiticity_error(coupling_) > 1e-10 * std::max(1.0, max_abs(coupling_))) {
    throw Error(ErrorCode::NotHermitian, "system-bath observable is not Hermitian");
  }
  for (long i = 1; i < n; ++i) {
    if (energies_(i) < energies_(i - 1)) {
      throw Error(ErrorCode::InvalidSpec, "energies must be ascending");
    }
  }
  build_clusters();
  build_superoperator();
}

void LindbladSystem::build_clusters() {
  const long n = size();
  cluster_.assign(n * n, -1);

  struct Gap {
    double value;
    long i;
    long j;
  };
  std::vector<Gap> gaps;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < i; ++j) {
      const double g = energies_(i) - energies_(j);
      if (g > gap_tol_ && g <= 2.0 * gap_tol_) {
        throw Error(ErrorCode::DegenerateGapAmbiguity,
                    "gap between levels " + std::to_string(j) + " and " + std::to_string(i) +
                        " is neither zero nor resolved at this tolerance");
      }
      if (g > gap_tol_) gaps.push_back({g, i, j});
    }
  }
  std::sort(gaps.begin(), gaps.end(), [](const Gap& a, const Gap& b) {
    return a.value < b.value || (a.value == b.value && (a.i < b.i || (a.i == b.i && a.j < b.j)));
  });

  std::vector<std::pair<double, long>> sums;  // running sum and count per cluster
  double prev = -1.0;
  for (const Gap& g : gaps) {
    if (sums.empty() || g.value - prev > gap_tol_) {
      if (!sums.empty() && g.value - prev <= 2.0 * gap_tol_) {
        std::ostringstream os;
        os << "gap clusters at " << prev << " and " << g.value << " are within twice the "
           << "tolerance " << gap_tol_;
        throw Error(ErrorCode::DegenerateGapAmbiguity, os.str());
      }
      sums.push_back({0.0, 0});
    }
    sums.back().first += g.value;
    sums.back().second += 1;
    cluster_[g.i * n + g.j] = static_cast<long>(sums.size()) - 1;
    prev = g.value;
  }

  cluster_gap_.clear();
  jumps_.clear();
  for (const auto& [sum, count] : sums) {
    cluster_gap_.push_back(sum / static_cast<double>(count));
    jumps_.push_back({cluster_gap_.back(), CMat::Zero(n, n)});
  }
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < i; ++j) {
      const long c = cluster_[i * n + j];
      if (c >= 0) jumps_[c].raising(i, j) = coupling_(i, j);
    }
  }
}

namespace {

struct UnionFind {
  std::vector<long> parent;
  explicit UnionFind(long n) : parent(n) { std::iota(parent.begin(), parent.end(), 0L); }
  long find(long a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  void unite(long a, long b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

void LindbladSystem::build_superoperator() {
  const long n = size();
  const long dim = n * n;
  const auto& o = coupling_;

  // K = sum_E L_E^dag L_E with (L_E)_{ec} = O_{ec} for c > e in cluster E.
  k_ = CMat::Zero(n, n);
  for (long a = 0; a < n; ++a) {
    for (long c = 0; c < n; ++c) {
      cplx acc = 0.0;
      for (long e = 0; e < std::min(a, c); ++e) {
        const long ca = cluster_of(a, e);
        if (ca >= 0 && ca == cluster_of(c, e)) acc += std::conj(o(e, a)) * o(e, c);
      }
      k_(a, c) = acc;
    }
  }

  // Sparse assembly of the superoperator on vec(rho)_{a n + b} = rho_ab.
  std::map<std::pair<long, long>, cplx> entries;
  auto add = [&](long row, long col, cplx v) { entries[{row, col}] += v; };
  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) {
      add(a * n + b, a * n + b, -kI * (energies_(a) - energies_(b)));
    }
  }
  if (kappa_ > 0.0) {
    std::vector<std::vector<std::pair<long, long>>> pairs(cluster_gap_.size());
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < i; ++j) {
        const long c = cluster_of(i, j);
        if (c >= 0) pairs[c].push_back({j, i});  // (lower, upper)
      }
    }
    for (const auto& list : pairs) {
      for (const auto& [a, c] : list) {
        for (const auto& [b, d] : list) {
          // L rho L^dag: rho_cd -> rho_ab with weight O_ac conj(O_bd).
          add(a * n + b, c * n + d, kappa_ * o(a, c) * std::conj(o(b, d)));
        }
      }
    }
    for (long a = 0; a < n; ++a) {
      for (long c = 0; c < n; ++c) {
        if (k_(a, c) == 0.0) continue;
        for (long b = 0; b < n; ++b) {
          add(a * n + b, c * n + b, -0.5 * kappa_ * k_(a, c));  // K rho
          add(b * n + c, b * n + a, -0.5 * kappa_ * k_(a, c));  // rho K
        }
      }
    }
  }

  UnionFind uf(dim);
  for (const auto& [key, v] : entries) uf.unite(key.first, key.second);
  std::map<long, long> root_to_block;
  std::vector<long> block_of(dim);
  std::vector<long> local(dim);
  blocks_.clear();
  for (long idx = 0; idx < dim; ++idx) {
    const long r = uf.find(idx);
    auto it = root_to_block.find(r);
    if (it == root_to_block.end()) {
      it = root_to_block.emplace(r, static_cast<long>(blocks_.size())).first;
      blocks_.emplace_back();
    }
    block_of[idx] = it->second;
    local[idx] = static_cast<long>(blocks_[it->second].size());
    blocks_[it->second].push_back(idx);
  }
  block_ops_.clear();
  for (const auto& blk : blocks_) {
    const long s = static_cast<long>(blk.size());
    block_ops_.push_back(CMat::Zero(s, s));
  }
  for (const auto& [key, v] : entries) {
    block_ops_[block_of[key.first]](local[key.first], local[key.second]) += v;
  }
}

CMat LindbladSystem::generator(const CMat& rho) const {
  CMat out = -kI * (energies_.cast<cplx>().asDiagonal() * rho -
                    rho * energies_.cast<cplx>().asDiagonal());
  if (kappa_ > 0.0) {
    for (const auto& j : jumps_) {
      const CMat l = j.lowering();
      out += kappa_ * (l * rho * l.adjoint());
    }
    out -= 0.5 * kappa_ * (k_ * rho + rho * k_);
  }
  return out;
}

CMat LindbladSystem::liouvillian() const {
  const long dim = size() * size();
  CMat full = CMat::Zero(dim, dim);
  for (size_t b = 0; b < blocks_.size(); ++b) {
    const auto& idx = blocks_[b];
    for (size_t r = 0; r < idx.size(); ++r) {
      for (size_t c = 0; c < idx.size(); ++c) full(idx[r], idx[c]) = block_ops_[b](r, c);
    }
  }
  return full;
}

LindbladSystem make_lindblad(const EigenSystem& es, const CMat& observable, double kappa,
                             long n_levels, double gap_tolerance) {
  if (n_levels < 1 || n_levels > es.size()) {
    throw Error(ErrorCode::DimensionMismatch, "level count out of range");
  }
  CMat o = reduce_operator(observable, es, n_levels);
  o = 0.5 * (o + o.adjoint()).eval();
  return {es.energies.head(n_levels), std::move(o), kappa, gap_tolerance};
}

CMat reduce_operator(const CMat& op, const EigenSystem& es, long n_levels) {
  if (op.rows() != es.vectors.rows() || op.cols() != es.vectors.rows()) {
    throw Error(ErrorCode::SpaceMismatch, "operator and eigensystem use different spaces");
  }
  const auto v = es.vectors.leftCols(n_levels);
  return v.adjoint() * op * v;
}

CMat reduce_state(const CVec& psi, const EigenSystem& es, long n_levels) {
  if (psi.size() != es.vectors.rows()) {
    throw Error(ErrorCode::SpaceMismatch, "state and eigensystem use different spaces");
  }
  const CVec c = es.vectors.leftCols(n_levels).adjoint() * psi;
  const double leak = psi.squaredNorm() - c.squaredNorm();
  if (leak > 1e-10) {
    std::ostringstream os;
    os << "population " << leak << " lies above the lowest " << n_levels << " levels";
    throw Error(ErrorCode::SpaceMismatch, os.str());
  }
  return c * c.adjoint();
}

RateTable::RateTable(const LindbladSystem& sys, long n)
    : n_(n), kappa_(sys.kappa()), o_(sys.coupling().topLeftCorner(n, n)) {
  if (n < 1 || n > sys.size()) throw Error(ErrorCode::DimensionMismatch, "rate table range");
}

cplx RateTable::operator()(long i, long j, long k, long l) const {
  return kappa_ * o_(i, j) * o_(k, l);
}

namespace {

struct StateCheck {
  double trace_error;
  double hermiticity_error;
  double min_eigenvalue;
};

StateCheck inspect(const CMat& rho) {
  StateCheck c;
  c.trace_error = std::abs(rho.trace() - 1.0);
  c.hermiticity_error = hermiticity_error(rho);
  const CMat h = 0.5 * (rho + rho.adjoint());
  Eigen::SelfAdjointEigenSolver<CMat> es(h, Eigen::EigenvaluesOnly);
  c.min_eigenvalue = es.eigenvalues().size() ? es.eigenvalues()(0) : 0.0;
  return c;
}

CVec vectorize(const CMat& rho) {
  const long n = rho.rows();
  CVec v(n * n);
  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) v(a * n + b) = rho(a, b);
  }
  return v;
}

CMat unvectorize(const CVec& v, long n) {
  CMat rho(n, n);
  for (long a = 0; a < n; ++a) {
    for (long b = 0; b < n; ++b) rho(a, b) = v(a * n + b);
  }
  return rho;
}

}  // namespace

Trajectory evolve(const LindbladSystem& sys, const CMat& rho0,
                  const std::vector<double>& times, const std::vector<CMat>& observables,
                  bool keep_states) {
  const long n = sys.size();
  if (rho0.rows() != n || rho0.cols() != n) {
    throw Error(ErrorCode::DimensionMismatch, "initial state has the wrong dimension");
  }
  for (const auto& o : observables) {
    if (o.rows() != n || o.cols() != n) {
      throw Error(ErrorCode::DimensionMismatch, "observable has the wrong dimension");
    }
  }
  if (times.empty()) throw Error(ErrorCode::InvalidSpec, "empty time grid");
  for (size_t k = 1; k < times.size(); ++k) {
    if (!(times[k] > times[k - 1])) throw Error(ErrorCode::InvalidSpec, "time grid not ascending");
  }
  const StateCheck c0 = inspect(rho0);
  if (c0.trace_error > 1e-10 || c0.hermiticity_error > 1e-10 || c0.min_eigenvalue < -1e-10) {
    throw Error(ErrorCode::InvalidSpec, "initial state is not a density matrix");
  }

  const auto& blocks = sys.blocks();
  const auto& ops = sys.block_operators();
  // One set of block propagators per distinct step length.
  std::map<double, std::vector<CMat>> cache;
  auto propagators = [&](double dt) -> const std::vector<CMat>& {
    auto it = cache.find(dt);
    if (it != cache.end()) return it->second;
    std::vector<CMat> props;
    props.reserve(ops.size());
    for (const auto& l : ops) props.push_back((l * dt).exp());
    return cache.emplace(dt, std::move(props)).first->second;
  };

  Trajectory tr;
  tr.times = times;
  tr.expectations.assign(observables.size(), {});
  CVec v = vectorize(rho0);
  for (size_t k = 0; k < times.size(); ++k) {
    if (k > 0) {
      const auto& props = propagators(times[k] - times[k - 1]);
      for (size_t b = 0; b < blocks.size(); ++b) {
        const auto& idx = blocks[b];
        CVec part(idx.size());
        for (size_t r = 0; r < idx.size(); ++r) part(r) = v(idx[r]);
        part = props[b] * part;
        for (size_t r = 0; r < idx.size(); ++r) v(idx[r]) = part(r);
      }
    }
    const CMat rho = unvectorize(v, n);
    const StateCheck c = inspect(rho);
    tr.max_trace_error = std::max(tr.max_trace_error, c.trace_error);
    tr.max_hermiticity_error = std::max(tr.max_hermiticity_error, c.hermiticity_error);
    tr.min_eigenvalue = std::min(tr.min_eigenvalue, c.min_eigenvalue);
    if (c.trace_error > 1e-8 || c.hermiticity_error > 1e-8 || c.min_eigenvalue < -1e-7) {
      std::ostringstream os;
      os << "state at t=" << times[k] << " failed checks (trace error " << c.trace_error
         << ", hermiticity " << c.hermiticity_error << ", min eigenvalue " << c.min_eigenvalue
         << ")";
      throw Error(ErrorCode::StepFailure, os.str());
    }
    for (size_t j = 0; j < observables.size(); ++j) {
      tr.expectations[j].push_back((rho * observables[j]).trace().real());
    }
    if (keep_states) tr.states.push_back(rho);
  }
  return tr;
}

CMat stationary_state(const LindbladSystem& sys) {
  if (!(sys.kappa() > 0.0)) {
    throw Error(ErrorCode::NonUniqueSteadyState, "kappa = 0 leaves every eigenstate stationary");
  }
  const long n = sys.size();
  const auto& blocks = sys.blocks();
  const auto& ops = sys.block_operators();
  double scale = sys.kappa();
  for (const auto& l : ops) scale = std::max(scale, max_abs(l));

  CVec v = CVec::Zero(n * n);
  long null_dim = 0;
  for (size_t b = 0; b < blocks.size(); ++b) {
    Eigen::JacobiSVD<CMat> svd(ops[b], Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const long m = s.size();
    long nb = 0;
    for (long k = 0; k < m; ++k) {
      if (s(k) < 1e-10 * scale) ++nb;
    }
    if (nb == 0) continue;
    null_dim += nb;
    if (null_dim > 1) break;
    const CVec x = svd.matrixV().col(m - 1);
    for (size_t r = 0; r < blocks[b].size(); ++r) v(blocks[b][r]) = x(r);
  }
  if (null_dim > 1) {
    throw Error(ErrorCode::NonUniqueSteadyState,
                "null space of the generator has dimension " + std::to_string(null_dim));
  }
  if (null_dim == 0) throw Error(ErrorCode::SolverFailure, "generator has no null vector");
  CMat rho = unvectorize(v, n);
  rho /= rho.trace();
  rho = 0.5 * (rho + rho.adjoint()).eval();
  const double residual = max_abs(sys.generator(rho));
  if (residual > 1e-9 * std::max(1.0, scale)) {
    std::ostringstream os;
    os << "stationary residual " << residual;
    throw Error(ErrorCode::SolverFailure, os.str());
  }
  return rho;
}

double decay_rate(const LindbladSystem& sys, long i) {
  if (i <= 0 || i >= sys.size()) {
    throw Error(ErrorCode::DimensionMismatch, "decay rate needs an excited level index");
  }
  double sum = 0.0;
  for (long j = 0; j < i; ++j) {
    if (sys.cluster_of(i, j) >= 0) sum += std::norm(sys.coupling()(j, i));
  }
  return sys.kappa() * sum;
}

double fitted_decay_rate(const LindbladSystem& sys, long i, long samples) {
  const double rate = decay_rate(sys, i);
  if (!(rate > 0.0)) return 0.0;
  const long n = sys.size();
  CMat rho0 = CMat::Zero(n, n);
  rho0(i, i) = 1.0;
  CMat proj = CMat::Zero(n, n);
  proj(i, i) = 1.0;
  const auto times = uniform_grid(0.0, 3.0 / rate, samples);
  const Trajectory tr = evolve(sys, rho0, times, {proj});
  // Fit log p = c - r t.
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  long used = 0;
  for (size_t k = 0; k < times.size(); ++k) {
    const double p = tr.expectations[0][k];
    if (p <= 0.0) continue;
    const double y = std::log(p);
    st += times[k];
    sy += y;
    stt += times[k] * times[k];
    sty += times[k] * y;
    ++used;
  }
  const double denom = used * stt - st * st;
  if (used < 2 || denom == 0.0) return 0.0;
  return -(used * sty - st * sy) / denom;
}

std::vector<double> uniform_grid(double t0, double t1, long points) {
  if (points < 2 || !(t1 > t0)) throw Error(ErrorCode::InvalidSpec, "time grid needs t1 > t0");
  std::vector<double> out(points);
  for (long k = 0; k < points; ++k) {
    out[k] = t0 + (t1 - t0) * static_cast<double>(k) / static_cast<double>(points - 1);
  }
  return out;
}

}  // namespace gaugetrunc

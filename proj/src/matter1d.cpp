#include "gaugetrunc/matter1d.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <string>

#include "gaugetrunc/error.hpp"

namespace gaugetrunc {

void MatterSpec::validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::InvalidSpec, msg);
  };
  if (!(mass > 0.0)) fail("mass must be positive");
  if (!(phi > 0.0)) fail("phi must be positive (potential bounded below)");
  if (n_levels < 2) fail("n_levels must be at least 2");
  if (n_grid < 4 * n_levels) fail("n_grid must be at least 4 * n_levels");
  if (!std::isfinite(theta)) fail("theta must be finite");
}

MatterBasis MatterBasis::truncated(long levels) const {
  if (levels < 2 || levels > size()) {
    throw Error(ErrorCode::DimensionMismatch,
                "cannot truncate basis of " + std::to_string(size()) +
                    " levels to " + std::to_string(levels));
  }
  MatterBasis out;
  out.eps = eps.head(levels);
  out.x = x.topLeftCorner(levels, levels);
  out.p = p.topLeftCorner(levels, levels);
  out.x2 = x2.topLeftCorner(levels, levels);
  out.spec = spec;
  out.spec.n_levels = levels;
  return out;
}

namespace {

std::string fmt_sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

struct Grid {
  RVec x;
  double h = 0.0;
};

// Interior points of [-L, L]; Dirichlet walls sit one spacing outside.
Grid make_grid(double half_width, long n) {
  Grid g;
  g.h = 2.0 * half_width / static_cast<double>(n + 1);
  g.x.resize(n);
  for (long k = 0; k < n; ++k) g.x(k) = -half_width + g.h * static_cast<double>(k + 1);
  return g;
}

// Sinc-DVR kinetic energy p^2 / 2m on a uniform grid.
RMat sinc_kinetic(long n, double h, double mass) {
  RMat t(n, n);
  const double pre = 1.0 / (2.0 * mass * h * h);
  const double pi2 = std::numbers::pi * std::numbers::pi;
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) {
        t(i, j) = pre * pi2 / 3.0;
      } else {
        const long d = i - j;
        const double sign = (d % 2 == 0) ? 1.0 : -1.0;
        t(i, j) = pre * 2.0 * sign / static_cast<double>(d * d);
      }
    }
  }
  return t;
}

// Sinc-DVR first derivative d/dx (real antisymmetric).
RMat sinc_derivative(long n, double h) {
  RMat d(n, n);
  for (long i = 0; i < n; ++i) {
    for (long j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = 0.0;
      } else {
        const long k = i - j;
        const double sign = (k % 2 == 0) ? 1.0 : -1.0;
        d(i, j) = sign / (static_cast<double>(k) * h);
      }
    }
  }
  return d;
}

RMat grid_hamiltonian(const MatterSpec& spec, const Grid& g) {
  RMat h = sinc_kinetic(static_cast<long>(g.x.size()), g.h, spec.mass);
  for (Eigen::Index k = 0; k < g.x.size(); ++k) h(k, k) += spec.potential(g.x(k));
  return h;
}

double potential_minimum(const MatterSpec& spec) {
  if (spec.theta <= 0.0) return 0.0;
  const double x2 = spec.theta / spec.phi;
  return -0.25 * spec.theta * x2;
}

// Outer classical turning point of energy e (> V_min).
double turning_point(const MatterSpec& spec, double e) {
  double lo = spec.theta > 0.0 ? std::sqrt(spec.theta / spec.phi) : 0.0;
  double hi = std::max(1.0, 2.0 * lo);
  while (spec.potential(hi) < e) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (spec.potential(mid) < e ? lo : hi) = mid;
  }
  return hi;
}

// Semiclassical count of bound states below energy e.
double wkb_count(const MatterSpec& spec, double e) {
  const double xt = turning_point(spec, e);
  constexpr int kPoints = 4000;
  const double dx = 2.0 * xt / kPoints;
  double action = 0.0;
  for (int k = 0; k < kPoints; ++k) {
    const double x = -xt + (k + 0.5) * dx;
    const double kin = e - spec.potential(x);
    if (kin > 0.0) action += std::sqrt(2.0 * spec.mass * kin) * dx;
  }
  return action / std::numbers::pi;
}

double initial_half_width(const MatterSpec& spec) {
  const double vmin = potential_minimum(spec);
  double lo = vmin;
  double hi = vmin + 1.0;
  const double want = static_cast<double>(spec.n_levels) + 2.0;
  while (wkb_count(spec, hi) < want) hi = vmin + 2.0 * (hi - vmin);
  for (int it = 0; it < 100; ++it) {
    const double mid = 0.5 * (lo + hi);
    (wkb_count(spec, mid) < want ? lo : hi) = mid;
  }
  return 1.5 * turning_point(spec, hi);
}

// Largest |psi(+-L)| over the retained levels.
double edge_amplitude(const RMat& vecs, long n_levels, double h) {
  const long last = vecs.rows() - 1;
  double tail = 0.0;
  for (long mu = 0; mu < n_levels; ++mu) {
    tail = std::max({tail, std::abs(vecs(0, mu)), std::abs(vecs(last, mu))});
  }
  return tail / std::sqrt(h);
}

MatterSpec resolve_half_width(const MatterSpec& spec, double tolerance) {
  if (spec.half_width > 0.0) return spec;
  MatterSpec out = spec;
  out.half_width = initial_half_width(spec);
  // One refinement from the solved spectrum.
  const RVec levels = double_well_levels(out, out.n_levels);
  out.half_width = 1.5 * turning_point(spec, levels(out.n_levels - 1));
  // Shallow wells keep low levels wide; widen until the edge is quiet.
  for (int it = 0; it < 12; ++it) {
    const Grid g = make_grid(out.half_width, out.n_grid);
    Eigen::SelfAdjointEigenSolver<RMat> solver(grid_hamiltonian(out, g));
    if (edge_amplitude(solver.eigenvectors(), out.n_levels, g.h) <= tolerance) break;
    out.half_width *= 1.15;
  }
  return out;
}

}  // namespace

RVec double_well_levels(const MatterSpec& spec, long count) {
  spec.validate();
  if (!(spec.half_width > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "half_width must be resolved (> 0)");
  }
  const Grid g = make_grid(spec.half_width, spec.n_grid);
  Eigen::SelfAdjointEigenSolver<RMat> solver(grid_hamiltonian(spec, g),
                                             Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SolverFailure, "grid eigensolver failed");
  }
  return solver.eigenvalues().head(count);
}

MatterBasis solve_double_well(const MatterSpec& input,
                              const SolveOptions& options) {
  input.validate();
  const MatterSpec spec = resolve_half_width(input, options.boundary_tolerance);
  const long n_lev = spec.n_levels;
  const Grid g = make_grid(spec.half_width, spec.n_grid);

  Eigen::SelfAdjointEigenSolver<RMat> solver(grid_hamiltonian(spec, g));
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorCode::SolverFailure, "grid eigensolver failed");
  }
  RVec eps = solver.eigenvalues().head(n_lev);
  RMat vecs = solver.eigenvectors().leftCols(n_lev);

  const double tail = edge_amplitude(vecs, n_lev, g.h);
  if (tail > options.boundary_tolerance) {
    throw Error(ErrorCode::BoundaryLeak,
                "wavefunction amplitude " + fmt_sci(tail) + " at the grid edge; enlarge half_width");
  }

  for (long mu = 1; mu < n_lev; ++mu) {
    if (!(eps(mu) > eps(mu - 1))) {
      throw Error(ErrorCode::SolverFailure, "levels not strictly increasing");
    }
  }

  if (options.check_convergence) {
    MatterSpec fine = spec;
    fine.n_grid = 2 * spec.n_grid;
    const RVec fine_eps = double_well_levels(fine, n_lev);
    const double shift = (fine_eps - eps).cwiseAbs().maxCoeff();
    const double omega0 = eps(1) - eps(0);
    if (shift > options.convergence_tolerance * omega0) {
      throw Error(ErrorCode::NotConverged,
                  "doubling n_grid shifts levels by " + std::to_string(shift));
    }
  }

  // Sign convention: ground state's dominant lobe positive, then
  // <mu-1|x|mu> >= 0 going up the ladder.
  {
    Eigen::Index imax = 0;
    vecs.col(0).cwiseAbs().maxCoeff(&imax);
    if (vecs(imax, 0) < 0.0) vecs.col(0) *= -1.0;
  }
  for (long mu = 1; mu < n_lev; ++mu) {
    const double elem = vecs.col(mu - 1).dot(g.x.cwiseProduct(vecs.col(mu)));
    if (elem < 0.0) vecs.col(mu) *= -1.0;
  }

  MatterBasis basis;
  basis.spec = spec;
  basis.eps = eps;
  basis.x = vecs.transpose() * g.x.asDiagonal() * vecs;
  basis.x = 0.5 * (basis.x + basis.x.transpose()).eval();
  const RVec xsq = g.x.cwiseProduct(g.x);
  basis.x2 = vecs.transpose() * xsq.asDiagonal() * vecs;
  basis.x2 = 0.5 * (basis.x2 + basis.x2.transpose()).eval();
  RMat dmat = vecs.transpose() * sinc_derivative(spec.n_grid, g.h) * vecs;
  dmat = 0.5 * (dmat - dmat.transpose()).eval();
  basis.p = -kI * dmat.cast<cplx>();
  return basis;
}

MatterSpec calibrate_potential(double target_mu, double mode_frequency,
                               long n_levels, long n_grid) {
  if (!(target_mu > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "target anharmonicity must be positive");
  }
  if (!(mode_frequency > 0.0)) {
    throw Error(ErrorCode::InvalidSpec, "mode frequency must be positive");
  }

  // Reduced problem -d^2/dy^2 - g y^2 + y^4 (mass 1/2): one shape
  // parameter g, the barrier height being g^2 / 4.
  auto reduced = [](double g) {
    MatterSpec s;
    s.mass = 0.5;
    s.theta = 2.0 * g;
    s.phi = 4.0;
    s.n_levels = 30;
    s.n_grid = 512;
    s = resolve_half_width(s, std::numeric_limits<double>::infinity());
    return double_well_levels(s, 3);
  };
  auto mu_of = [&](double g) {
    const RVec e = reduced(g);
    return ((e(2) - e(1)) - (e(1) - e(0))) / (e(1) - e(0));
  };

  constexpr int kBudget = 200;
  int evals = 0;
  double lo = 0.0;
  double hi = 1.0;
  while (mu_of(lo) > target_mu) {
    lo = lo == 0.0 ? -1.0 : 2.0 * lo;
    if (++evals > kBudget) throw Error(ErrorCode::CalibrationFailed, "no lower bracket");
  }
  while (mu_of(hi) < target_mu) {
    lo = hi;
    hi *= 1.5;
    if (++evals > kBudget) throw Error(ErrorCode::CalibrationFailed, "no upper bracket");
  }
  double g = 0.5 * (lo + hi);
  bool done = false;
  for (int it = 0; it < kBudget; ++it) {
    g = 0.5 * (lo + hi);
    const double mu = mu_of(g);
    if (std::abs(mu - target_mu) < 1e-10 * target_mu || hi - lo < 1e-14 * std::abs(hi)) {
      done = true;
      break;
    }
    (mu < target_mu ? lo : hi) = g;
  }
  if (!done) throw Error(ErrorCode::CalibrationFailed, "bisection budget exhausted");

  // Map back to mass 1: energies scale by e, lengths by s = 1 / sqrt(2 e).
  const RVec levels = reduced(g);
  const double e = mode_frequency / (levels(1) - levels(0));
  const double s2 = 1.0 / (2.0 * e);
  MatterSpec out;
  out.mass = 1.0;
  out.theta = 2.0 * e * g / s2;
  out.phi = 4.0 * e / (s2 * s2);
  out.n_levels = n_levels;
  out.n_grid = n_grid;
  out.half_width = 0.0;
  return out;
}

nlohmann::json to_json(const MatterSpec& spec) {
  return {{"mass", spec.mass},         {"theta", spec.theta},
          {"phi", spec.phi},           {"half_width", spec.half_width},
          {"n_grid", spec.n_grid},     {"n_levels", spec.n_levels}};
}

MatterSpec matter_spec_from_json(const nlohmann::json& j) {
  MatterSpec s;
  s.mass = j.value("mass", s.mass);
  s.theta = j.at("theta").get<double>();
  s.phi = j.at("phi").get<double>();
  s.half_width = j.value("half_width", s.half_width);
  s.n_grid = j.value("n_grid", s.n_grid);
  s.n_levels = j.value("n_levels", s.n_levels);
  return s;
}

nlohmann::json to_json(const MatterBasis& basis) {
  const long n = basis.size();
  auto real_rows = [n](const RMat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (long i = 0; i < n; ++i) {
      nlohmann::json row = nlohmann::json::array();
      for (long j = 0; j < n; ++j) row.push_back(m(i, j));
      rows.push_back(std::move(row));
    }
    return rows;
  };
  nlohmann::json p = nlohmann::json::array();
  for (long i = 0; i < n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (long j = 0; j < n; ++j) {
      row.push_back({basis.p(i, j).real(), basis.p(i, j).imag()});
    }
    p.push_back(std::move(row));
  }
  nlohmann::json eps = nlohmann::json::array();
  for (long i = 0; i < n; ++i) eps.push_back(basis.eps(i));
  return {{"eps", eps},
          {"X", real_rows(basis.x)},
          {"P", p},
          {"X2", real_rows(basis.x2)},
          {"omega0", basis.omega0()},
          {"mu", basis.anharmonicity()},
          {"x10", basis.x10()},
          {"spec", to_json(basis.spec)}};
}

}  // namespace gaugetrunc

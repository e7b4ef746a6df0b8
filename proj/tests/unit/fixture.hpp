#pragma once

#include <functional>

#include "doctest.h"

#include "gaugetrunc/analysis.hpp"
#include "gaugetrunc/error.hpp"

namespace fixture {

using namespace gaugetrunc;

// Calibrated double well (mu = 70, omega0 = 1), solved once per binary.
inline const MatterBasis& basis() {
  static const MatterBasis b = solve_double_well(calibrate_potential(70.0, 1.0));
  return b;
}

inline LightMatterSystem system(double eta, long n_matter = 12, long n_photon = 30,
                                double omega = 1.0, long kept = 2) {
  ModeSpec mode;
  mode.omega = omega;
  mode.n_photons = n_photon;
  return make_system(basis().truncated(n_matter), mode, eta, kept);
}

inline bool throws_code(const std::function<void()>& fn, ErrorCode code) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code() == code;
  }
  return false;
}

// Rows/columns of the first `keep` photon states in every kept matter block.
inline CMat low_photon_block(const CMat& m, long blocks, long n_photon, long keep) {
  std::vector<long> idx;
  for (long mu = 0; mu < blocks; ++mu) {
    for (long n = 0; n < keep; ++n) idx.push_back(mu * n_photon + n);
  }
  CMat out(idx.size(), idx.size());
  for (size_t i = 0; i < idx.size(); ++i) {
    for (size_t j = 0; j < idx.size(); ++j) out(i, j) = m(idx[i], idx[j]);
  }
  return out;
}

}  // namespace fixture

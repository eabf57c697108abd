#pragma once

#include <span>
#include <vector>

#include "ngsat/fock.hpp"

namespace ngsat {

/// log2(1 + 2 eps) with eps the negativity of the partial transpose.
double log_negativity(const DensityMatrix& rho);

/// Same quantity for the trace-normalized B|D marginal of a line-structured
/// tripartite state, without forming the dense matrix.
double log_negativity(const TripartiteAmplitudes& state);

/// Log-negativity of a two-mode squeezed vacuum whose B arm passed through a
/// pure-loss channel, from the 4x4 covariance matrix (vacuum variance 1) and
/// the smallest symplectic eigenvalue of its partial transpose.
double gaussian_eln_oracle(double r, double eta);

struct GainRecord {
  std::vector<double> eln;           // per supermode, after the operation
  std::vector<double> baseline_eln;  // per supermode, Gaussian reference
  double gain = 0.0;                 // G_tot, clamped at 0
  double probability = 1.0;          // heralding probability P
  double rate = 0.0;                 // R_tot = P G_tot
  double tail_mass = 0.0;            // worst truncation tail over all states
};

GainRecord total_gain(std::span<const double> eln, std::span<const double> baseline_eln,
                      double probability);

GainRecord total_gain(std::span<const DensityMatrix> nongaussian,
                      std::span<const DensityMatrix> baseline, double probability);

}  // namespace ngsat

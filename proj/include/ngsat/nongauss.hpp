#pragma once

// Heralded single-photon operations on a supermode, as closed-form maps
// |m> -> c(m) |m + shift>, plus a brute-force beam-splitter reference.

#include <string>
#include <string_view>

#include <Eigen/Dense>

#include "ngsat/fock.hpp"

namespace ngsat {

enum class OpKind { None, Catalysis, Subtraction, Addition };

std::string_view to_string(OpKind kind);
OpKind parse_op_kind(std::string_view name);

struct NGOperation {
  OpKind kind = OpKind::None;
  double transmissivity = 1.0;

  void validate() const;
};

/// What happens to the supermodes other than the leading one.
enum class DetectionStrategy {
  ZeroPhotonCatalysis,  // heralded on vacuum in / vacuum out: sqrt(T)^n
  Untouched,
};

/// Multiplicative action on |m>_B of one operator family. The coefficient at
/// m = 0 of a lowering map is 0.
class OccupationMap {
 public:
  enum class Family { ZeroCatalysis, OneCatalysis, Subtraction, Addition, Identity };

  OccupationMap(Family family, double transmissivity);

  double operator()(int m) const;
  int shift() const;
  Family family() const { return family_; }
  double transmissivity() const { return t_; }

 private:
  Family family_;
  double t_;
};

/// sqrt(T)^m
OccupationMap catalysis_zero_map(double transmissivity);
/// sqrt(T)^(m-1) [T - (1-T) m]
OccupationMap catalysis_one_map(double transmissivity);
/// sqrt((1-T)/T) sqrt(m) sqrt(T)^m, lowers m by one
OccupationMap subtraction_map(double transmissivity);
/// -sqrt(1-T) sqrt(m+1) sqrt(T)^m, raises m by one
OccupationMap addition_map(double transmissivity);
OccupationMap identity_map();

/// Map applied to the leading supermode for an operation.
OccupationMap leading_map(const NGOperation& op);
/// Map applied to supermodes k >= 2 for an operation under a strategy.
OccupationMap companion_map(const NGOperation& op, DetectionStrategy strategy);

/// Which occupation feeds the prefactor.
enum class MapArgument {
  Current,  // the B occupation at the time the map acts
  PreLoss,  // b + e, the occupation before a pure-loss channel; shift-0 maps only
};

/// Un-normalized action on the B axis. Amplitudes pushed past the B
/// truncation are dropped; tail_mass() of the result exposes the loss.
TripartiteAmplitudes apply_occupation_map(const OccupationMap& map,
                                          const TripartiteAmplitudes& state,
                                          MapArgument argument = MapArgument::Current);

/// <n_out|_anc U(T) |n_in>_anc on the signal mode, where
/// U(T) = exp(theta (a^dag b - a b^dag)), cos(theta) = sqrt(T), is
/// built on a (dim x dim) truncated ancilla (x) signal space and
/// exponentiated numerically. Element (m_out, m_in).
Eigen::MatrixXd bs_oracle(int n_ancilla_in, int n_ancilla_out, double transmissivity, int dim);

}  // namespace ngsat

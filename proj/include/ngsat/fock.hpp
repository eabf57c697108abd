#pragma once

// Truncated Fock-space kernel for the signal (B), idler (D) and
// environment (E) modes of a single supermode.

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace ngsat {

inline constexpr double kTolEig = 1e-12;
inline constexpr double kTolPsd = 1e-10;
inline constexpr double kTailMassLimit = 1e-8;

/// Maximum occupation kept on each mode; the dimension of a mode is n + 1.
struct Truncation {
  int n_b = 30;
  int n_d = 30;
  int n_e = 30;

  int dim_b() const { return n_b + 1; }
  int dim_d() const { return n_d + 1; }
  int dim_e() const { return n_e + 1; }

  void validate() const;

  /// Widen B and E by one level so that an occupation raised by photon
  /// addition on the top D level still fits.
  Truncation with_addition_headroom() const;
};

/// One nonzero amplitude of |b, d, e>.
struct FockEntry {
  int b;
  int d;
  int e;
  double amp;
};

/// Real amplitudes over (n_B, n_D, n_E), stored as a coordinate list.
/// Pipeline states populate only O(N^2) entries, so nothing dense is kept.
class TripartiteAmplitudes {
 public:
  TripartiteAmplitudes(Truncation dims, int supermode_index = 1);

  /// Adds amp to |b, d, e>; entries outside the truncation throw.
  void add(int b, int d, int e, double amp);

  const Truncation& dims() const { return dims_; }
  int supermode_index() const { return supermode_index_; }
  std::span<const FockEntry> entries() const { return entries_; }

  double amplitude(int b, int d, int e) const;
  double squared_norm() const;

  /// Largest share of the squared norm sitting on the top level of any axis.
  double tail_mass() const;

  /// True when every entry satisfies b - d + e == offset for one offset.
  bool on_single_line(int* offset = nullptr) const;

  /// Collapses duplicate coordinates and drops exact zeros.
  void compact();

 private:
  Truncation dims_;
  int supermode_index_;
  std::vector<FockEntry> entries_;
};

/// Dense real symmetric density matrix on B (x) D, flattened as b * dim_d + d.
class DensityMatrix {
 public:
  DensityMatrix(int dim_b, int dim_d);
  DensityMatrix(int dim_b, int dim_d, Eigen::MatrixXd elements);

  int dim_b() const { return dim_b_; }
  int dim_d() const { return dim_d_; }
  int index(int b, int d) const { return b * dim_d_ + d; }

  const Eigen::MatrixXd& elements() const { return elements_; }
  Eigen::MatrixXd& elements() { return elements_; }

  double operator()(int b, int d, int bp, int dp) const {
    return elements_(index(b, d), index(bp, dp));
  }

  double trace() const { return elements_.trace(); }
  DensityMatrix normalized() const;

  /// Smallest eigenvalue; PSD checks compare it against -kTolPsd.
  double min_eigenvalue() const;

 private:
  int dim_b_;
  int dim_d_;
  Eigen::MatrixXd elements_;
};

/// Largest flattened B (x) D dimension accepted for dense storage.
inline constexpr std::size_t kMaxDenseDim = 4096;

DensityMatrix trace_out_environment(const TripartiteAmplitudes& state);

/// [(b,d),(b',d')] -> [(b,d'),(b',d)].
DensityMatrix partial_transpose_d(const DensityMatrix& rho);
/// [(b,d),(b',d')] -> [(b',d),(b,d')].
DensityMatrix partial_transpose_b(const DensityMatrix& rho);

/// |sum of eigenvalues below -kTolEig|. The matrix is split into the
/// connected components of its sparsity graph before diagonalization, so
/// block-structured inputs cost one small eigensolve per block.
double negative_eigenvalue_sum(const DensityMatrix& rho);

/// Negativity of the trace-normalized B|D state obtained by tracing out E,
/// computed without forming the dense matrix. The state must satisfy
/// on_single_line(); the partial transpose is then block diagonal in the
/// total occupation b + d' and each block is diagonalized separately.
double line_state_negativity(const TripartiteAmplitudes& state);

/// Annihilation operator on a truncated mode: a[n-1, n] = sqrt(n).
Eigen::MatrixXd ladder_matrix(int dim);

}  // namespace ngsat

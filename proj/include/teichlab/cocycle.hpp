#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "teichlab/iet.hpp"

namespace teichlab {

// Antisymmetric translation pairing of a permutation:
// omega(a, b) = +1 if a precedes b on top and follows it on bottom, -1 in the
// mirror case, 0 otherwise. Its rank is twice the genus of any suspension.
struct OmegaForm {
  std::size_t d = 0;
  std::vector<int> matrix;  // row-major d x d
  int rank = 0;

  int operator()(std::size_t i, std::size_t j) const { return matrix[i * d + j]; }
  int genus() const noexcept { return rank / 2; }
  Eigen::MatrixXd to_dense() const;
};

OmegaForm omega(const Permutation& perm);

// Exact rank of a small integer matrix.
int integer_rank(const std::vector<int>& m, std::size_t rows, std::size_t cols);

// Default combinatorics for the named strata: "torus" (d=2), "h2" (d=4),
// "h11" (d=5), all rotation-class permutations. Throws ValidationError on an
// unknown name.
Permutation stratum_permutation(std::string_view name);

// Symplectic pairing on Im(Omega): omega(u, v) = a^T v for any a with
// Omega a = u. Preserved by the height action h -> B^T h.
double symplectic_pairing(const OmegaForm& om, const Eigen::VectorXd& u, const Eigen::VectorXd& v);

// Orthonormal basis of the column space of Omega.
Eigen::MatrixXd image_basis(const OmegaForm& om);

// Modified Gram-Schmidt on the columns; returns log of each diagonal R entry.
Eigen::VectorXd mgs_orthonormalize(Eigen::MatrixXd& frame);

// Sine of the largest principal angle between two column spans (both
// orthonormal).
double subspace_distance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

// Evolving frame in Im(Omega_pi) pushed by the transposed Zorich matrices
// (the action on heights / cohomology classes). Products are accumulated in
// checked 64-bit integers and flushed into the floating frame on overflow.
class CocycleFrame {
 public:
  CocycleFrame(const Iet& start, std::size_t columns, Rng& rng);

  // One Zorich step of the underlying IET; returns the run length.
  std::uint64_t advance(const IetConfig& cfg);
  // Flushes pending products, projects onto Im(Omega) of the current
  // permutation and re-orthonormalizes, accumulating log growth.
  void renormalize();

  const Iet& iet() const noexcept { return iet_; }
  const Eigen::MatrixXd& vectors() const noexcept { return frame_; }
  const Eigen::VectorXd& log_norms() const noexcept { return log_norms_; }
  double teich_time() const noexcept { return iet_.log_scale - start_time_; }
  std::uint64_t steps() const noexcept { return steps_; }

 private:
  void flush();
  // Flush plus re-orthonormalization without projecting.
  void absorb();
  const Eigen::MatrixXd& projector();

  Iet iet_;
  Eigen::MatrixXd frame_;
  Eigen::VectorXd log_norms_;
  VisitationMatrix pending_;
  double start_time_ = 0.0;
  std::uint64_t steps_ = 0;
};

struct KzConfig {
  std::uint64_t steps = 100'000;  // Zorich steps per seed
  int qr_period = 10;
  std::uint64_t seed = 1;
  std::size_t blocks = 64;        // batches per seed for the bootstrap
  int bootstrap_replicates = 200;
  IetConfig iet;
};

struct ExponentEstimate {
  std::vector<double> lambdas;  // normalized, descending, lambdas[0] == 1
  std::vector<double> stderr_;  // block-bootstrap standard errors
  std::vector<double> raw;      // log growth / Teichmueller time
  double raw_top_half = 0.0;    // raw top exponent at half the run
  std::uint64_t steps = 0;
  double teich_time = 0.0;
  std::vector<std::uint64_t> seeds;
  int genus() const noexcept { return static_cast<int>(lambdas.size() / 2); }
};

// Lyapunov spectrum of the cocycle restricted to Im(Omega), started from the
// given IET. Deterministic for fixed config.
ExponentEstimate kz_exponents(const Iet& seed_iet, const KzConfig& cfg);

// Independent runs from random lengths for each seed (seed_k = derived from
// cfg.seed and k), pooled in seed order.
ExponentEstimate kz_exponents(const Permutation& perm, const KzConfig& cfg, int seeds);

struct SpectrumReport {
  bool symmetry = false;
  bool gap = false;
  bool hyperbolic = false;
  bool gap_vacuous = false;         // genus 1
  bool hyperbolic_vacuous = false;  // genus 1
  std::vector<double> pair_sums;    // lambda_i + lambda_{2g+1-i}
};

SpectrumReport spectrum_checks(const ExponentEstimate& est);

struct OseledecSplitting {
  Iet base;                 // point of the renormalization path where both live
  Eigen::MatrixXd e_plus;   // d x g, orthonormal; column 0 pairs nontrivially with lengths
  Eigen::MatrixXd e_minus;  // d x g, orthonormal
  double plus_drift = 0.0;  // checkpoint disagreement (sine of principal angle)
  double minus_drift = 0.0;
};

// Unstable/stable subspaces of the height action at the point reached after
// `steps` Zorich steps of burn-in; the stable one is computed from the next
// `steps` steps by applying the visitation matrices in reverse order to a
// frame (range of B_1 ... B_n) and taking the orthogonal complement.
OseledecSplitting oseledec_subspaces(const Iet& seed_iet, std::uint64_t steps,
                                     std::uint64_t frame_seed = 1, const IetConfig& cfg = {});

}  // namespace teichlab

#pragma once

#include <Eigen/Dense>
#include <istream>
#include <utility>

#include "cfqkd/errors.hpp"

namespace cfqkd {
namespace nocloning {

enum class Subsystem { A, B };

// Pure state of a bipartite system, stored as the dA x dB amplitude matrix
// psi(i,j) = <i_A j_B | Psi>.
struct BipartiteState {
  Eigen::MatrixXcd amp;

  void validate() const {
    if (amp.rows() < 1 || amp.cols() < 1) {
      throw ValidationError("bipartite state needs dA, dB >= 1");
    }
    if (std::abs(amp.squaredNorm() - 1.0) > 1e-12) {
      throw ValidationError("bipartite state is not normalized");
    }
  }

  // Post-beamsplitter protocol state for the given bit, factored as
  // (path-a occupation sector) x (path-b occupation sector).
  // Basis order per side: {vacuum, H-occupied, V-occupied}.
  static BipartiteState protocol_state(int bit, double reflectivity);
};

// Text form accepted from the CLI: one entry per line,
// "a_index b_index real imag", zero-based indices, '#' comments allowed.
BipartiteState parse_state(std::istream& in);

struct SchmidtForm {
  Eigen::VectorXd coefficients;   // nonnegative, descending
  Eigen::MatrixXcd basis_a;       // orthonormal columns
  Eigen::MatrixXcd basis_b;
};

SchmidtForm schmidt_decompose(const BipartiteState& psi);

Eigen::MatrixXcd reduced_density(const BipartiteState& psi, Subsystem subsystem);

void validate_density(const Eigen::MatrixXcd& rho);

// Tr[rho0 rho1]; the security criterion's figure of merit.
double overlap(const Eigen::MatrixXcd& rho0, const Eigen::MatrixXcd& rho1);

// Verdict true means the B-reduced densities are orthogonal, i.e. the two
// states could be told apart through subsystem B without any disturbance.
std::pair<bool, double> distinguishable_without_disturbance(
    const BipartiteState& psi0, const BipartiteState& psi1);

}  // namespace nocloning
}  // namespace cfqkd

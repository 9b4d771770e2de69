#include "cfqkd/nocloning.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <complex>
#include <sstream>
#include <string>
#include <vector>

namespace cfqkd {
namespace nocloning {

BipartiteState BipartiteState::protocol_state(int bit, double reflectivity) {
  if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
    throw ConfigError("reflectivity must lie in [0,1]");
  }
  if (bit != 0 && bit != 1) throw ConfigError("bit must be 0 or 1");
  const double t = 1.0 - reflectivity;
  const int occ = 1 + bit;  // H occupies index 1, V index 2
  BipartiteState psi;
  psi.amp = Eigen::MatrixXcd::Zero(3, 3);
  psi.amp(0, occ) = std::sqrt(t);                                 // photon in b
  psi.amp(occ, 0) = std::complex<double>(0.0, std::sqrt(reflectivity));  // in a
  return psi;
}

BipartiteState parse_state(std::istream& in) {
  struct Entry {
    int a, b;
    std::complex<double> v;
  };
  std::vector<Entry> entries;
  int max_a = 0, max_b = 0;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    int a, b;
    double re, im;
    if (!(ls >> a)) continue;  // blank line
    if (!(ls >> b >> re >> im) || a < 0 || b < 0) {
      throw ConfigError("malformed state entry on line " + std::to_string(lineno));
    }
    entries.push_back({a, b, {re, im}});
    max_a = std::max(max_a, a);
    max_b = std::max(max_b, b);
  }
  if (entries.empty()) throw ConfigError("state file contains no entries");
  BipartiteState psi;
  psi.amp = Eigen::MatrixXcd::Zero(max_a + 1, max_b + 1);
  for (const auto& e : entries) psi.amp(e.a, e.b) += e.v;
  psi.validate();
  return psi;
}

SchmidtForm schmidt_decompose(const BipartiteState& psi) {
  psi.validate();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(
      psi.amp, Eigen::ComputeThinU | Eigen::ComputeThinV);

  // psi = U S V^dagger, so the B-side Schmidt vectors are conj(V) columns.
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-12) rank = i + 1;
  }
  if (rank == 0) throw ValidationError("zero state has no Schmidt form");

  SchmidtForm form;
  form.coefficients = sv.head(rank);
  form.basis_a = svd.matrixU().leftCols(rank);
  form.basis_b = svd.matrixV().leftCols(rank).conjugate();
  return form;
}

Eigen::MatrixXcd reduced_density(const BipartiteState& psi, Subsystem subsystem) {
  psi.validate();
  if (subsystem == Subsystem::A) {
    return psi.amp * psi.amp.adjoint();
  }
  // rho_B(j,j') = sum_i psi(i,j) conj(psi(i,j'))
  return psi.amp.transpose() * psi.amp.conjugate();
}

void validate_density(const Eigen::MatrixXcd& rho) {
  if (rho.rows() != rho.cols()) throw ValidationError("density matrix must be square");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
    throw ValidationError("density matrix is not Hermitian");
  }
  if (std::abs(rho.trace().real() - 1.0) > 1e-10 || std::abs(rho.trace().imag()) > 1e-10) {
    throw ValidationError("density matrix trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(rho);
  if (es.eigenvalues().minCoeff() < -1e-10) {
    throw ValidationError("density matrix has a negative eigenvalue");
  }
}

double overlap(const Eigen::MatrixXcd& rho0, const Eigen::MatrixXcd& rho1) {
  if (rho0.rows() != rho1.rows() || rho0.cols() != rho1.cols()) {
    throw ValidationError("density matrix dimensions differ");
  }
  return (rho0 * rho1).trace().real();
}

std::pair<bool, double> distinguishable_without_disturbance(
    const BipartiteState& psi0, const BipartiteState& psi1) {
  const auto rho0 = reduced_density(psi0, Subsystem::B);
  const auto rho1 = reduced_density(psi1, Subsystem::B);
  const double ov = overlap(rho0, rho1);
  return {ov <= 1e-12, ov};
}

}  // namespace nocloning
}  // namespace cfqkd

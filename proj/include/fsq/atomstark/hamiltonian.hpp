#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <vector>

#include "fsq/atomstark/angular_momentum.hpp"
#include "fsq/atomstark/polarizability.hpp"
#include "fsq/core/constants.hpp"
#include "fsq/core/errors.hpp"

namespace fsq::atomstark {

/// Magnetic field: magnitude and azimuth phi between the tweezer polarization
/// axis and the field, measured in the plane transverse to propagation.
struct MagneticField {
  double magnitude_G = 0.0;
  double phi_deg = 0.0;

  /// phi wrapped to [0, 180); the tensor shift only sees the field axis.
  MagneticField normalized() const {
    double p = std::fmod(phi_deg, 180.0);
    if (p < 0) p += 180.0;
    return {magnitude_G, p};
  }
};

/// Local complex polarization unit vector and E0^2 = |E|^2 / 4, where E is
/// the complex field amplitude. With this convention U = -alpha E0^2.
struct PolarizationVector {
  Eigen::Vector3cd eps = Eigen::Vector3cd(0, 1, 0);
  double e0sq = 0.0;  // (V/m)^2

  static PolarizationVector make(const Eigen::Vector3cd& eps, double e0sq) {
    if (std::abs(eps.norm() - 1.0) > 1e-12)
      throw NonUnitPolarization("polarization vector norm " + std::to_string(eps.norm()));
    if (!(e0sq >= 0.0)) throw InvalidArgument("E0^2 must be non-negative");
    return {eps, e0sq};
  }

  /// From a complex field amplitude in V/m. A zero field gets the default
  /// direction and zero intensity.
  static PolarizationVector from_field(const Eigen::Vector3cd& field) {
    const double n = field.norm();
    if (n == 0.0) return {Eigen::Vector3cd(0, 1, 0), 0.0};
    return {field / n, 0.25 * n * n};
  }
};

namespace detail {

inline double to_hz(double joule) { return joule / constants::h; }

inline void check_hermitian(const Eigen::MatrixXcd& m, const char* what) {
  const double scale = std::max(m.norm(), 1e-300);
  if ((m - m.adjoint()).norm() > 1e-12 * scale)
    throw NumericalError(std::string(what) + " is not Hermitian");
}

}  // namespace detail

/// Light-shift Hamiltonian in the |J, m> basis (quantization axis = frame z),
/// in frequency units E/h [Hz]:
///   H = -E0^2 [ a_s + 3 a_t / (J(2J-1)) ( {e.J, e*.J}/2 - J(J+1)/3 ) ].
/// The tensor part is identically zero for J < 1.
inline Eigen::MatrixXcd stark_hamiltonian(const Polarizability& alpha, AngularMomentum j,
                                          const PolarizationVector& pol) {
  if (std::abs(pol.eps.norm() - 1.0) > 1e-12)
    throw NonUnitPolarization("polarization vector must be unit norm");
  const int d = j.dim();
  const double to_hz = constants::polarizability_au * pol.e0sq / constants::h;
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Identity(d, d) * (-alpha.scalar_au * to_hz);
  if (j.twice_j >= 2 && alpha.tensor_au != 0.0) {
    const double jv = j.value();
    const auto s = spin_matrices(j);
    const Eigen::MatrixXcd ej = pol.eps(0) * s.x + pol.eps(1) * s.y + pol.eps(2) * s.z;
    const Eigen::MatrixXcd ecj =
        std::conj(pol.eps(0)) * s.x + std::conj(pol.eps(1)) * s.y + std::conj(pol.eps(2)) * s.z;
    Eigen::MatrixXcd op = 0.5 * (ej * ecj + ecj * ej);
    op -= Eigen::MatrixXcd::Identity(d, d) * (jv * (jv + 1.0) / 3.0);
    h -= op * (3.0 * alpha.tensor_au / (jv * (2.0 * jv - 1.0)) * to_hz);
  }
  detail::check_hermitian(h, "Stark Hamiltonian");
  return h;
}

/// Zeeman Hamiltonian mu_B g_J B n.J / h for a field of the given magnitude
/// along unit direction n (expressed in the quantization frame).
inline Eigen::MatrixXcd zeeman_hamiltonian(const Eigen::Vector3d& direction, double magnitude_G,
                                           double g_j, AngularMomentum j) {
  const int d = j.dim();
  if (magnitude_G == 0.0 || j.twice_j == 0) return Eigen::MatrixXcd::Zero(d, d);
  const Eigen::Vector3d n = direction.normalized();
  const auto s = spin_matrices(j);
  const double scale = constants::mu_B * g_j * magnitude_G * constants::gauss / constants::h;
  return scale * (n(0) * s.x + n(1) * s.y + n(2) * s.z);
}

/// Zeeman Hamiltonian with the quantization axis along the field. The azimuth
/// phi enters only through the polarization vector in this frame.
inline Eigen::MatrixXcd zeeman_hamiltonian(const MagneticField& field, double g_j,
                                           AngularMomentum j) {
  return zeeman_hamiltonian(Eigen::Vector3d::UnitZ(), field.magnitude_G, g_j, j);
}

/// Eigen-energies of a J manifold labeled adiabatically by m_J.
struct LevelShifts {
  Eigen::VectorXd energies_Hz;      // ordered by label, m = -J .. +J
  std::vector<double> labels;       // m_J of each energy
  Eigen::MatrixXcd eigenvectors;    // column k belongs to energies_Hz(k)

  double energy(double m) const {
    for (std::size_t k = 0; k < labels.size(); ++k)
      if (labels[k] == m) return energies_Hz(static_cast<Eigen::Index>(k));
    throw InvalidArgument("no level with m_J = " + std::to_string(m));
  }
};

/// Diagonalizes stark + zeeman and assigns each eigenvector the m_J of the
/// Zeeman eigenvector it overlaps most. Zeeman eigenvectors are labeled in
/// ascending energy order (m = -J first, i.e. g_J > 0). A vanishing Zeeman
/// matrix falls back to the |J, m> basis as reference.
inline LevelShifts level_shifts(const Eigen::MatrixXcd& stark, const Eigen::MatrixXcd& zeeman) {
  if (stark.rows() != stark.cols() || zeeman.rows() != zeeman.cols() ||
      stark.rows() != zeeman.rows())
    throw InvalidArgument("Stark and Zeeman matrices must be square and of equal size");
  detail::check_hermitian(stark, "Stark matrix");
  detail::check_hermitian(zeeman, "Zeeman matrix");
  const Eigen::Index d = stark.rows();
  const double twice_j = static_cast<double>(d - 1);

  Eigen::MatrixXcd reference = Eigen::MatrixXcd::Identity(d, d);
  if (zeeman.norm() > 0.0) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> zs(zeeman);
    reference = zs.eigenvectors();  // ascending eigenvalues
  }

  const Eigen::MatrixXcd total = stark + zeeman;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(total);
  if (solver.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd& values = solver.eigenvalues();
  const Eigen::MatrixXcd& vectors = solver.eigenvectors();

  const double trace = total.trace().real();
  const double scale = std::max({std::abs(trace), total.norm(), 1e-300});
  if (std::abs(values.sum() - trace) > 1e-10 * scale)
    throw NumericalError("eigenvalue sum does not reproduce the trace");

  const Eigen::MatrixXd overlap = (reference.adjoint() * vectors).cwiseAbs2();
  std::vector<Eigen::Index> label_of(static_cast<std::size_t>(d));
  std::vector<bool> used(static_cast<std::size_t>(d), false);
  for (Eigen::Index k = 0; k < d; ++k) {
    Eigen::Index best = 0;
    const double best_overlap = overlap.col(k).maxCoeff(&best);
    if (best_overlap < 0.5 || used[static_cast<std::size_t>(best)])
      throw DegenerateLabeling("ambiguous adiabatic m_J assignment (overlap " +
                               std::to_string(best_overlap) + ")");
    used[static_cast<std::size_t>(best)] = true;
    label_of[static_cast<std::size_t>(k)] = best;
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) {
    const auto la = label_of[static_cast<std::size_t>(a)];
    const auto lb = label_of[static_cast<std::size_t>(b)];
    return la != lb ? la < lb : values(a) < values(b);
  });

  LevelShifts out;
  out.energies_Hz.resize(d);
  out.eigenvectors.resize(d, d);
  for (Eigen::Index k = 0; k < d; ++k) {
    const Eigen::Index src = order[static_cast<std::size_t>(k)];
    out.energies_Hz(k) = values(src);
    out.eigenvectors.col(k) = vectors.col(src);
    out.labels.push_back(-0.5 * twice_j + static_cast<double>(label_of[static_cast<std::size_t>(src)]));
  }
  return out;
}

}  // namespace fsq::atomstark

#pragma once

// Heisenberg + Zeeman Hamiltonians on small coupling graphs, their S_z-sector
// restrictions, and closed-form sector matrices for the four-dot and
// three-dot encodings.
//
// Conventions: spins are 0-based internally and 1-based in every printed
// label ("J_26"). Spin operators are Pauli matrices, so a single bond
// contributes (J/4) σ_i·σ_j: singlet energy -3J/4, triplet +J/4. The Zeeman
// term is -Σ h_i σ^z_i. A product state is a bitmask where bit (n-1-i) is set
// when spin i points down, so masks sort like Kronecker products with spin 1
// most significant.

#include <compare>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "sage/types.hpp"

namespace sage {

inline constexpr int kMaxSpins = 12;

enum class Encoding {
  kSageT,           // T-shaped four-dot singlet-only qubit
  kTriageTriangle,  // three dots, all-to-all
  kEoLinear,        // three dots, conventional exchange-only
  kSagePair8Dot,    // two SAGE_T blocks plus one interqubit bond
  kBox4Dot,         // four dots, all six bonds
  kCustom,          // ad-hoc graphs (chains, scans)
};

std::string_view to_string(Encoding e);
Encoding encoding_from_string(std::string_view name);

struct Bond {
  int a = 0;  // 0-based, a < b
  int b = 0;

  auto operator<=>(const Bond&) const = default;

  /// Two-digit 1-based label, e.g. {1,5} -> "26".
  std::string label() const;
  /// Parses "26", "2-6" or "J26".
  static Bond parse(std::string_view text);
};

Bond make_bond(int spin_a, int spin_b);  // 0-based, any order

class DeviceGeometry {
 public:
  DeviceGeometry(int n_spins, std::vector<Bond> bonds, Encoding encoding);

  static DeviceGeometry sage_t();
  static DeviceGeometry triage_triangle();
  static DeviceGeometry eo_linear();
  static DeviceGeometry box_4dot();
  /// Spins 0-3 and 4-7 each form a SAGE_T (cores 0 and 4) plus `interqubit`.
  static DeviceGeometry sage_pair_8dot(Bond interqubit = Bond{1, 5});
  static DeviceGeometry chain(int n_spins);
  static DeviceGeometry for_encoding(Encoding e);

  int n_spins() const { return n_spins_; }
  const std::vector<Bond>& bonds() const { return bonds_; }
  Encoding encoding() const { return encoding_; }
  bool has_bond(Bond b) const;

  /// Number of down spins in the working sector (S_z = 0 or 1/2).
  int sector_n_down() const { return n_spins_ / 2; }
  /// 2 for single-qubit encodings, 4 for the two-qubit device.
  int computational_dim() const;
  std::string computational_labels() const;

  /// For SAGE_PAIR_8DOT: the single bond joining the two blocks.
  Bond interqubit_bond() const;

 private:
  int n_spins_;
  std::vector<Bond> bonds_;
  Encoding encoding_;
};

/// Exchange strengths per bond and Zeeman offsets per site, both in MHz.
class CouplingSet {
 public:
  explicit CouplingSet(DeviceGeometry geometry);

  /// All bonds at `j_mhz`, no fields.
  static CouplingSet uniform(const DeviceGeometry& geometry, double j_mhz);

  const DeviceGeometry& geometry() const { return geometry_; }

  void set_exchange(Bond b, double j_mhz);
  /// Bonds absent from the geometry read as zero.
  double exchange(Bond b) const;
  double exchange(int spin_a, int spin_b) const { return exchange(make_bond(spin_a, spin_b)); }
  const std::map<Bond, double>& exchanges() const { return j_; }

  void set_field(int site, double h_mhz);
  double field(int site) const;
  const std::vector<double>& fields() const { return h_; }

  double max_coupling() const;

  bool operator==(const CouplingSet& other) const { return j_ == other.j_ && h_ == other.h_; }

 private:
  DeviceGeometry geometry_;
  std::map<Bond, double> j_;
  std::vector<double> h_;
};

/// Dense complex Hermitian matrix in frequency units.
class HermitianOperator {
 public:
  HermitianOperator() = default;
  /// Throws InvalidInput unless `m` is square and Hermitian to 1e-12 relative.
  explicit HermitianOperator(CMatrix m);

  const CMatrix& matrix() const { return m_; }
  Eigen::Index dim() const { return m_.rows(); }
  bool is_real() const;

 private:
  CMatrix m_;
};

class SectorBasis {
 public:
  SectorBasis(int n_spins, int n_down);
  static SectorBasis for_geometry(const DeviceGeometry& g);

  int n_spins() const { return n_spins_; }
  int n_down() const { return n_down_; }
  /// 2·S_z
  int twice_sz() const { return n_spins_ - 2 * n_down_; }
  Eigen::Index size() const { return static_cast<Eigen::Index>(states_.size()); }
  const std::vector<std::uint32_t>& states() const { return states_; }
  /// -1 when `mask` lies outside the sector.
  int index_of(std::uint32_t mask) const;

  /// Index of a product state written as a string of 'u'/'d', spin 1 first.
  int index_of(std::string_view spins) const;

 private:
  int n_spins_;
  int n_down_;
  std::vector<std::uint32_t> states_;
  std::vector<int> index_;  // size 2^n
};

/// Full 2^n Hamiltonian.
HermitianOperator build_heisenberg(const DeviceGeometry& geometry, const CouplingSet& couplings);

/// Same Hamiltonian assembled directly inside `basis`; real symmetric.
RMatrix build_sector_hamiltonian(const SectorBasis& basis, const CouplingSet& couplings);

/// Block of `h` (2^n dimensional) inside `basis`. Rejects operators that do
/// not commute with total S^z to 1e-10 (relative to the largest entry).
HermitianOperator project_to_sector(const HermitianOperator& h, const SectorBasis& basis);

/// Columns |0>, |1>, |T1>, |T2>, |T3>, |Q> in the 4-spin S_z=0 product basis.
RMatrix labeled_eigenbasis_4dot();
/// Columns |0>, |1>, |L> in the 3-spin S_z=1/2 product basis.
RMatrix labeled_eigenbasis_3dot();
/// Labeled basis for a single-qubit geometry (4 or 3 spins).
RMatrix labeled_eigenbasis(const DeviceGeometry& geometry);

/// Sector-basis columns spanning the computational subspace: 6x2 / 3x2 for
/// single-qubit encodings, 70x4 (|00>,|01>,|10>,|11>) for the 8-dot pair.
RMatrix computational_columns(const DeviceGeometry& geometry);

HermitianOperator reference_matrix_4dot(const CouplingSet& couplings);
/// Equal to the brute-force sector block up to a multiple of the identity.
HermitianOperator reference_matrix_3dot(const CouplingSet& couplings);

/// 2x2 Hermitian operator as real coefficients on {1, σx, σy, σz}.
struct PauliCoefficients {
  double identity = 0.0;
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  Eigen::Matrix2cd matrix() const;
  double norm() const;  // |(x, y, z)|
  static PauliCoefficients from_matrix(const Eigen::Matrix2cd& m);
};

/// Encoded SAGE qubit Hamiltonian for T-shape couplings (MHz), traceless.
PauliCoefficients sage_qubit_hamiltonian(double j12, double j13, double j14);

struct SpectralReport {
  double qubit_splitting = 0.0;
  double min_gap_to_leakage = 0.0;
  bool leakage_hotspot = false;
  std::vector<double> energies;            // ascending
  std::vector<int> computational_indices;  // into `energies`
};

/// `h_labeled` is expressed in a basis whose first `computational_dim` vectors
/// span the qubit subspace. Computational eigenstates are picked by overlap
/// with that subspace, never by energy order. The hotspot flag is raised
/// when the gap falls below 1e-6 * `coupling_scale`.
SpectralReport spectral_report(const HermitianOperator& h_labeled, int computational_dim,
                               double coupling_scale);
/// Convenience for 3- and 4-spin devices.
SpectralReport spectral_report(const CouplingSet& couplings);

}  // namespace sage

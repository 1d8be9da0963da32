#pragma once

// Square-pulse gate compilation for the always-on gapless encodings (SAGE_T,
// TRIAGE_TRIANGLE) and for conventional linear exchange-only qubits.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "sage/clifford.hpp"
#include "sage/dynamics.hpp"

namespace sage {

enum class Primitive { kI, kX, kZ, kS, kSdg, kSqrtX, kSqrtXdg, kH, kHp };

inline constexpr Primitive kAllPrimitives[] = {Primitive::kI,    Primitive::kX,     Primitive::kZ,
                                               Primitive::kS,    Primitive::kSdg,   Primitive::kSqrtX,
                                               Primitive::kSqrtXdg, Primitive::kH,  Primitive::kHp};

std::string_view to_string(Primitive p);
/// Accepts "X", "S†"/"Sdg", "√X"/"SqrtX", "H'"/"Hp", ...
Primitive primitive_from_string(std::string_view name);

/// Rotation implemented by the primitive.
Eigen::Matrix2cd primitive_target(Primitive p);

struct PrimitiveRow {
  double ja, jb, jc;  // units of J_0
  double phi;         // rotation angle / 2π
};
PrimitiveRow primitive_row(Primitive p);

/// Bond carrying J_a, J_b, J_c for a gapless encoding.
std::array<Bond, 3> age_bonds(Encoding encoding);

/// One segment; duration 2φ/J_0.
PulseSegment primitive_pulse(Primitive p, double j0_mhz, Encoding encoding);

/// Segment rotating by `angle` (radians, sign = sense) about (axis_x, 0,
/// axis_z), couplings averaging J_0 and |H_q| = J_0/4. Throws InvalidInput
/// when a coupling would go negative.
PulseSegment opposite_rotation_pulse(double axis_x, double axis_z, double angle, double j0_mhz,
                                     Encoding encoding = Encoding::kSageT);

/// Qubit-block unitary C^T U C of a schedule (2x2 or 4x4).
CMatrix encoded_unitary(const PulseSchedule& schedule, const NoiseRealization* noise = nullptr);

class CompilationError : public Error {
 public:
  using Error::Error;
};

struct CompiledClifford {
  PulseSchedule schedule;
  std::vector<std::string> gates;  // primitive names, application order
  double residual = 0.0;           // phase distance to the target
};

/// AGE encodings use at most two primitives; EO_LINEAR uses a numerically
/// found alternating J_12/J_23 sequence of at most four pulses.
CompiledClifford compile_clifford(int index, Encoding encoding, double j0_mhz);

/// All 24, cached per (encoding, J_0).
const std::vector<CompiledClifford>& clifford_schedules(Encoding encoding, double j0_mhz);

}  // namespace sage

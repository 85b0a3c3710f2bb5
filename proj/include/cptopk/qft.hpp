// SPDX-License-Identifier: Apache-2.0

#ifndef CPTOPK_QFT_HPP
#define CPTOPK_QFT_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cptopk/cp_tensor.hpp"
#include "cptopk/solver.hpp"

namespace cptopk {

/// d = p*q qubits grouped into p modes of dimension 2^q. Qubits are 0-based;
/// qubit a lives in mode a / q at position a % q, and positions are big-endian
/// inside a mode (position 0 is the most significant bit of the local index).
struct QubitLayout {
  std::size_t qubits = 0;
  std::size_t modes = 0;
  std::size_t per_mode = 0;

  /// Throws InvalidArgumentError unless p, q >= 1 and 2^q fits comfortably in memory.
  static QubitLayout make(std::size_t p, std::size_t q);

  std::size_t mode_of(std::size_t qubit) const noexcept { return qubit / per_mode; }
  std::size_t position_of(std::size_t qubit) const noexcept { return qubit % per_mode; }
  std::size_t mode_dim() const noexcept { return std::size_t{1} << per_mode; }
  /// Value of the qubit's bit in the local index of its mode.
  std::size_t bit_weight(std::size_t qubit) const noexcept {
    return std::size_t{1} << (per_mode - 1 - position_of(qubit));
  }
  /// Big-endian basis-state number of a full index tuple.
  std::uint64_t basis_state(const IndexTuple& idx) const;
};

struct GateOp {
  enum class Kind { Hadamard, ControlledPhase, Swap };
  Kind kind = Kind::Hadamard;
  std::size_t first = 0;   ///< H: qubit; CP: control; Swap: one qubit
  std::size_t second = 0;  ///< CP: target; Swap: other qubit
  double angle = 0.0;      ///< CP only

  static GateOp hadamard(std::size_t qubit) { return {Kind::Hadamard, qubit, qubit, 0.0}; }
  static GateOp controlled_phase(std::size_t control, std::size_t target, double angle) {
    return {Kind::ControlledPhase, control, target, angle};
  }
  static GateOp swap(std::size_t a, std::size_t b) { return {Kind::Swap, a, b, 0.0}; }

  friend bool operator==(const GateOp&, const GateOp&) = default;
};

/// "H(1)", "CP(2,1,1.5707963267948966)", "SWAP(1,2)" with 1-based qubits.
std::string to_string(const GateOp& g);

/// Textbook QFT: for each qubit a, H(a) then CP(control b, target a, 2*pi/2^(b-a+1))
/// for b > a; finally the qubit-reversal swaps.
std::vector<GateOp> qft_circuit(std::size_t d);

/// Applies one gate to a CP state.
///  - H, and two-qubit gates inside one mode: a single TTM on that mode.
///  - Cross-mode CP: P0(target) + P1(target) * phase(control), rank <= 2R.
///    The projectors sit on the target qubit (the gate is symmetric), so a run
///    of phases sharing a target cancels P0*P1 terms and stays at rank 2R.
///  - Cross-mode swap: sum of four rank-R terms |v><u|_a (x) |u><v|_b.
/// Terms with an identically zero factor are dropped.
CpTensor<Complex> apply_gate(const CpTensor<Complex>& state, const GateOp& g, const QubitLayout& layout);

/// Random rank-one state, real and imaginary parts of every factor entry from
/// U(0, 1), scaled to unit Frobenius norm.
CpTensor<Complex> qft_initial_state(const QubitLayout& layout, std::uint64_t seed);

/// Recompression cap used when none is given: none up to 16 qubits, 64 beyond.
std::optional<std::size_t> default_rank_cap(std::size_t qubits);

struct CircuitStats {
  std::size_t peak_rank = 0;
  std::size_t recompressions = 0;
};

/// Applies `gates` in order. A trailing run of swaps that moves whole modes
/// onto whole modes is applied as a relabeling of factor rows and modes (no
/// rank growth). With rank_cap set, the state is recompressed after any gate
/// that pushes its rank past the cap.
CpTensor<Complex> run_circuit(const CpTensor<Complex>& state, const std::vector<GateOp>& gates,
                              const QubitLayout& layout, std::optional<std::size_t> rank_cap = std::nullopt,
                              const RecompressOptions& recompress_opts = {}, CircuitStats* stats = nullptr);

struct QftConfig {
  std::size_t modes = 2;     ///< p
  std::size_t per_mode = 2;  ///< q
  std::uint64_t init_seed = 0;
  SolverConfig solver{.key = OrderingKey::MaxAbs};  ///< Max and Min are rejected for complex states
  std::optional<std::size_t> rank_cap;  ///< Unset: default_rank_cap(p*q)
  bool exact = false;                   ///< Disable recompression regardless of rank_cap
  RecompressOptions recompress{};
};

struct QftOutcome {
  CpTensor<Complex> state;
  TopKResult<Complex> measurement;
  std::vector<double> magnitudes;  ///< |amplitude| per measured index
  CircuitStats stats;
};

/// Random initial state -> QFT -> top-k amplitudes through the block solver.
QftOutcome simulate_and_measure(const QftConfig& cfg);

}  // namespace cptopk

#endif

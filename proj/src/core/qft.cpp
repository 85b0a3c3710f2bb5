// SPDX-License-Identifier: Apache-2.0

#include "cptopk/qft.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "cptopk/rng.hpp"

namespace cptopk {

namespace {

void check_state(const CpTensor<Complex>& state, const QubitLayout& layout) {
  if (state.order() != layout.modes) throw ShapeError("state order does not match the qubit layout");
  for (std::size_t n : state.dims())
    if (n != layout.mode_dim()) throw ShapeError("state mode dimension is not 2^q");
}

void check_qubit(std::size_t qubit, const QubitLayout& layout) {
  if (qubit >= layout.qubits)
    throw BoundsError("qubit " + std::to_string(qubit + 1) + " outside a " + std::to_string(layout.qubits) +
                      "-qubit register");
}

// Single-qubit operator lifted to the 2^q x 2^q matrix of the qubit's mode.
Matrix<Complex> lift(const Matrix<Complex>& op, std::size_t qubit, const QubitLayout& layout) {
  const auto n = static_cast<Eigen::Index>(layout.mode_dim());
  const std::size_t w = layout.bit_weight(qubit);
  Matrix<Complex> m = Matrix<Complex>::Zero(n, n);
  for (std::size_t col = 0; col < layout.mode_dim(); ++col) {
    const std::size_t bit = (col & w) ? 1 : 0;
    const std::size_t base = col & ~w;
    for (std::size_t out_bit = 0; out_bit < 2; ++out_bit) {
      const std::size_t row = base | (out_bit ? w : 0);
      m(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col)) =
          op(static_cast<Eigen::Index>(out_bit), static_cast<Eigen::Index>(bit));
    }
  }
  return m;
}

Matrix<Complex> ket_bra(std::size_t out, std::size_t in) {
  Matrix<Complex> m = Matrix<Complex>::Zero(2, 2);
  m(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(in)) = 1.0;
  return m;
}

Matrix<Complex> diag_phase(std::size_t qubit, double angle, const QubitLayout& layout) {
  Matrix<Complex> op = Matrix<Complex>::Identity(2, 2);
  op(1, 1) = std::polar(1.0, angle);
  return lift(op, qubit, layout);
}

}  // namespace

QubitLayout QubitLayout::make(std::size_t p, std::size_t q) {
  if (p < 1 || q < 1) throw InvalidArgumentError("qubit layout needs p >= 1 and q >= 1");
  if (q > 20) throw InvalidArgumentError("more than 20 qubits per mode is not supported");
  return {p * q, p, q};
}

std::uint64_t QubitLayout::basis_state(const IndexTuple& idx) const {
  std::uint64_t v = 0;
  for (std::size_t mu = 0; mu < modes; ++mu) v = (v << per_mode) | idx.at(mu);
  return v;
}

std::string to_string(const GateOp& g) {
  std::ostringstream os;
  os.precision(17);
  switch (g.kind) {
    case GateOp::Kind::Hadamard: os << "H(" << g.first + 1 << ")"; break;
    case GateOp::Kind::ControlledPhase: os << "CP(" << g.first + 1 << "," << g.second + 1 << "," << g.angle << ")"; break;
    case GateOp::Kind::Swap: os << "SWAP(" << g.first + 1 << "," << g.second + 1 << ")"; break;
  }
  return os.str();
}

std::vector<GateOp> qft_circuit(std::size_t d) {
  if (d < 1) throw InvalidArgumentError("QFT needs at least one qubit");
  std::vector<GateOp> gates;
  for (std::size_t a = 0; a < d; ++a) {
    gates.push_back(GateOp::hadamard(a));
    for (std::size_t b = a + 1; b < d; ++b)
      gates.push_back(GateOp::controlled_phase(b, a, 2.0 * std::numbers::pi / std::ldexp(1.0, static_cast<int>(b - a + 1))));
  }
  for (std::size_t a = 0; a < d / 2; ++a) gates.push_back(GateOp::swap(a, d - 1 - a));
  return gates;
}

CpTensor<Complex> apply_gate(const CpTensor<Complex>& state, const GateOp& g, const QubitLayout& layout) {
  check_state(state, layout);
  check_qubit(g.first, layout);
  check_qubit(g.second, layout);

  switch (g.kind) {
    case GateOp::Kind::Hadamard: {
      Matrix<Complex> h(2, 2);
      const double s = 1.0 / std::numbers::sqrt2;
      h << s, s, s, -s;
      return ttm(state, lift(h, g.first, layout), layout.mode_of(g.first));
    }
    case GateOp::Kind::ControlledPhase: {
      if (g.first == g.second) throw InvalidArgumentError("controlled phase needs two distinct qubits");
      const std::size_t control = g.first;
      const std::size_t target = g.second;
      const std::size_t mu = layout.mode_of(target);
      const std::size_t nu = layout.mode_of(control);
      if (mu == nu) {
        const auto n = static_cast<Eigen::Index>(layout.mode_dim());
        Matrix<Complex> d = Matrix<Complex>::Identity(n, n);
        const std::size_t both = layout.bit_weight(control) | layout.bit_weight(target);
        for (std::size_t m = 0; m < layout.mode_dim(); ++m)
          if ((m & both) == both) d(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m)) = std::polar(1.0, g.angle);
        return ttm(state, d, mu);
      }
      const auto p0 = lift(ket_bra(0, 0), target, layout);
      const auto p1 = lift(ket_bra(1, 1), target, layout);
      const CpTensor<Complex> off = ttm(state, p0, mu);
      const CpTensor<Complex> on = ttm(ttm(state, p1, mu), diag_phase(control, g.angle, layout), nu);
      return drop_zero_columns(add(off, on));
    }
    case GateOp::Kind::Swap: {
      if (g.first == g.second) return state;
      const std::size_t mu = layout.mode_of(g.first);
      const std::size_t nu = layout.mode_of(g.second);
      if (mu == nu) {
        const auto n = static_cast<Eigen::Index>(layout.mode_dim());
        const std::size_t wa = layout.bit_weight(g.first);
        const std::size_t wb = layout.bit_weight(g.second);
        Matrix<Complex> perm = Matrix<Complex>::Zero(n, n);
        for (std::size_t m = 0; m < layout.mode_dim(); ++m) {
          std::size_t out = m & ~(wa | wb);
          if (m & wa) out |= wb;
          if (m & wb) out |= wa;
          perm(static_cast<Eigen::Index>(out), static_cast<Eigen::Index>(m)) = 1.0;
        }
        return ttm(state, perm, mu);
      }
      std::optional<CpTensor<Complex>> acc;
      for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) {
          CpTensor<Complex> term =
              ttm(ttm(state, lift(ket_bra(v, u), g.first, layout), mu), lift(ket_bra(u, v), g.second, layout), nu);
          acc = acc ? add(*acc, term) : term;
        }
      return drop_zero_columns(*acc);
    }
  }
  return state;
}

CpTensor<Complex> qft_initial_state(const QubitLayout& layout, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vector<Complex>> vectors;
  for (std::size_t mu = 0; mu < layout.modes; ++mu) {
    Vector<Complex> v(static_cast<Eigen::Index>(layout.mode_dim()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const double re = rng.uniform01();
      v(i) = Complex(re, rng.uniform01());
    }
    vectors.push_back(std::move(v));
  }
  CpTensor<Complex> state = rank_one(vectors);
  return scale(state, Complex(1.0 / frob_norm(state)));
}

std::optional<std::size_t> default_rank_cap(std::size_t qubits) {
  if (qubits <= 16) return std::nullopt;
  return 64;
}

namespace {

// src[a]: qubit of the pre-swap state whose bit final qubit a carries.
// Returns the relabeled state, or nothing when some mode would be split.
std::optional<CpTensor<Complex>> relabel(const CpTensor<Complex>& state, const std::vector<std::size_t>& src,
                                         const QubitLayout& layout) {
  std::vector<std::size_t> from_mode(layout.modes);
  for (std::size_t mu = 0; mu < layout.modes; ++mu) {
    from_mode[mu] = layout.mode_of(src[mu * layout.per_mode]);
    for (std::size_t t = 1; t < layout.per_mode; ++t)
      if (layout.mode_of(src[mu * layout.per_mode + t]) != from_mode[mu]) return std::nullopt;
  }
  std::vector<Matrix<Complex>> factors;
  for (std::size_t mu = 0; mu < layout.modes; ++mu) {
    const Matrix<Complex>& old = state.factor(from_mode[mu]);
    Matrix<Complex> f(old.rows(), old.cols());
    for (std::size_t m = 0; m < layout.mode_dim(); ++m) {
      std::size_t old_m = 0;
      for (std::size_t t = 0; t < layout.per_mode; ++t) {
        const std::size_t a = mu * layout.per_mode + t;
        if (m & layout.bit_weight(a)) old_m |= layout.bit_weight(src[a]);
      }
      f.row(static_cast<Eigen::Index>(m)) = old.row(static_cast<Eigen::Index>(old_m));
    }
    factors.push_back(std::move(f));
  }
  return CpTensor<Complex>(std::move(factors));
}

}  // namespace

CpTensor<Complex> run_circuit(const CpTensor<Complex>& state, const std::vector<GateOp>& gates,
                              const QubitLayout& layout, std::optional<std::size_t> rank_cap,
                              const RecompressOptions& recompress_opts, CircuitStats* stats) {
  check_state(state, layout);
  std::size_t tail = gates.size();
  while (tail > 0 && gates[tail - 1].kind == GateOp::Kind::Swap) --tail;

  CircuitStats local;
  CpTensor<Complex> cur = state;
  local.peak_rank = cur.rank();
  auto step = [&](const GateOp& g) {
    cur = apply_gate(cur, g, layout);
    local.peak_rank = std::max(local.peak_rank, cur.rank());
    if (rank_cap && cur.rank() > *rank_cap) {
      cur = recompress(cur, *rank_cap, recompress_opts);
      ++local.recompressions;
    }
  };
  for (std::size_t i = 0; i < tail; ++i) step(gates[i]);

  if (tail < gates.size()) {
    std::vector<std::size_t> src(layout.qubits);
    for (std::size_t a = 0; a < layout.qubits; ++a) src[a] = a;
    for (std::size_t i = tail; i < gates.size(); ++i) {
      check_qubit(gates[i].first, layout);
      check_qubit(gates[i].second, layout);
      std::swap(src[gates[i].first], src[gates[i].second]);
    }
    if (auto moved = relabel(cur, src, layout))
      cur = std::move(*moved);
    else
      for (std::size_t i = tail; i < gates.size(); ++i) step(gates[i]);
  }
  if (stats) *stats = local;
  return cur;
}

QftOutcome simulate_and_measure(const QftConfig& cfg) {
  const QubitLayout layout = QubitLayout::make(cfg.modes, cfg.per_mode);
  const std::optional<std::size_t> cap = cfg.exact ? std::nullopt : (cfg.rank_cap ? cfg.rank_cap : default_rank_cap(layout.qubits));
  CircuitStats stats;
  CpTensor<Complex> state = run_circuit(qft_initial_state(layout, cfg.init_seed), qft_circuit(layout.qubits), layout,
                                        cap, cfg.recompress, &stats);
  TopKResult<Complex> result = solve(state, cfg.solver);
  std::vector<double> magnitudes;
  for (const Complex& v : result.values) magnitudes.push_back(std::abs(v));
  return {std::move(state), std::move(result), std::move(magnitudes), stats};
}

}  // namespace cptopk

// SPDX-License-Identifier: Apache-2.0
#include "qrn/qsim/qsim.hpp"

#include <cmath>

#include "qrn/core/error.hpp"
#include "qrn/core/rng.hpp"
#include "qrn/kernels/kernels.hpp"

namespace qrn::qsim {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

/// Index bit position of a qubit: qubit 0 is the most significant bit.
inline std::size_t bit_mask(int n_qubits, int qubit) {
    return std::size_t{1} << (n_qubits - 1 - qubit);
}

void check_qubit(const Statevector& state, int q) {
    if (q < 0 || q >= state.n_qubits)
        throw IndexError("qubit index " + std::to_string(q) + " out of range for " +
                         std::to_string(state.n_qubits) + " qubits");
}

void check_gate(const Statevector& state, const Gate& g) {
    check_qubit(state, g.targets[0]);
    if (g.arity() == 2) {
        check_qubit(state, g.targets[1]);
        if (g.targets[0] == g.targets[1])
            throw IndexError("two-qubit gate targets must be distinct");
    }
    if (g.has_angle() && !std::isfinite(g.angle))
        throw ArgumentError("gate angle must be finite");
}

/// 2x2 matrix as the 8-double layout the 1q kernel consumes.
void matrix_1q(const Gate& g, double m[8]) {
    for (int i = 0; i < 8; ++i) m[i] = 0.0;
    switch (g.kind) {
        case GateKind::X:
            m[2] = 1.0;  // m01
            m[4] = 1.0;  // m10
            break;
        case GateKind::H:
            m[0] = kInvSqrt2;
            m[2] = kInvSqrt2;
            m[4] = kInvSqrt2;
            m[6] = -kInvSqrt2;
            break;
        case GateKind::RY: {
            const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
            m[0] = c;
            m[2] = -s;
            m[4] = s;
            m[6] = c;
            break;
        }
        case GateKind::RZ: {
            const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
            m[0] = c;
            m[1] = -s;  // e^{-i a/2}
            m[6] = c;
            m[7] = s;  // e^{+i a/2}
            break;
        }
        default: break;
    }
}

}  // namespace

double Statevector::norm() const {
    double s = 0.0;
    for (const auto& a : amps) s += std::norm(a);
    return std::sqrt(s);
}

const char* gate_name(GateKind k) {
    switch (k) {
        case GateKind::X: return "X";
        case GateKind::H: return "H";
        case GateKind::RY: return "RY";
        case GateKind::RZ: return "RZ";
        case GateKind::CNOT: return "CNOT";
        case GateKind::CPHASE: return "CPHASE";
        case GateKind::SWAP: return "SWAP";
    }
    return "?";
}

std::vector<std::complex<double>> Gate::matrix() const {
    using C = std::complex<double>;
    if (arity() == 1) {
        double m[8];
        matrix_1q(*this, m);
        return {C{m[0], m[1]}, C{m[2], m[3]}, C{m[4], m[5]}, C{m[6], m[7]}};
    }
    // Sub-basis index: targets[0] bit * 2 + targets[1] bit.
    std::vector<C> u(16, C{0.0, 0.0});
    switch (kind) {
        case GateKind::CNOT:
            u[0 * 4 + 0] = 1.0;
            u[1 * 4 + 1] = 1.0;
            u[2 * 4 + 3] = 1.0;
            u[3 * 4 + 2] = 1.0;
            break;
        case GateKind::CPHASE:
            u[0 * 4 + 0] = 1.0;
            u[1 * 4 + 1] = 1.0;
            u[2 * 4 + 2] = 1.0;
            u[3 * 4 + 3] = std::polar(1.0, angle);
            break;
        case GateKind::SWAP:
            u[0 * 4 + 0] = 1.0;
            u[1 * 4 + 2] = 1.0;
            u[2 * 4 + 1] = 1.0;
            u[3 * 4 + 3] = 1.0;
            break;
        default: break;
    }
    return u;
}

Statevector new_state(int n_qubits) {
    if (n_qubits < 1 || n_qubits > kMaxQubits)
        throw CapacityError("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                            "], got " + std::to_string(n_qubits));
    Statevector s;
    s.n_qubits = n_qubits;
    s.amps.assign(std::size_t{1} << n_qubits, {0.0, 0.0});
    s.amps[0] = {1.0, 0.0};
    return s;
}

void apply_gate_inplace(Statevector& state, const Gate& gate) {
    check_gate(state, gate);
    auto* raw = reinterpret_cast<double*>(state.amps.data());
    const std::size_t n = state.dim();
    if (gate.arity() == 1) {
        double m[8];
        matrix_1q(gate, m);
        kernels::apply_1q(raw, n, bit_mask(state.n_qubits, gate.targets[0]), m);
        return;
    }
    const std::size_t ma = bit_mask(state.n_qubits, gate.targets[0]);
    const std::size_t mb = bit_mask(state.n_qubits, gate.targets[1]);
    switch (gate.kind) {
        case GateKind::CNOT:
            // flip target where control bit is set
            for (std::size_t i = 0; i < n; ++i)
                if ((i & ma) && !(i & mb)) std::swap(state.amps[i], state.amps[i | mb]);
            break;
        case GateKind::SWAP:
            for (std::size_t i = 0; i < n; ++i)
                if ((i & ma) && !(i & mb)) std::swap(state.amps[i], state.amps[(i & ~ma) | mb]);
            break;
        case GateKind::CPHASE: {
            const std::complex<double> phase = std::polar(1.0, gate.angle);
            for (std::size_t i = 0; i < n; ++i)
                if ((i & ma) && (i & mb)) state.amps[i] *= phase;
            break;
        }
        default: break;
    }
}

Statevector apply_gate(const Statevector& state, const Gate& gate) {
    Statevector out = state;
    apply_gate_inplace(out, gate);
    return out;
}

void apply_circuit_inplace(Statevector& state, const Circuit& circuit) {
    if (circuit.n_qubits != state.n_qubits)
        throw ArgumentError("circuit width does not match state");
    for (const Gate& g : circuit.ops) apply_gate_inplace(state, g);
}

Statevector apply_circuit(const Statevector& state, const Circuit& circuit) {
    Statevector out = state;
    apply_circuit_inplace(out, circuit);
    return out;
}

Statevector encode_bits(const std::vector<int>& bits) {
    if (bits.empty()) throw ArgumentError("encode_bits: empty input");
    Statevector s = new_state(static_cast<int>(bits.size()));
    for (std::size_t q = 0; q < bits.size(); ++q) {
        if (bits[q] != 0 && bits[q] != 1)
            throw ArgumentError("encode_bits: values must be 0 or 1");
        if (bits[q] == 1) apply_gate_inplace(s, Gate::x(static_cast<int>(q)));
    }
    return s;
}

Statevector encode_angles(const std::vector<double>& values) {
    if (values.empty()) throw ArgumentError("encode_angles: empty input");
    for (double v : values)
        if (!(v >= 0.0 && v <= 1.0))
            throw ArgumentError("encode_angles: values must lie in [0, 1]");
    Statevector s = new_state(static_cast<int>(values.size()));
    for (std::size_t q = 0; q < values.size(); ++q)
        apply_gate_inplace(s, Gate::ry(static_cast<int>(q), M_PI * values[q]));
    return s;
}

Circuit qft_circuit(int n_qubits, int first, int count) {
    if (count < 1) throw ArgumentError("qft: empty qubit range");
    if (first < 0 || first + count > n_qubits)
        throw IndexError("qft: qubit range out of bounds");
    Circuit c;
    c.n_qubits = n_qubits;
    for (int i = 0; i < count; ++i) {
        c.push(Gate::h(first + i));
        for (int j = i + 1; j < count; ++j)
            c.push(Gate::cphase(first + j, first + i,
                                M_PI / static_cast<double>(std::size_t{1} << (j - i))));
    }
    for (int i = 0; i < count / 2; ++i)
        c.push(Gate::swap(first + i, first + count - 1 - i));
    return c;
}

Statevector qft(const Statevector& state, int first, int count) {
    return apply_circuit(state, qft_circuit(state.n_qubits, first, count));
}

std::vector<double> probabilities(const Statevector& state) {
    std::vector<double> p(state.dim());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(state.amps[i]);
    return p;
}

std::string sample_bits(const Statevector& state, std::uint64_t rng_seed) {
    const std::vector<double> p = probabilities(state);
    Rng rng(rng_seed);
    const double r = rng.uniform01();
    double cum = 0.0;
    std::size_t chosen = p.size() - 1;
    for (std::size_t i = 0; i < p.size(); ++i) {
        cum += p[i];
        if (r < cum) {
            chosen = i;
            break;
        }
    }
    std::string bits(state.n_qubits, '0');
    for (int q = 0; q < state.n_qubits; ++q)
        if (chosen & bit_mask(state.n_qubits, q)) bits[q] = '1';
    return bits;
}

double expectation_z(const Statevector& state, int qubit) {
    check_qubit(state, qubit);
    const std::size_t mask = bit_mask(state.n_qubits, qubit);
    double z = 0.0;
    for (std::size_t i = 0; i < state.dim(); ++i) {
        const double p = std::norm(state.amps[i]);
        z += (i & mask) ? -p : p;
    }
    return z;
}

}  // namespace qrn::qsim

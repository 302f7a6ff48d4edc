// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

namespace qrn::qsim {

/// Dense simulation cap. 2^14 complex doubles per state keeps the property
/// suites fast; the detection pipeline needs at most 8 qubits.
inline constexpr int kMaxQubits = 14;

/**
 * @brief Full complex amplitude vector of an n-qubit register.
 *
 * Bit convention, fixed globally: qubit 0 is the most significant bit of the
 * amplitude index. encode_bits({1,0}) therefore puts amplitude 1 at index 2.
 */
struct Statevector {
    int n_qubits = 0;
    std::vector<std::complex<double>> amps;

    std::size_t dim() const { return amps.size(); }
    double norm() const;
};

enum class GateKind { X, H, RY, RZ, CNOT, CPHASE, SWAP };

/**
 * @brief A gate instance: kind, rotation angle where applicable, targets.
 *
 * Two-qubit gates order targets as (control, target) for CNOT/CPHASE and
 * (a, b) for SWAP. matrix() returns the dense 2^k x 2^k realization with
 * targets[0] as the most significant bit of the sub-index.
 */
struct Gate {
    GateKind kind = GateKind::X;
    double angle = 0.0;
    std::array<int, 2> targets{0, 0};

    int arity() const {
        switch (kind) {
            case GateKind::CNOT:
            case GateKind::CPHASE:
            case GateKind::SWAP: return 2;
            default: return 1;
        }
    }
    bool has_angle() const {
        return kind == GateKind::RY || kind == GateKind::RZ || kind == GateKind::CPHASE;
    }

    std::vector<std::complex<double>> matrix() const;

    static Gate x(int q) { return {GateKind::X, 0.0, {q, 0}}; }
    static Gate h(int q) { return {GateKind::H, 0.0, {q, 0}}; }
    static Gate ry(int q, double angle) { return {GateKind::RY, angle, {q, 0}}; }
    static Gate rz(int q, double angle) { return {GateKind::RZ, angle, {q, 0}}; }
    static Gate cnot(int control, int target) { return {GateKind::CNOT, 0.0, {control, target}}; }
    static Gate cphase(int control, int target, double angle) {
        return {GateKind::CPHASE, angle, {control, target}};
    }
    static Gate swap(int a, int b) { return {GateKind::SWAP, 0.0, {a, b}}; }
};

const char* gate_name(GateKind k);

/// Ordered gate sequence over a fixed register width.
struct Circuit {
    int n_qubits = 0;
    std::vector<Gate> ops;

    void push(const Gate& g) { ops.push_back(g); }
};

/// |0...0> over n qubits. Throws CapacityError outside [1, kMaxQubits].
Statevector new_state(int n_qubits);

/// Unitary action of one gate; validates targets. Norm is preserved.
Statevector apply_gate(const Statevector& state, const Gate& gate);
void apply_gate_inplace(Statevector& state, const Gate& gate);

Statevector apply_circuit(const Statevector& state, const Circuit& circuit);
void apply_circuit_inplace(Statevector& state, const Circuit& circuit);

/// Basis encoding: X gates write the classical bits into |0...0>.
Statevector encode_bits(const std::vector<int>& bits);

/// Angle encoding: qubit i gets RY(pi * values[i]) from |0>. Values must lie
/// in [0, 1].
Statevector encode_angles(const std::vector<double>& values);

/// Gate realization of the quantum Fourier transform on qubits
/// [first, first + count), including the terminal bit-reversal swaps so the
/// matrix identity F[j][k] = exp(2*pi*i*j*k/N)/sqrt(N) holds exactly.
Circuit qft_circuit(int n_qubits, int first, int count);

Statevector qft(const Statevector& state, int first, int count);

/// Squared magnitudes; sums to 1 within 1e-10 for any unit state.
std::vector<double> probabilities(const Statevector& state);

/// One measurement of all qubits in the computational basis, drawn from
/// probabilities(state). Deterministic for a fixed seed. Returns the
/// bitstring in qubit order (qubit 0 first).
std::string sample_bits(const Statevector& state, std::uint64_t rng_seed);

/// P(qubit = 0) - P(qubit = 1).
double expectation_z(const Statevector& state, int qubit);

}  // namespace qrn::qsim

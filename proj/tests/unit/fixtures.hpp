#pragma once

#include "nkpa/circuit_model.hpp"
#include "nkpa/constants.hpp"

namespace fixtures {

inline constexpr double two_pi = nkpa::constants::two_pi;

/// Reference device: 179 pH/sq NbN, 23 x 140 nm bridge, 5 nm dead width,
/// 1.47 nH parasitic, resonance at 7.45 GHz, kappa_tot = 2pi x 58.9 MHz.
inline nkpa::DeviceSpec reference_device() {
    nkpa::DeviceSpec s;
    s.name = "reference";
    s.film = {179e-12, 4e-9, 5e-9, 2e-6 / (13e-9 * 4e-9)};
    s.geometry = {23e-9, 140e-9};
    const double l_total = 179e-12 * 140.0 / 13.0 + 1.47e-9;
    const double w0 = two_pi * 7.45e9;
    s.circuit = {1.0 / (w0 * w0 * l_total), 1.47e-9, two_pi * 57.0375e6, two_pi * 1.8625e6};
    return s;
}

inline nkpa::DerivedCircuit reference_circuit() { return nkpa::derive_circuit(reference_device()); }

inline nkpa::DerivedCircuit lossless(nkpa::DerivedCircuit c) {
    c.external_coupling_rate += c.intrinsic_loss_rate;
    c.intrinsic_loss_rate = 0.0;
    return c;
}

}  // namespace fixtures

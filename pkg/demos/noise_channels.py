"""What each noise mechanism does to a state, and how a profile bundles them.

Channels act through Kraus operators; the composed device step applies gate
noise after every gate, then ZZ crosstalk on the coupling graph, then
amplitude and phase damping on every qubit.
"""
import numpy as np

from qreservoir import (SubsystemLayout, amplitude_damping_channel,
                        apply_channel, apply_device_noise, apply_unitary,
                        basis_state, build_layer, depolarizing_channel,
                        load_noise_profile, phase_damping_channel, plus_state,
                        zz_crosstalk_gate)

np.set_printoptions(precision=3, suppress=True)

print("depolarizing p=0.5 on |0>:")
out = apply_channel(basis_state(1, 0), depolarizing_channel(0.5, 1, (0,)))
print(out.matrix.real)

print("\namplitude damping gamma=0.3 on |+>: population sinks to |0>,")
print("coherence shrinks by sqrt(1-gamma):")
out = apply_channel(plus_state(1), amplitude_damping_channel(0.3, 0))
print(out.matrix.real)

print("\nphase damping lambda=0.5 on |+>: diagonal untouched:")
out = apply_channel(plus_state(1), phase_damping_channel(0.5, 0))
print(out.matrix.real)

print("\nZZ crosstalk theta=pi/4 on |+>|+>: phases only,")
print("off-diagonal entries rotate:")
out = apply_unitary(plus_state(2), zz_crosstalk_gate(np.pi / 4, (0, 1)))
print(np.round(out.matrix, 3))

# a profile is just an INI document (or a file with the same sections)
profile = load_noise_profile("""
[gates]
p1 = 0.002
p2 = 0.02
[idle]
gamma = 0.01
lambda = 0.01
[crosstalk]
theta = 0.06
[topology]
num_qubits = 4
edges = 0-1, 1-2, 2-3, 0-2, 1-3
""")
print("\nloaded profile:", profile)

layer = build_layer(0.15, SubsystemLayout.default(4), 2.0)
state = apply_device_noise(plus_state(4), profile, layer)
print("\none composed device step from |+>^4:")
print("  trace:", state.matrix.trace().real)
print("  purity Tr(rho^2):", (state.matrix @ state.matrix).trace().real)
print("  min eigenvalue:", np.linalg.eigvalsh(state.matrix).min())

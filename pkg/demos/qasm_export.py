"""Exporting the input-driven circuit as OpenQASM 2.0.

Each timestep appends one encoding layer per qubit pair; the angle carried by
the rotations is scale * u_t, so the program text is a faithful record of the
drive sequence. The same export backs the `qreservoir export-qasm` command.
"""
from qreservoir import InputSignalSpec, SubsystemLayout, export_qasm, gen_input

layout = SubsystemLayout.default(4)
inputs = gen_input(InputSignalSpec(length=3))

program = export_qasm(inputs, layout, a=2.0)
print(f"{len(inputs)}-step program for {layout.num_qubits} qubits "
      f"({len(program.splitlines())} lines):\n")
print(program)

one_step = export_qasm(inputs[:1], layout, a=2.0)
gates = [ln for ln in one_step.splitlines()
         if ln.startswith(("rx", "rz", "cx"))]
print("gates in a single layer, per pair:")
for g in gates:
    print(" ", g)

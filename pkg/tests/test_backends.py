import math
import random
import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_circuit
from oracles import Z, dense_state, deuteron_ansatz_amplitudes, embed, qubo_enumerate
from qxir.backends import AcceleratorBuffer, ExecutionOptions, get_backend
from qxir.backends.buffer import get_expectation_value_z, parity_expectation, reset_buffer
from qxir.backends.ising import Problem, brute_force, problem_from_function, simulated_annealing
from qxir.backends.statevector import apply_gate, gate_matrix, run_unitary, zero_state
from qxir.errors import (
    CapacityError,
    DialectError,
    ModeError,
    NoDataError,
    UnboundVariableError,
    UnsupportedParameterError,
    VariableIndexError,
)
from qxir.ir import FunctionNode, Instruction, InstructionParameter, evaluate_parameters, gate, measure, qmi
from qxir.qmi_lang import parse_qmi_kernels


def kernel(*ops, formals=()):
    return FunctionNode("k", tuple(formals), list(ops))


def run(f, size=2, **opts):
    return get_backend("sv").execute(AcceleratorBuffer("q", size), f, ExecutionOptions(**opts))


def bound(ir, name, theta):
    return evaluate_parameters(ir.get(name), {"t0": theta})


# ------------------------------------------------------------------ buffers


def test_create_buffer():
    sv = get_backend("sv")
    b = sv.createBuffer("qreg", 2)
    assert (b.name, b.size, b.measurements) == ("qreg", 2, [])
    assert sv.create_buffer("q", 1).size == 1
    for size in (0, 27):
        with pytest.raises(CapacityError):
            sv.create_buffer("q", size)
    with pytest.raises(CapacityError):
        sv.create_buffer("q")
    assert get_backend("ising").create_buffer("q").size >= 1


def test_expectation_examples():
    assert parity_expectation(["00", "11"]) == 1.0
    assert parity_expectation(["01", "01", "10", "11"]) == -0.5
    b = AcceleratorBuffer("q", 2, ["01", "01", "10", "11"], exact_expectation=0.25)
    assert get_expectation_value_z(b) == 0.25 and b.getExpectationValueZ([0]) == 0.25


def test_expectation_subsets():
    strings = ["01", "01", "10", "11"]
    assert parity_expectation(strings, [0]) == 0.0   # bit 0: 0,0,1,1
    assert parity_expectation(strings, [1]) == -0.5  # bit 1: 1,1,0,1
    assert parity_expectation(strings, []) == 1.0


def test_reset():
    b = AcceleratorBuffer("q", 2, ["01"], {"x": 1.0}, 0.5)
    assert reset_buffer(b) is b
    assert (b.name, b.size, b.measurements, b.metadata, b.exact_expectation) == ("q", 2, [], {}, None)
    b.resetBuffer()
    assert b == AcceleratorBuffer("q", 2)
    with pytest.raises(NoDataError):
        b.getExpectationValueZ()


def test_mixed_widths_rejected():
    b = AcceleratorBuffer("q", 2, ["01"])
    with pytest.raises(ValueError):
        b.append_measurements(["1"])


# ------------------------------------------------------------------ statevector


def test_deterministic_circuit():
    b = run(kernel(gate("X", 0), measure(0, 0)), size=1, shots=100)
    assert b.measurements == ["1"] * 100


def test_ansatz_at_zero(deuteron_ir):
    f = bound(deuteron_ir, "ansatz", 0.0)
    both = FunctionNode("k", (), [f, measure(0, 0), measure(1, 1)])
    assert set(run(both, shots=50, seed=1).measurements) == {"10"}  # q0=1, q1=0
    assert run(kernel(f, measure(0, 0)), mode="exact").exact_expectation == pytest.approx(-1)
    assert run(kernel(f, measure(1, 0)), mode="exact").exact_expectation == pytest.approx(1)


def test_hadamard_exact_zero():
    assert run(kernel(gate("H", 0), measure(0, 0)), size=1, mode="exact").exact_expectation == pytest.approx(0, abs=1e-15)


def test_ansatz_state_matches_hand_oracle(deuteron_ir):
    for theta in np.linspace(-math.pi, math.pi, 13):
        psi = run_unitary(bound(deuteron_ir, "ansatz", theta).instructions(), 2)
        assert np.allclose(psi, deuteron_ansatz_amplitudes(theta), atol=1e-12)


@pytest.mark.parametrize("theta", np.linspace(-math.pi, math.pi, 9))
def test_term_expectations(deuteron_ir, theta):
    psi = deuteron_ansatz_amplitudes(theta)
    z0 = run(bound(deuteron_ir, "z0", theta), mode="exact").exact_expectation
    z1 = run(bound(deuteron_ir, "z1", theta), mode="exact").exact_expectation
    x = run(bound(deuteron_ir, "x0x1", theta), mode="exact").exact_expectation
    assert z0 == pytest.approx(-math.cos(theta), abs=1e-12)
    assert z0 == pytest.approx(psi @ embed({0: Z}, 2).real @ psi, abs=1e-12)
    assert z1 == pytest.approx(math.cos(theta), abs=1e-12)
    assert x == pytest.approx(math.sin(theta), abs=1e-12)


def test_exact_parity_counts_odd_measurements():
    once = kernel(gate("X", 0), measure(0, 0))
    twice = kernel(gate("X", 0), measure(0, 0), measure(0, 1))
    assert run(once, mode="exact").exact_expectation == -1
    assert run(twice, mode="exact").exact_expectation == 1
    assert set(run(twice, shots=5).measurements) == {"11"}


def test_bit_strings_follow_cbit_order():
    f = kernel(gate("X", 1), measure(1, 0), measure(0, 2))
    assert set(run(f, size=2, shots=4).measurements) == {"10"}


def test_mid_circuit_measurement():
    f = kernel(gate("H", 0), measure(0, 0), gate("H", 0), measure(0, 1))
    with pytest.raises(ModeError):
        run(f, size=1, mode="exact")
    b = run(f, size=1, shots=4000, seed=3)
    counts = b.counts()
    assert set(counts) == {"00", "01", "10", "11"}
    assert all(abs(c / 4000 - 0.25) < 0.04 for c in counts.values())
    # collapse: X after a measured |1> always flips it back
    g = kernel(gate("X", 0), measure(0, 0), gate("X", 0), measure(0, 1))
    assert set(run(g, size=1, shots=20).measurements) == {"10"}


def test_parameter_errors():
    with pytest.raises(UnboundVariableError):
        run(kernel(Instruction("RY", (0,), (InstructionParameter.var("t0"),)), formals=["t0"]))
    with pytest.raises(UnsupportedParameterError):
        run(kernel(Instruction("RY", (0,), (InstructionParameter.complex_(1j),))))
    with pytest.raises(UnsupportedParameterError):
        run(kernel(Instruction("RY", (0,), (InstructionParameter.string("a"),))))
    with pytest.raises(CapacityError):
        run(kernel(gate("X", 3)), size=2)
    with pytest.raises(DialectError):
        run(kernel(qmi(0, 0, 1.0)))


def test_integer_angles_accepted():
    f = kernel(Instruction("RX", (0,), (InstructionParameter.int_(2),)), measure(0, 0))
    assert run(f, size=1, mode="exact").exact_expectation == pytest.approx(math.cos(2))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32))
def test_norm_and_oracle_agreement(seed):
    ops = random_circuit(random.Random(seed), nqubits=3, depth=10)
    psi = zero_state(3)
    for inst in ops:
        psi = apply_gate(psi, gate_matrix(inst), inst.qubits, 3)
        assert abs(np.vdot(psi, psi).real - 1) < 1e-12
    expected = dense_state([(i.name, i.qubits, [float(p.value) for p in i.params]) for i in ops], 3)
    assert np.allclose(psi, expected, atol=1e-12)


@pytest.mark.parametrize("name", ["X", "Y", "Z", "H", "RX", "RY", "RZ", "CNOT", "CZ"])
def test_gate_unitarity(name):
    rng = np.random.default_rng(0)
    for theta in rng.uniform(-10, 10, 20):
        k = 2 if name in ("CNOT", "CZ") else 1
        inst = gate(name, *range(k), params=[theta] if name.startswith("R") else [])
        u = gate_matrix(inst)
        assert np.abs(u.conj().T @ u - np.eye(2**k)).max() < 1e-12


def test_rotation_conventions():
    t = 0.7
    c, s = math.cos(t / 2), math.sin(t / 2)
    assert np.allclose(gate_matrix(gate("RY", 0, params=[t])), [[c, -s], [s, c]])
    assert np.allclose(gate_matrix(gate("RX", 0, params=[t])), [[c, -1j * s], [-1j * s, c]])


def test_sampling_converges(deuteron_ir):
    f = bound(deuteron_ir, "z0", 1.0)
    sampled = run(f, shots=100_000, seed=11).getExpectationValueZ()
    assert abs(sampled + math.cos(1.0)) <= 5 * math.sqrt(1 / 1e5)


def test_sampling_is_deterministic(deuteron_ir):
    f = bound(deuteron_ir, "x0x1", 0.4)
    assert run(f, shots=500, seed=5).measurements == run(f, shots=500, seed=5).measurements
    assert run(f, shots=500, seed=5).measurements != run(f, shots=500, seed=6).measurements


def test_concurrent_execution_on_one_backend(deuteron_ir):
    sv = get_backend("sv")
    f = bound(deuteron_ir, "y0y1", 0.9)
    expected = sv.execute(AcceleratorBuffer("q", 2), f, ExecutionOptions(shots=300, seed=2)).measurements
    results = [None] * 8

    def work(k):
        results[k] = sv.execute(AcceleratorBuffer("q", 2), f, ExecutionOptions(shots=300, seed=2)).measurements

    threads = [threading.Thread(target=work, args=(k,)) for k in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == expected for r in results)


def test_readout_noise_only_in_sample_mode():
    noisy = get_backend("sv", readout_error=(0.1, 0.2))
    f = kernel(gate("X", 0), measure(0, 0))
    b = noisy.execute(AcceleratorBuffer("q", 1), f, ExecutionOptions(shots=50_000, seed=1))
    assert abs(b.counts()["0"] / 50_000 - 0.2) < 0.01
    b = noisy.execute(AcceleratorBuffer("q", 1), f, ExecutionOptions(mode="exact"))
    assert b.exact_expectation == -1


# ------------------------------------------------------------------ annealing


def anneal(text, **opts):
    f = parse_qmi_kernels(text).functions[0]
    return get_backend("ising").execute(AcceleratorBuffer("q", 64), f, ExecutionOptions(**opts))


def test_anneal_examples():
    b = anneal("__qpu__ p() {\n0 0 20;\n}", num_samples=1)
    assert b.measurements == ["0"] and b.metadata["energy[0]"] == 0.0
    b = anneal("__qpu__ p() {\n0 0 -1;\n1 1 -1;\n0 1 2;\n}", num_samples=2)
    assert b.measurements == ["01", "10"] and b.energies() == [-1.0, -1.0]
    b = anneal("__qpu__ p() {\n0 0 0;\n1 1 0;\n}", num_samples=3)
    assert b.measurements == ["00", "01", "10"] and b.metadata["min_energy"] == 0.0


def test_anneal_errors():
    f = parse_qmi_kernels("__qpu__ p() {\n0 5 1;\n}").functions[0]
    with pytest.raises(VariableIndexError):
        get_backend("ising").execute(AcceleratorBuffer("q", 3), f, ExecutionOptions())
    with pytest.raises(CapacityError):
        brute_force(Problem(np.zeros(25), np.zeros((25, 25))), 1)
    with pytest.raises(DialectError):
        problem_from_function(kernel(gate("X", 0)))


def test_energies_accumulate_across_calls():
    sv = get_backend("ising")
    f = parse_qmi_kernels("__qpu__ p() {\n0 0 -1;\n}").functions[0]
    b = AcceleratorBuffer("q", 4)
    sv.execute(b, f, ExecutionOptions(num_samples=2))
    sv.execute(b, f, ExecutionOptions(num_samples=2))
    assert b.energies() == [-1.0, 0.0, -1.0, 0.0]


def random_problem(rng, n, spin=False):
    linear = {i: rng.uniform(-2, 2) for i in range(n)}
    quadratic = {(i, j): rng.uniform(-2, 2) for i in range(n) for j in range(i + 1, n) if rng.random() < 0.6}
    J = np.zeros((n, n))
    for (i, j), w in quadratic.items():
        J[i, j] = w
    return Problem(np.array([linear[i] for i in range(n)]), J, spin), linear, quadratic


@pytest.mark.parametrize("spin", [False, True])
@pytest.mark.parametrize("n", [1, 3, 6, 9])
def test_brute_force_matches_enumeration(n, spin):
    rng = random.Random(100 * n + spin)
    for _ in range(5):
        problem, linear, quadratic = random_problem(rng, n, spin)
        ranked = sorted(qubo_enumerate(n, linear, quadratic, spin), key=lambda p: (round(p[1], 9), p[0]))
        k = min(4, 2**n)
        bits, energies = brute_force(problem, k)
        assert ["".join(map(str, row)) for row in bits] == [s for s, _ in ranked[:k]]
        assert np.allclose(energies, [e for _, e in ranked[:k]])


def test_sa_never_below_brute_force_and_is_seeded():
    rng = random.Random(7)
    for _ in range(5):
        problem, _, _ = random_problem(rng, 10)
        _, best = brute_force(problem, 1)
        samples, energies = simulated_annealing(problem, 8, seed=3, sweeps_per_variable=200)
        assert energies.min() >= best[0] - 1e-9
        again, _ = simulated_annealing(problem, 8, seed=3, sweeps_per_variable=200)
        assert (samples == again).all()

import pytest

from qxir.errors import (
    ArityError,
    DuplicateKernelError,
    ParseError,
    QubitDistinctnessError,
    UnknownGateError,
    UnresolvedKernelError,
)
from qxir.frontend import KernelSource, compile
from qxir.gate_lang import parse_gate_kernels
from qxir.ir import FunctionNode, Instruction, InstructionParameter, gate, measure, to_assembly


def kernel(body: str, formals: str = "") -> str:
    return f"__qpu__ k(AcceleratorBuffer b{formals}) {{\n{body}\n}}\n"


def test_deuteron_z0_and_y0y1(deuteron_ir):
    z0 = deuteron_ir.get("z0")
    assert isinstance(z0.children[0], FunctionNode) and z0.children[0].call
    assert z0.children[0].name == "ansatz" and z0.children[0].args == (InstructionParameter.var("t0"),)
    assert z0.children[1] == measure(0, 0)
    y = deuteron_ir.get("y0y1").children
    assert y[0].name == "ansatz"
    assert y[1:] == [gate("RX", 0, params=[1.57079]), gate("RX", 1, params=[1.57079]), measure(0, 0), measure(1, 1)]
    assert y[1].params[0].value == 1.57079  # taken verbatim, not snapped to pi/2


def test_single_rotation_literal():
    ir = parse_gate_kernels(kernel("RY(0.0) 1"))
    assert ir.functions[0].children == [Instruction("RY", (1,), (InstructionParameter.real(0.0),))]


def test_qubit_distinctness():
    with pytest.raises(QubitDistinctnessError) as e:
        parse_gate_kernels(kernel("CNOT 1 1"))
    assert e.value.line == 2


@pytest.mark.parametrize("body,error", [
    ("FOO 0", UnknownGateError),
    ("CNOT 0", ArityError),
    ("RY 0", ArityError),
    ("H(0.1) 0", ArityError),
    ("MEASURE 0", UnknownGateError),
    ("nothere(b)", UnresolvedKernelError),
    ("RY(zz) 0", ParseError),
])
def test_errors_carry_lines(body, error):
    with pytest.raises(error) as e:
        parse_gate_kernels(kernel("X 0\n" + body))
    assert e.value.line == 3


def test_forward_reference_and_duplicates():
    src = "__qpu__ a(AcceleratorBuffer b) {\n later(b)\n}\n__qpu__ later(AcceleratorBuffer b) {\n X 0\n}"
    with pytest.raises(UnresolvedKernelError, match="later"):
        parse_gate_kernels(src)
    with pytest.raises(DuplicateKernelError):
        parse_gate_kernels(kernel("X 0") + kernel("Y 0"))


def test_call_arity_and_buffer_checks():
    base = "__qpu__ a(AcceleratorBuffer b, double t) {\n RY(t) 0\n}\n"
    with pytest.raises(ArityError):
        parse_gate_kernels(base + kernel("a(b)"))
    with pytest.raises(ParseError):
        parse_gate_kernels(base + kernel("a(q, 1.0)"))
    ir = parse_gate_kernels(base + kernel("a(b, 2)"))
    call = ir.get("k").children[0]
    assert call.children == [Instruction("RY", (0,), (InstructionParameter.int_(2),))]


def test_comments_blank_lines_and_disabled():
    ir = parse_gate_kernels(kernel("# a comment\n\nH 0   # trailing\n#@ X 1\n"))
    f = ir.functions[0]
    assert f.children == [gate("H", 0), Instruction("X", (1,), enabled=False)]
    assert f.instructions() == [gate("H", 0)]


def test_text_outside_kernels_rejected():
    with pytest.raises(ParseError):
        parse_gate_kernels("int x;\n" + kernel("X 0"))


def test_whole_source_reparse_identity(deuteron_text):
    once = compile(KernelSource(deuteron_text))
    assert compile(KernelSource(to_assembly(once))) == once


def test_every_instruction_meets_its_signature(deuteron_ir):
    from qxir.ir import SIGNATURES

    for f in deuteron_ir.functions:
        for i in f.leaves():
            sig = SIGNATURES[i.name]
            assert (len(i.qubits), len(i.params)) == (sig.num_qubits, sig.num_params)

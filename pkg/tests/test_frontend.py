import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from corpus import random_container
from qxir.backends import get_backend
from qxir.errors import CapacityError, MacroRecursionError, UnknownLanguageError
from qxir.frontend import KernelSource, compile, preprocess, sniff_language
from qxir.ir import ANNEAL_LANGUAGE, GATE_LANGUAGE, to_assembly


def test_macro_substitution():
    src = KernelSource("__qpu__ k(AcceleratorBuffer b) {\n $BASIS_X 0\n}")
    assert "\n H 0\n" in preprocess(src, {"BASIS_X": "H"}).text


def test_no_defines_is_identity():
    text = "__qpu__ k(AcceleratorBuffer b) {\n $BASIS_X 0\n}"
    assert preprocess(KernelSource(text), {}).text == text
    assert preprocess(KernelSource(text), {"OTHER": "X"}).text == text  # unmatched tokens stay


def test_macro_expands_nested_definitions_only_inside_bodies():
    src = KernelSource("# $A outside\n__qpu__ k(AcceleratorBuffer b) {\n $A\n}", "gate-quil")
    out = preprocess(src, {"A": "$B 0", "B": "X"})
    assert out.text.startswith("# $A outside") and "\n X 0\n" in out.text
    assert out.language == "gate-quil"


def test_macro_recursion_detected():
    src = KernelSource("__qpu__ k(AcceleratorBuffer b) {\n $A 0\n}")
    with pytest.raises(MacroRecursionError):
        preprocess(src, {"A": "$B", "B": "$A"})
    # a chain just inside the depth limit still expands
    chain = {f"M{k}": f"$M{k + 1}" for k in range(31)} | {"M31": "H"}
    assert "H 0" in preprocess(src.__class__("__qpu__ k(AcceleratorBuffer b) {\n $M0 0\n}"), chain).text
    chain = {f"M{k}": f"$M{k + 1}" for k in range(32)} | {"M32": "H"}
    with pytest.raises(MacroRecursionError):
        preprocess(src.__class__("__qpu__ k(AcceleratorBuffer b) {\n $M0 0\n}"), chain)


def test_preprocess_then_compile_equals_manual_expansion():
    macro = "__qpu__ k(AcceleratorBuffer b, double t) {\n $PREP\n $ROT(t) 1\n MEASURE 1 [0]\n}"
    manual = "__qpu__ k(AcceleratorBuffer b, double t) {\n H 0\n CNOT 0 1\n RY(t) 1\n MEASURE 1 [0]\n}"
    defines = {"PREP": "H 0\n CNOT 0 1", "ROT": "RY"}
    assert compile(preprocess(KernelSource(macro), defines)) == compile(KernelSource(manual))


def test_compile_deuteron_kernels(deuteron_text):
    ir = compile(KernelSource(deuteron_text, "gate-quil"))
    assert ir.language == GATE_LANGUAGE
    assert ir.names == ["ansatz", "z0", "z1", "x0x1", "y0y1"]


def test_compile_qmi(factor15_text):
    ir = compile(KernelSource(factor15_text, "anneal-qmi"))
    assert ir.language == ANNEAL_LANGUAGE and ir.names == ["factor15"]


def test_compile_unknown_language():
    with pytest.raises(UnknownLanguageError):
        compile(KernelSource("__qpu__ k(AcceleratorBuffer b) {\n}", "fortran-q"))


def test_sniffer(deuteron_text, factor15_text):
    assert sniff_language(deuteron_text) == GATE_LANGUAGE
    assert sniff_language(factor15_text) == ANNEAL_LANGUAGE
    assert compile(KernelSource(factor15_text)).language == ANNEAL_LANGUAGE


def test_kernel_source_needs_qpu_marker():
    with pytest.raises(ValueError):
        KernelSource("X 0")


def test_target_capacity(deuteron_text):
    sv1 = get_backend("sv", max_qubits=1)
    with pytest.raises(CapacityError):
        compile(KernelSource(deuteron_text), sv1.descriptor)
    assert compile(KernelSource(deuteron_text), get_backend("sv").descriptor).names[0] == "ansatz"


@given(st.integers(0, 2**32))
def test_compile_is_deterministic(seed):
    ir = random_container(random.Random(seed))
    if ir.functions:
        text = to_assembly(ir)
        assert compile(KernelSource(text, ir.language)) == compile(KernelSource(text, ir.language))

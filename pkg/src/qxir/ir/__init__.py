"""The qxir intermediate representation."""

from qxir.ir.assembly import parse_param, render_instruction, split_args, to_assembly
from qxir.ir.graph import CircuitGraph, ProblemGraph, circuit_graph, problem_graph, to_graph
from qxir.ir.nodes import (
    ANNEAL_LANGUAGE,
    GATE_LANGUAGE,
    GATE_NAMES,
    LANGUAGES,
    SIGNATURES,
    FunctionNode,
    GateSignature,
    Instruction,
    InstructionParameter,
    IRContainer,
    Node,
    Param,
    evaluate_parameters,
    gate,
    measure,
    preorder_walk,
    qmi,
    substitute,
)
from qxir.ir.persist import SCHEMA, dumps, load, loads, persist

__all__ = [
    "ANNEAL_LANGUAGE", "GATE_LANGUAGE", "GATE_NAMES", "LANGUAGES", "SCHEMA", "SIGNATURES",
    "CircuitGraph", "FunctionNode", "GateSignature", "IRContainer", "Instruction",
    "InstructionParameter", "Node", "Param", "ProblemGraph", "circuit_graph", "dumps",
    "evaluate_parameters", "gate", "load", "loads", "measure", "parse_param", "persist",
    "preorder_walk", "problem_graph", "qmi", "render_instruction", "split_args",
    "substitute", "to_assembly", "to_graph",
]

"""
QASM-2 subset reader/writer

Supported statements: OPENQASM/include headers, qreg/creg, the GateKind
gates, measure, reset, barrier (dropped), `if (c[k]==1) x q[j];` and the
`// #commuting begin [id]` / `// #commuting end` pragma around CZ/CP blocks.
"""
from __future__ import annotations

import logging
import math
import re
from typing import Dict, List, Tuple

import pyparsing as pp

from .circuit import Circuit, CircuitError, GateKind, Instruction, QasmError, QASM_GATES


class _Tokens:
    """Grammar pieces shared by the statement rules"""

    ident = pp.Word(pp.alphas + '_', pp.alphanums + '_')
    integer = pp.pyparsing_common.integer
    lbra, rbra, lpar, rpar, semi = map(pp.Suppress, '[]();')

    reserved = pp.MatchFirst(map(pp.Keyword, [
        'OPENQASM', 'include', 'qreg', 'creg', 'measure', 'reset', 'barrier', 'if',
    ]))

    arg = pp.Group(ident('reg') + lbra + integer('index') + rbra)

    number = pp.pyparsing_common.number.copy().set_parse_action(lambda t: float(t[0]))
    pi = pp.CaselessKeyword('pi').set_parse_action(pp.replace_with(math.pi))
    expr = pp.infix_notation(number | pi, [
        (pp.one_of('+ -'), 1, pp.OpAssoc.RIGHT),
        (pp.one_of('* /'), 2, pp.OpAssoc.LEFT),
        (pp.one_of('+ -'), 2, pp.OpAssoc.LEFT),
    ])


_PRAGMA = re.compile(r'//[ \t]*#commuting[ \t]+(?P<which>begin|end)(?:[ \t]+(?P<group>\d+))?[^\n]*')


def _tagged(tag: str, expr: pp.ParserElement) -> pp.ParserElement:
    return expr.set_parse_action(lambda s, loc, toks: [(tag, loc, toks)])


def _build_grammar() -> pp.ParserElement:
    t = _Tokens
    version = _tagged('version', pp.Keyword('OPENQASM') + pp.Regex(r'\d+(\.\d+)?') + t.semi)
    include = _tagged('include', pp.Keyword('include') + pp.QuotedString('"') + t.semi)
    qreg = _tagged('qreg', pp.Keyword('qreg').suppress() + t.ident + t.lbra + t.integer + t.rbra + t.semi)
    creg = _tagged('creg', pp.Keyword('creg').suppress() + t.ident + t.lbra + t.integer + t.rbra + t.semi)
    measure = _tagged('measure', pp.Keyword('measure').suppress() + t.arg + pp.Suppress('->') + t.arg + t.semi)
    reset = _tagged('reset', pp.Keyword('reset').suppress() + t.arg + t.semi)
    barrier = _tagged('barrier', pp.Keyword('barrier').suppress() + pp.Optional(pp.delimited_list(t.arg)) + t.semi)
    conditional = _tagged('if', (
        pp.Keyword('if').suppress() + t.lpar + t.arg + pp.Suppress('==') + t.integer + t.rpar
        + pp.Keyword('x').suppress() + t.arg + t.semi
    ))
    params = pp.Group(pp.Optional(t.lpar + pp.delimited_list(t.expr) + t.rpar))
    gate = _tagged('gate', ~t.reserved + t.ident + params + pp.Group(pp.delimited_list(t.arg)) + t.semi)
    pragma = _tagged('pragma', pp.Regex(_PRAGMA.pattern))

    statement = version | include | qreg | creg | measure | reset | barrier | conditional | pragma | gate
    program = pp.ZeroOrMore(statement)
    program.ignore(pp.Regex(r'//(?![ \t]*#commuting).*'))
    program.ignore(pp.c_style_comment)
    return program


_GRAMMAR = _build_grammar()
# whitespace and plain comments a statement location may still point before
_LEADING = re.compile(r'(?:\s+|//(?![ \t]*#commuting)[^\n]*|/\*.*?\*/)*', re.S)


def _position(text: str, loc: int) -> Tuple[int, int]:
    loc = _LEADING.match(text, loc).end()
    return pp.lineno(loc, text), pp.col(loc, text)


def _evaluate(tok) -> float:
    """Fold an infix_notation parse tree into a float"""
    if isinstance(tok, (int, float)):
        return float(tok)
    items = list(tok)
    if len(items) == 1:
        return _evaluate(items[0])
    if len(items) == 2 and items[0] in ('+', '-'):
        value = _evaluate(items[1])
        return -value if items[0] == '-' else value
    value = _evaluate(items[0])
    for op, operand in zip(items[1::2], items[2::2]):
        rhs = _evaluate(operand)
        if op == '+':
            value += rhs
        elif op == '-':
            value -= rhs
        elif op == '*':
            value *= rhs
        else:
            value /= rhs
    return value


class _Registers:
    """Flattens named registers onto contiguous index ranges"""

    def __init__(self, kind: str):
        self.kind = kind
        self.regs: Dict[str, Tuple[int, int]] = {}
        self.size = 0

    def declare(self, name: str, size: int, where: Tuple[int, int]):
        if name in self.regs:
            raise QasmError(f"{self.kind} '{name}' declared twice", *where)
        self.regs[name] = (self.size, size)
        self.size += size

    def resolve(self, arg, where: Tuple[int, int]) -> int:
        name, index = arg['reg'], arg['index']
        if name not in self.regs:
            raise QasmError(f"undeclared {self.kind} '{name}'", *where)
        offset, size = self.regs[name]
        if not 0 <= index < size:
            raise QasmError(f"index {name}[{index}] out of declared range {size}", *where)
        return offset + index


def parse_qasm(text: str, name: str = 'circuit') -> Circuit:
    """Parse the supported QASM subset into a Circuit"""
    try:
        statements = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseException as e:
        raise QasmError(f"syntax error: {e.msg}", e.lineno, e.col) from e

    qregs, cregs = _Registers('qreg'), _Registers('creg')
    instructions: List[Instruction] = []
    group_counter = 0
    current_group = None

    for tag, loc, toks in statements:
        where = _position(text, loc)

        def add(kind, qubits, clbits=(), params=(), group=None):
            try:
                instructions.append(Instruction(len(instructions), kind, qubits, clbits, params, group))
            except CircuitError as e:
                raise QasmError(str(e), *where) from e

        if tag in ('version', 'include', 'barrier'):
            continue
        if tag == 'qreg':
            qregs.declare(toks[0], toks[1], where)
        elif tag == 'creg':
            cregs.declare(toks[0], toks[1], where)
        elif tag == 'pragma':
            pragma = _PRAGMA.match(toks[0])
            if pragma['which'] == 'begin':
                if current_group is not None:
                    raise QasmError("nested '#commuting begin'", *where)
                current_group = group_counter if pragma['group'] is None else int(pragma['group'])
                group_counter = max(group_counter, current_group) + 1
            else:
                if current_group is None:
                    raise QasmError("'#commuting end' without begin", *where)
                current_group = None
        elif tag == 'measure':
            add(GateKind.MEASURE, [qregs.resolve(toks[0], where)], [cregs.resolve(toks[1], where)])
        elif tag == 'reset':
            add(GateKind.RESET, [qregs.resolve(toks[0], where)])
        elif tag == 'if':
            if toks[1] != 1:
                raise QasmError("only single-bit conditions '== 1' are supported", *where)
            add(GateKind.CX_CLASSICAL, [qregs.resolve(toks[2], where)], [cregs.resolve(toks[0], where)])
        elif tag == 'gate':
            gate_name, params, args = toks[0], toks[1], toks[2]
            kind = QASM_GATES.get(gate_name)
            if kind is None:
                raise QasmError(f"unknown gate '{gate_name}'", *where)
            qubits = [qregs.resolve(a, where) for a in args]
            values = [_evaluate(p) for p in params]
            if current_group is not None and not kind.is_diagonal:
                raise QasmError(f"'{gate_name}' inside a commuting block (only cz/cp allowed)", *where)
            add(kind, qubits, params=values, group=current_group)

    if current_group is not None:
        raise QasmError("unterminated '#commuting begin'", pp.lineno(len(text), text), pp.col(len(text), text))

    try:
        circuit = Circuit(qregs.size, cregs.size, tuple(instructions), name)
    except CircuitError as e:
        raise QasmError(str(e), pp.lineno(len(text), text), 1) from e
    logging.debug(f"Parsed '{name}': {circuit.num_qubits} qubits, {len(circuit)} instructions")
    return circuit


def _fmt(value: float) -> str:
    return repr(float(value))


def _statement(inst: Instruction) -> str:
    kind = inst.kind
    if kind is GateKind.MEASURE:
        return f"measure q[{inst.qubit}] -> c[{inst.clbit}];"
    if kind is GateKind.RESET:
        return f"reset q[{inst.qubit}];"
    if kind is GateKind.CX_CLASSICAL:
        return f"if (c[{inst.clbit}]==1) x q[{inst.qubit}];"
    params = f"({','.join(_fmt(p) for p in inst.params)})" if inst.params else ''
    operands = ','.join(f"q[{q}]" for q in inst.qubits)
    return f"{kind.value}{params} {operands};"


def emit_qasm(circuit: Circuit) -> str:
    """Serialize a Circuit; parse_qasm(emit_qasm(c)) is structurally equal to c"""
    lines = ['OPENQASM 2.0;', 'include "qelib1.inc";', f"qreg q[{circuit.num_qubits}];"]
    if circuit.num_clbits:
        lines.append(f"creg c[{circuit.num_clbits}];")

    open_group = None
    for inst in circuit.instructions:
        if inst.commuting_group != open_group:
            if open_group is not None:
                lines.append('// #commuting end')
            if inst.commuting_group is not None:
                lines.append(f"// #commuting begin {inst.commuting_group}")
            open_group = inst.commuting_group
        lines.append(_statement(inst))
    if open_group is not None:
        lines.append('// #commuting end')
    return '\n'.join(lines) + '\n'

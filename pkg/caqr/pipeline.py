"""
End-to-end transpile flow shared by the command line, the HTTP service and the reports
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple, Union

from .circuit import CaqrError, Circuit, InfeasibleError
from .config import DEFAULT_SEED, EQUIVALENCE_TOLERANCE
from .dag import DependencyDag, build_dag
from .hardware import Calibration, CouplingGraph, Durations, resolve_architecture
from .metrics import total_variation_distance
from .qs_caqr import (
    OBJECTIVES, Infeasible, TradeoffPoint, TransformResult, maximal_reuse, reduce_to_limit, select_point, sweep,
)
from .reports import transform_report
from .reuse import WireMap, apply_pairs
from .simulator import Distribution, sample_shots, simulate_exact
from .sr_caqr import MappedResult, map_baseline, map_commuting, map_regular, verify_mapping

MODES = ('qs', 'sr')


def parse_qubit_range(text: str) -> Tuple[int, int]:
    """'LO:HI' -> (LO, HI)"""
    try:
        lo, hi = (int(x) for x in text.split(':'))
    except ValueError:
        raise CaqrError(f"malformed qubit range '{text}', expected LO:HI") from None
    if not 1 <= lo <= hi:
        raise CaqrError(f"qubit range {lo}:{hi} must satisfy 1 <= LO <= HI")
    return lo, hi


@dataclass(frozen=True)
class RunConfig:
    mode: str = 'qs'
    qubit_limit: Optional[int] = None
    qubit_range: Optional[Tuple[int, int]] = None
    objective: str = 'duration'
    arch: Optional[str] = None
    builtin_reset: bool = False
    shots: Optional[int] = None
    seed: int = DEFAULT_SEED

    def __post_init__(self):
        if self.shots is not None and self.shots < 1:
            raise CaqrError(f"shots must be positive, got {self.shots}")
        if self.mode not in MODES:
            raise CaqrError(f"unknown mode '{self.mode}', expected qs or sr")
        if self.mode == 'sr' and not self.arch:
            raise CaqrError("sr mode needs --arch")
        if self.objective not in OBJECTIVES:
            raise CaqrError(f"unknown objective '{self.objective}'")
        if self.objective in ('esp', 'swaps') and self.qubit_range is not None and not self.arch:
            raise CaqrError(f"objective '{self.objective}' needs --arch")

    def hardware(self) -> Optional[Tuple[CouplingGraph, Calibration]]:
        if not self.arch:
            return None
        return resolve_architecture(self.arch, builtin_reset=self.builtin_reset)

    def durations(self, hardware: Optional[Tuple[CouplingGraph, Calibration]] = None) -> Durations:
        if hardware is not None:
            return Durations.from_calibration(hardware[1])
        return Durations.for_reset(self.builtin_reset)


@dataclass(frozen=True)
class TranspileOutcome:
    circuit: Circuit
    report: dict
    pairs: Tuple[Tuple[int, int], ...] = ()
    mapped: Optional[MappedResult] = None

    def dag(self, original: Circuit, durations=None) -> DependencyDag:
        """Dependency DAG of the input with the chosen pairs as dummy nodes"""
        return apply_pairs(original, self.pairs, durations) if self.pairs else build_dag(original, durations)


def sr_min_swap(circuit: Circuit, coupling: CouplingGraph, calibration: Calibration,
                points: Sequence[TradeoffPoint] = ()) -> MappedResult:
    """SR mapping with the fewest SWAPs over the reuse levels on offer

    Commuting circuits try the pair set of every sweep point; regular
    circuits try the input and the fewest-SWAP sweep point circuit. The
    eager routing of that point stays in the pool, so the result never
    needs more SWAPs than the best routed sweep point.
    """
    candidates = []
    routed = [p for p in points if p.swaps is not None and p.result is not None]
    best = select_point(routed, 'swaps') if routed else None
    if circuit.is_commuting:
        pair_sets = {p.result.pairs for p in points if p.result is not None} or {()}
        for pairs in sorted(pair_sets, key=lambda s: (len(s), s)):
            try:
                candidates.append(map_commuting(circuit, coupling, calibration, pairs))
            except InfeasibleError as e:
                logging.warning(f"Pair set {list(pairs)} not mapped: {e}")
    else:
        candidates.append(map_regular(circuit, coupling, calibration))
        if best is not None:
            candidates.append(map_regular(best.result.circuit, coupling, calibration))
    if best is not None:
        candidates.append(map_baseline(best.result.circuit, coupling, calibration))
    if not candidates:
        raise InfeasibleError(f"no reuse level of '{circuit.name}' maps onto '{coupling.name}'")
    return min(candidates, key=lambda m: (m.swaps, m.metrics.duration))


def _qs(circuit: Circuit, cfg: RunConfig, hardware, durations: Durations) -> Union[TransformResult, Infeasible]:
    if cfg.qubit_limit is not None:
        return reduce_to_limit(circuit, cfg.qubit_limit, durations)
    if cfg.qubit_range is not None:
        coupling, calibration = hardware if hardware else (None, None)
        points = sweep(circuit, durations, coupling, calibration)
        return select_point(points, cfg.objective, cfg.qubit_range).result
    return maximal_reuse(circuit, durations)


def _counts(transformed: Circuit, scratch, num_clbits: int, cfg: RunConfig) -> dict:
    """Seeded shot counts of the transpiled circuit over the input's clbits"""
    dist = simulate_exact(transformed, scratch, output_clbits=num_clbits)
    return sample_shots(dist, cfg.shots, cfg.seed)


def transpile(circuit: Circuit, cfg: RunConfig) -> Union[TranspileOutcome, Infeasible]:
    hardware = cfg.hardware()
    durations = cfg.durations(hardware)

    if cfg.mode == 'qs':
        result = _qs(circuit, cfg, hardware, durations)
        if isinstance(result, Infeasible):
            return result
        mapped = map_baseline(result.circuit, *hardware) if hardware else None
        report = transform_report(result, mapped)
        if cfg.shots:
            report['counts'] = _counts(result.circuit, result.wire_map.scratch, circuit.num_clbits, cfg)
        return TranspileOutcome(result.circuit, report, result.pairs, mapped)

    coupling, calibration = hardware
    pairs: Tuple[Tuple[int, int], ...] = ()
    wire_map: Optional[WireMap] = None
    if cfg.qubit_limit is not None:
        result = reduce_to_limit(circuit, cfg.qubit_limit, durations)
        if isinstance(result, Infeasible):
            return result
        pairs, wire_map = result.pairs, result.wire_map
        if circuit.is_commuting:
            mapped = map_commuting(circuit, coupling, calibration, pairs)
        else:
            mapped = map_regular(result.circuit, coupling, calibration)
    else:
        points = sweep(circuit, durations, coupling, calibration)
        mapped = sr_min_swap(circuit, coupling, calibration, points)

    violations = verify_mapping(mapped, coupling)
    for v in violations:
        logging.error(f"Mapping violation: {v}")
    report = mapped.to_json()
    report['pairs'] = [list(p) for p in pairs]
    if wire_map is not None and pairs:
        wires = wire_map.to_json()
        wires['scratch'] = sorted(set(wires['scratch']) | set(mapped.scratch))
        report['wire_map'] = wires
    report['violations'] = violations
    if cfg.shots:
        report['counts'] = _counts(mapped.circuit, mapped.scratch, circuit.num_clbits, cfg)
    return TranspileOutcome(mapped.circuit, report, pairs, mapped)


@dataclass(frozen=True)
class Comparison:
    original: Distribution
    transformed: Distribution
    tvd: float

    @property
    def passed(self) -> bool:
        return self.tvd <= EQUIVALENCE_TOLERANCE

    def to_json(self) -> dict:
        return {
            'original': self.original.to_json(),
            'transformed': self.transformed.to_json(),
            'tvd': self.tvd,
            'result': 'PASS' if self.passed else 'FAIL',
        }


def compare_circuits(original: Circuit, transformed: Circuit, wire_map: Optional[WireMap] = None) -> Comparison:
    """Exact distributions of both circuits over the original clbits, and their TVD"""
    scratch = wire_map.scratch if wire_map is not None else ()
    p = simulate_exact(original)
    q = simulate_exact(transformed, scratch, output_clbits=original.num_clbits)
    tvd = total_variation_distance(p, q)
    logging.info(f"Compared '{original.name}' with '{transformed.name}': TVD {tvd:.3e}")
    return Comparison(p, q, tvd)

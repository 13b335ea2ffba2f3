"""
HTTP service exposing transpile, sweep and simulate over JSON
"""
from typing import Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel

from .circuit import CaqrError, InfeasibleError
from .config import DEFAULT_SEED
from .pipeline import RunConfig, compare_circuits, parse_qubit_range, transpile
from .qasm import emit_qasm, parse_qasm
from .qs_caqr import Infeasible, sweep
from .reports import sweep_frame
from .reuse import WireMap
from .simulator import sample_shots, simulate_exact

app = FastAPI(title='caqr')


class CircuitRequest(BaseModel):
    qasm: str
    name: str = 'circuit'


class TranspileRequest(CircuitRequest):
    mode: str = 'qs'
    qubit_limit: Optional[int] = None
    qubit_range: Optional[str] = None
    objective: str = 'duration'
    arch: Optional[str] = None
    builtin_reset: bool = False
    shots: Optional[int] = None
    seed: int = DEFAULT_SEED

    def run_config(self) -> RunConfig:
        return RunConfig(
            mode=self.mode,
            qubit_limit=self.qubit_limit,
            qubit_range=parse_qubit_range(self.qubit_range) if self.qubit_range else None,
            objective=self.objective,
            arch=self.arch,
            builtin_reset=self.builtin_reset,
            shots=self.shots,
            seed=self.seed,
        )


class SweepRequest(CircuitRequest):
    arch: Optional[str] = None
    builtin_reset: bool = False


class SimulateRequest(CircuitRequest):
    other: Optional[str] = None
    wire_map: Optional[dict] = None
    shots: Optional[int] = None
    seed: int = DEFAULT_SEED


@app.get("/health")
async def health():
    return {"status": "ok"}


@app.post("/transpile")
def transpile_endpoint(req: TranspileRequest):
    try:
        circuit = parse_qasm(req.qasm, name=req.name)
        outcome = transpile(circuit, req.run_config())
    except InfeasibleError as e:
        raise HTTPException(status_code=422, detail=str(e))
    except CaqrError as e:
        raise HTTPException(status_code=400, detail=str(e))
    if isinstance(outcome, Infeasible):
        raise HTTPException(status_code=422, detail=str(outcome))
    return {"qasm": emit_qasm(outcome.circuit), "report": outcome.report}


@app.post("/sweep")
def sweep_endpoint(req: SweepRequest):
    try:
        circuit = parse_qasm(req.qasm, name=req.name)
        cfg = RunConfig(arch=req.arch, builtin_reset=req.builtin_reset)
        hardware = cfg.hardware()
        coupling, calibration = hardware if hardware else (None, None)
        points = sweep(circuit, cfg.durations(hardware), coupling, calibration)
    except CaqrError as e:
        raise HTTPException(status_code=400, detail=str(e))
    # NaN is not valid JSON
    frame = sweep_frame(points).astype(object)
    return {"rows": frame.where(frame.notna(), None).to_dict(orient='records')}


@app.post("/simulate")
def simulate_endpoint(req: SimulateRequest):
    try:
        circuit = parse_qasm(req.qasm, name=req.name)
        if req.other is None:
            dist = simulate_exact(circuit)
            body = {"distribution": dist.to_json()}
            if req.shots:
                body["counts"] = sample_shots(dist, req.shots, req.seed)
            return body
        other = parse_qasm(req.other, name=f"{req.name}_transformed")
        wire_map = WireMap.from_json(req.wire_map, circuit.num_clbits) if req.wire_map else None
        return compare_circuits(circuit, other, wire_map).to_json()
    except CaqrError as e:
        raise HTTPException(status_code=400, detail=str(e))

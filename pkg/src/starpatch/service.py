"""Stateless HTTP design service.

Every request carries the full complex document; nothing is persisted
between calls. Invalid complexes return 400 with the validation report,
non-convergent packings 422.
"""

from __future__ import annotations

import json
import math

from fastapi import FastAPI, HTTPException, Request

from .complexes import parse
from .errors import NonConvergence, ParseError, StarpatchError
from .motif import ALL_NEIGHBORS_KEPT
from .patch import SCALE, optimize_tau
from .pipeline import run_pipeline
from .render import StyleConfig


def _load_complex(payload):
    if "complex" not in payload:
        raise HTTPException(status_code=400,
                            detail={"message": "body needs a 'complex' field"})
    try:
        return parse(json.dumps(payload["complex"]))
    except ParseError as exc:
        raise HTTPException(status_code=400, detail={
            "message": str(exc),
            "violations": [v.to_dict() for v in exc.violations],
        }) from exc


def _params(payload):
    p = payload.get("params") or {}
    return {
        "tau": float(p.get("tau", 0.8)),
        "theta": float(p.get("theta", 2.0 * math.pi / 5.0)),
        "trim_depth": int(p.get("trim_depth", 1)),
        "tau_mode": p.get("tau_mode", SCALE),
        "optimize": bool(p.get("optimize_tau", False)),
        "alpha_override": (None if p.get("alpha") is None else float(p["alpha"])),
        "filler_rule": p.get("filler_rule", ALL_NEIGHBORS_KEPT),
        "keep": (None if p.get("keep") is None
                 else frozenset(int(v) for v in p["keep"])),
        "stamp": tuple(p.get("stamp", (1, 1))),
    }


def create_app() -> FastAPI:
    app = FastAPI(title="starpatch design service", version="0.1.0")

    @app.get("/v1/health")
    def health():
        return {"status": "ok"}

    @app.post("/v1/design")
    async def design(request: Request):
        payload = await request.json()
        cx = _load_complex(payload)
        kw = _params(payload)
        try:
            result = run_pipeline(cx, **kw)
        except NonConvergence as exc:
            raise HTTPException(status_code=422,
                                detail={"message": str(exc)}) from exc
        except (StarpatchError, ValueError) as exc:
            raise HTTPException(status_code=400,
                                detail={"message": str(exc)}) from exc
        return {
            "packing": result.packing.to_json_dict(),
            "patch": result.patch.to_json_dict(),
            "design": result.design.to_json_dict(),
            "svg": result.svg(StyleConfig()).decode("utf-8"),
            "tau": result.tau,
        }

    @app.post("/v1/tau-sweep")
    async def tau_sweep(request: Request):
        payload = await request.json()
        cx = _load_complex(payload)
        p = payload.get("params") or {}
        lo = float(p.get("lo", 0.5))
        hi = float(p.get("hi", 0.95))
        step = float(p.get("step", 0.005))
        mode = p.get("tau_mode", SCALE)
        try:
            from .packing import SolverConfig, layout, solve_radii
            radii = solve_radii(cx, SolverConfig())
            packing = layout(cx, radii)
            best, curve = optimize_tau(packing, cx, sweep=(lo, hi, step),
                                       tau_mode=mode)
        except NonConvergence as exc:
            raise HTTPException(status_code=422,
                                detail={"message": str(exc)}) from exc
        except (StarpatchError, ValueError) as exc:
            raise HTTPException(status_code=400,
                                detail={"message": str(exc)}) from exc
        return {
            "taus": [t for t, _ in curve],
            "errors": [None if math.isinf(e) else e for _, e in curve],
            "best": best,
        }

    return app

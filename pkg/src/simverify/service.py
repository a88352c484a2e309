"""Stateless HTTP verification service.

Endpoints
---------
POST /verify    JSON grid body, returns scores and verdict.
GET  /healthz   Liveness check.
"""

from __future__ import annotations

import json

from fastapi import FastAPI, Request
from fastapi.responses import Response
from starlette.concurrency import run_in_threadpool

from .config import MapFormatError, ScoringConfig, Thresholds, mask_name, parse_mask
from .maps import loads_json_grid
from .pipeline import Assessor, verify
from .scoring import DEFAULT_CONFIG


def _json(body: dict, status: int = 200) -> Response:
    payload = json.dumps(body, sort_keys=True, separators=(",", ":")).encode()
    return Response(content=payload, status_code=status, media_type="application/json")


def create_app(
    config: ScoringConfig = DEFAULT_CONFIG,
    thresholds: Thresholds = Thresholds(),
    mask=None,
    assessor: Assessor | None = None,
) -> FastAPI:
    dims = parse_mask(mask)
    app = FastAPI(title="simverify", docs_url=None, redoc_url=None)

    @app.get("/healthz")
    def healthz() -> Response:
        return _json({"status": "ok", "assessor": assessor is not None, "mask": mask_name(dims)})

    @app.post("/verify")
    async def verify_route(request: Request) -> Response:
        raw = await request.body()
        try:
            response = loads_json_grid(raw)
        except MapFormatError as exc:
            return _json({"error": str(exc)}, status=400)
        # scoring is CPU-bound; keep it off the event loop
        verdict = await run_in_threadpool(verify, response, config, thresholds, dims, assessor)
        return _json(verdict.to_dict())

    return app


def serve(app: FastAPI, bind: str = "127.0.0.1:8000") -> None:
    import uvicorn

    host, _, port = bind.rpartition(":")
    uvicorn.run(app, host=host or "127.0.0.1", port=int(port), log_level="info")

"""HTTP surface of the scoring service.

Wire protocol (all JSON):
  GET  /healthz  -> {"status": "ok", "model_loaded": bool}
  GET  /info     -> {model_name, vocab_size, max_sequence_length, mask_token_id}
  POST /tokenize {"text": str} -> {"ids": [int], "tokens": [str]}
  POST /fill     {"ids": [int], "masked_positions": [int]} -> {"probs": [float]}
  POST /fill_batch {"requests": [fill-request, ...]} -> {"results": [{"probs": [...]}, ...]}

Tokenize returns content ids with no boundary specials; fill masks every
requested position in a single forward pass and returns the probability of
each ORIGINAL token, aligned with the request order. While a checkpoint is
still loading every model endpoint answers 503.
"""

from __future__ import annotations

import math
import threading
from contextlib import asynccontextmanager
from dataclasses import asdict

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field


class TokenizeRequest(BaseModel):
    text: str


class FillRequest(BaseModel):
    ids: list[int]
    masked_positions: list[int] = Field(default_factory=list)


class FillBatchRequest(BaseModel):
    requests: list[FillRequest]


def create_app(backend=None, loader=None) -> FastAPI:
    """Build the app around a ready backend, or a loader run in background.

    ``loader`` is a zero-argument callable returning a backend; it runs in a
    daemon thread started on startup so the service can answer health checks
    (and 503s) while the checkpoint loads.
    """
    @asynccontextmanager
    async def lifespan(app: FastAPI):
        if loader is not None:

            def _load():
                try:
                    app.state.backend = loader()
                except Exception as exc:  # surfaced via /healthz and 503 detail
                    app.state.load_error = str(exc)

            threading.Thread(target=_load, daemon=True).start()
        yield

    app = FastAPI(title="mlm-service", lifespan=lifespan)
    app.state.backend = backend
    app.state.load_error = None

    def require_backend():
        if app.state.backend is None:
            detail = "model is still loading"
            if app.state.load_error:
                detail = f"model failed to load: {app.state.load_error}"
            raise HTTPException(status_code=503, detail=detail)
        return app.state.backend

    @app.get("/healthz")
    def healthz():
        return {
            "status": "ok" if app.state.load_error is None else "error",
            "model_loaded": app.state.backend is not None,
        }

    @app.get("/info")
    def info():
        return asdict(require_backend().info())

    @app.post("/tokenize")
    def tokenize(request: TokenizeRequest):
        backend = require_backend()
        if not request.text.strip():
            raise HTTPException(status_code=400, detail="empty text")
        ids, tokens = backend.tokenize(request.text)
        limit = backend.max_sequence_length
        if len(ids) > limit:
            raise HTTPException(
                status_code=413,
                detail={
                    "error": "text too long after tokenization",
                    "n_ids": len(ids),
                    "max_ids": limit,
                    "required_splits": math.ceil(len(ids) / limit),
                },
            )
        return {"ids": ids, "tokens": tokens}

    def validate_fill(backend, request: FillRequest):
        if len(request.ids) > backend.max_sequence_length:
            raise HTTPException(
                status_code=413,
                detail=f"{len(request.ids)} ids exceed limit {backend.max_sequence_length}",
            )
        for token_id in request.ids:
            if not 0 <= token_id < backend.vocab_size:
                raise HTTPException(
                    status_code=422,
                    detail=f"token id {token_id} outside vocabulary of size {backend.vocab_size}",
                )
        for pos in request.masked_positions:
            if not 0 <= pos < len(request.ids):
                raise HTTPException(
                    status_code=400,
                    detail=f"masked position {pos} invalid for {len(request.ids)} ids",
                )

    @app.post("/fill")
    def fill(request: FillRequest):
        backend = require_backend()
        validate_fill(backend, request)
        return {"probs": backend.fill(request.ids, request.masked_positions)}

    @app.post("/fill_batch")
    def fill_batch(request: FillBatchRequest):
        backend = require_backend()
        for item in request.requests:
            validate_fill(backend, item)
        results = backend.fill_batch(
            [(item.ids, item.masked_positions) for item in request.requests]
        )
        return {"results": [{"probs": probs} for probs in results]}

    return app

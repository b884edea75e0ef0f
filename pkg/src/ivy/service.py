"""HTTP service: model management, question answering, simulation and
trace inspection over a plain JSON API.

Persistence is file-based (see ivy.storage); the in-memory registry and
its search indices are rebuilt from disk at startup.  A model upload is
parsed, validated, compiled to documents and indexed before it becomes
visible, so clients never observe a half-registered model.
"""

from __future__ import annotations

import json
import logging
import threading
from dataclasses import dataclass
from pathlib import Path

from fastapi import FastAPI, Request
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from .config import ServiceConfig, config_from_env, make_embedder, make_language_model
from .errors import IvyError, PipelineStageError, ProviderUnavailable, TmkSchemaError, TmkSyntaxError
from .generation import Answer
from .parser import parse_model
from .pipeline import ModelSession, answer, answer_to_dict
from .simulate import DerivationalTrace, render_trace_summary, simulate, summarize_trace, trace_to_dict
from .storage import Storage
from .validation import validate_model

log = logging.getLogger(__name__)

DEFAULT_UI_DIR = Path("frontend/dist")


# Wire format -----------------------------------------------------------------
# The CLI's --json output must match these bodies byte for byte, so both
# sides build payloads with the same functions and serialize identically.

def ask_payload(model_id: str, result: Answer, session_id: str | None = None) -> dict:
    return {"model_id": model_id, "session_id": session_id, **answer_to_dict(result)}


def simulate_payload(trace: DerivationalTrace) -> dict:
    payload = trace_to_dict(trace)
    payload["summary"] = render_trace_summary(summarize_trace(trace))
    return payload


def to_json_bytes(payload: dict) -> bytes:
    # Same arguments fastapi's JSONResponse.render uses.
    return json.dumps(
        payload, ensure_ascii=False, allow_nan=False, indent=None, separators=(",", ":")
    ).encode("utf-8")


# Registry --------------------------------------------------------------------

@dataclass(frozen=True)
class RegisteredModel:
    """A model accepted by the service: original text plus compiled session."""

    text: str
    session: ModelSession
    warnings: tuple[str, ...] = ()

    @property
    def model(self):
        return self.session.model


def model_summary_payload(registered: RegisteredModel) -> dict:
    model = registered.model
    counts = model.summary_counts()
    return {
        "id": model.id,
        "title": model.title,
        "tasks": counts["tasks"],
        "methods": counts["methods"],
        "knowledge": counts["knowledge"],
        "documents": len(registered.session.documents),
        "warnings": list(registered.warnings),
    }


class DuplicateModel(IvyError):
    def __init__(self, model_id: str):
        self.model_id = model_id
        super().__init__(f"model {model_id!r} is already registered")


class ModelRejected(IvyError):
    """Model failed validation; carries the full report."""

    def __init__(self, errors: list[str], warnings: list[str]):
        self.errors = list(errors)
        self.warnings = list(warnings)
        super().__init__(f"{len(self.errors)} validation error(s)")


class Registry:
    """Thread-safe model registry; disk write and map insert happen under
    one lock so registration is all-or-nothing."""

    def __init__(self, storage: Storage, embedder):
        self.storage = storage
        self.embedder = embedder
        self._models: dict[str, RegisteredModel] = {}
        self._lock = threading.Lock()

    def _compile(self, text: str) -> RegisteredModel:
        model = parse_model(text)
        report = validate_model(model)
        if not report.valid:
            raise ModelRejected(report.errors, report.warnings)
        session = ModelSession.build(model, self.embedder)
        return RegisteredModel(text=text, session=session, warnings=tuple(report.warnings))

    def load_persisted(self) -> None:
        for model_id in self.storage.list_model_ids():
            try:
                registered = self._compile(self.storage.load_model_text(model_id))
            except IvyError as exc:
                log.warning("skipping persisted model %r: %s", model_id, exc)
                continue
            with self._lock:
                self._models[registered.model.id] = registered

    def register(self, text: str, replace: bool = False) -> RegisteredModel:
        registered = self._compile(text)
        model_id = registered.model.id
        with self._lock:
            if not replace and model_id in self._models:
                raise DuplicateModel(model_id)
            self.storage.save_model_text(model_id, text)
            self._models[model_id] = registered
        return registered

    def get(self, model_id: str) -> RegisteredModel | None:
        with self._lock:
            return self._models.get(model_id)

    def list(self) -> list[RegisteredModel]:
        with self._lock:
            return [self._models[k] for k in sorted(self._models)]


# Application -----------------------------------------------------------------

class AskBody(BaseModel):
    model_id: str
    question: str
    session_id: str | None = None


class SimulateBody(BaseModel):
    model_id: str
    task_id: str
    initial_state: dict | None = None
    step_limit: int | None = None


def _error(status: int, detail: str) -> JSONResponse:
    return JSONResponse(status_code=status, content={"detail": detail})


def _validation_error(errors: list[str], warnings: list[str] | None = None) -> JSONResponse:
    return JSONResponse(
        status_code=400, content={"errors": errors, "warnings": warnings or []}
    )


def _provider_failure(exc: IvyError) -> IvyError | None:
    if isinstance(exc, ProviderUnavailable):
        return exc
    if isinstance(exc, PipelineStageError) and isinstance(exc.cause, ProviderUnavailable):
        return exc.cause
    return None


def create_app(config: ServiceConfig | None = None) -> FastAPI:
    """Build the service; raises ConfigError for unusable provider settings
    and OSError for an unwritable storage directory."""
    config = config_from_env() if config is None else config
    storage = Storage(config.storage_dir)
    embedder = make_embedder(config)
    language_model = make_language_model(config)
    registry = Registry(storage, embedder)
    registry.load_persisted()

    app = FastAPI(title="ivy", docs_url=None, redoc_url=None)
    app.state.config = config
    app.state.registry = registry
    app.state.storage = storage

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "models": len(registry.list())}

    @app.get("/models")
    def list_models() -> dict:
        return {"models": [model_summary_payload(r) for r in registry.list()]}

    @app.post("/models")
    async def upload_model(request: Request, replace: bool = False):
        raw = await request.body()
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError:
            return _validation_error(["request body is not valid UTF-8"])
        try:
            registered = registry.register(text, replace=replace)
        except (TmkSyntaxError, TmkSchemaError) as exc:
            return _validation_error([str(exc)])
        except ModelRejected as exc:
            return _validation_error(exc.errors, exc.warnings)
        except DuplicateModel as exc:
            return _error(409, str(exc))
        return JSONResponse(status_code=201, content=model_summary_payload(registered))

    @app.get("/models/{model_id}")
    def get_model(model_id: str):
        registered = registry.get(model_id)
        if registered is None:
            return _error(404, f"model {model_id!r} is not registered")
        payload = model_summary_payload(registered)
        payload["documents_detail"] = [
            {"doc_id": d.doc_id, "category": d.category, "title": d.title}
            for d in registered.session.documents
        ]
        return payload

    @app.post("/ask")
    def ask(body: AskBody):
        registered = registry.get(body.model_id)
        if registered is None:
            return _error(404, f"model {body.model_id!r} is not registered")
        if not body.question.strip():
            return _error(422, "question is empty")
        if body.session_id is not None:
            try:
                storage.touch_session(body.session_id, body.model_id)
            except ValueError as exc:
                return _error(409, str(exc))
        try:
            result = answer(
                body.question,
                registered.session,
                language_model,
                embedder,
                trace_store=storage,
            )
        except IvyError as exc:
            provider_exc = _provider_failure(exc)
            if provider_exc is not None:
                return _error(502, str(provider_exc))
            return _error(500, str(exc))
        return ask_payload(body.model_id, result, body.session_id)

    @app.post("/simulate")
    def run_simulation(body: SimulateBody):
        registered = registry.get(body.model_id)
        if registered is None:
            return _error(404, f"model {body.model_id!r} is not registered")
        model = registered.model
        try:
            model.task(body.task_id)
        except KeyError:
            return _validation_error([f"model has no task {body.task_id!r}"])
        initial = body.initial_state if body.initial_state is not None else model.default_initial
        if initial is None:
            return _validation_error(
                ["no initial state given and the model declares no default_initial"]
            )
        if body.step_limit is not None and body.step_limit < 1:
            return _validation_error([f"step_limit must be positive, got {body.step_limit}"])
        kwargs = {"store": storage}
        if body.step_limit is not None:
            kwargs["step_limit"] = body.step_limit
        try:
            trace = simulate(model, body.task_id, initial, **kwargs)
        except IvyError as exc:
            return _validation_error([str(exc)])
        return simulate_payload(trace)

    @app.get("/traces/{trace_id}")
    def get_trace(trace_id: str):
        if not storage.has_trace(trace_id):
            return _error(404, f"no trace {trace_id!r}")
        return trace_to_dict(storage.load_trace(trace_id))

    ui_dir = config.ui_dir if config.ui_dir is not None else DEFAULT_UI_DIR
    if ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app

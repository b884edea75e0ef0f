"""Plain-file persistence for models, traces and session records.

Layout under the storage root:

    models/<model_id>.tmk.json   original model text as uploaded
    traces/<trace_id>.json       one derivational trace per file
    sessions.json                all session records, keyed by session id

No database: the corpus is desk-scale and the files double as inspectable
fixtures.  Writes go through a temp file and rename so a crash never leaves
a half-written record, and a lock serializes writes (which covers the
per-trace-id serialization the service needs).
"""

from __future__ import annotations

import json
import os
import tempfile
import threading
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

from .simulate import DerivationalTrace, trace_from_dict, trace_to_dict

_MODEL_SUFFIX = ".tmk.json"


@dataclass
class SessionRecord:
    """Binds a session id to a model and counts its questions."""

    session_id: str
    model_id: str
    created_at: str
    question_count: int = 0

    def to_dict(self) -> dict:
        return {
            "session_id": self.session_id,
            "model_id": self.model_id,
            "created_at": self.created_at,
            "question_count": self.question_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "SessionRecord":
        return cls(
            session_id=data["session_id"],
            model_id=data["model_id"],
            created_at=data["created_at"],
            question_count=data.get("question_count", 0),
        )

    @classmethod
    def new(cls, session_id: str, model_id: str) -> "SessionRecord":
        now = datetime.now(timezone.utc).isoformat(timespec="seconds")
        return cls(session_id=session_id, model_id=model_id, created_at=now)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


class Storage:
    """File-backed store rooted at one directory; safe for concurrent use
    and usable as the trace store the simulator writes through."""

    def __init__(self, root: Path | str):
        self.root = Path(root)
        self.models_dir = self.root / "models"
        self.traces_dir = self.root / "traces"
        self.sessions_path = self.root / "sessions.json"
        self.models_dir.mkdir(parents=True, exist_ok=True)
        self.traces_dir.mkdir(parents=True, exist_ok=True)
        self._lock = threading.Lock()

    # Models ------------------------------------------------------------------

    def model_path(self, model_id: str) -> Path:
        return self.models_dir / f"{model_id}{_MODEL_SUFFIX}"

    def save_model_text(self, model_id: str, text: str) -> Path:
        path = self.model_path(model_id)
        with self._lock:
            _atomic_write(path, text)
        return path

    def load_model_text(self, model_id: str) -> str:
        return self.model_path(model_id).read_text()

    def has_model(self, model_id: str) -> bool:
        return self.model_path(model_id).exists()

    def delete_model(self, model_id: str) -> None:
        with self._lock:
            self.model_path(model_id).unlink(missing_ok=True)

    def list_model_ids(self) -> list[str]:
        names = [
            p.name[: -len(_MODEL_SUFFIX)]
            for p in self.models_dir.iterdir()
            if p.name.endswith(_MODEL_SUFFIX)
        ]
        return sorted(names)

    # Traces ------------------------------------------------------------------

    def trace_path(self, trace_id: str) -> Path:
        return self.traces_dir / f"{trace_id}.json"

    def save_trace(self, trace: DerivationalTrace) -> Path:
        path = self.trace_path(trace.trace_id)
        payload = json.dumps(trace_to_dict(trace), indent=2) + "\n"
        with self._lock:
            _atomic_write(path, payload)
        return path

    def has_trace(self, trace_id: str) -> bool:
        return self.trace_path(trace_id).exists()

    def load_trace(self, trace_id: str) -> DerivationalTrace:
        return trace_from_dict(json.loads(self.trace_path(trace_id).read_text()))

    def list_trace_ids(self) -> list[str]:
        return sorted(p.stem for p in self.traces_dir.glob("*.json"))

    # Sessions ----------------------------------------------------------------

    def load_sessions(self) -> dict[str, SessionRecord]:
        if not self.sessions_path.exists():
            return {}
        raw = json.loads(self.sessions_path.read_text())
        return {k: SessionRecord.from_dict(v) for k, v in raw.items()}

    def save_sessions(self, sessions: dict[str, SessionRecord]) -> None:
        payload = json.dumps(
            {k: v.to_dict() for k, v in sorted(sessions.items())}, indent=2
        ) + "\n"
        with self._lock:
            _atomic_write(self.sessions_path, payload)

    def touch_session(self, session_id: str, model_id: str) -> SessionRecord:
        """Create the session on first use, then bump its question count.
        Raises ValueError when the id is already bound to another model."""
        with self._lock:
            if self.sessions_path.exists():
                raw = json.loads(self.sessions_path.read_text())
                sessions = {k: SessionRecord.from_dict(v) for k, v in raw.items()}
            else:
                sessions = {}
            record = sessions.get(session_id)
            if record is None:
                record = SessionRecord.new(session_id, model_id)
            elif record.model_id != model_id:
                raise ValueError(
                    f"session {session_id!r} is bound to model {record.model_id!r}"
                )
            record.question_count += 1
            sessions[session_id] = record
            payload = json.dumps(
                {k: v.to_dict() for k, v in sorted(sessions.items())}, indent=2
            ) + "\n"
            _atomic_write(self.sessions_path, payload)
            return record

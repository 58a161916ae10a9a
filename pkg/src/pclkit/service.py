"""HTTP service for annotation sessions, label submission, adjudication, reports.

The service is a thin, lossless view over the annotation and evaluation
modules: every report obtainable here is byte-equal (in its
machine-readable part) to the corresponding library call.  Auth is a
static bearer-token file mapping tokens to annotator ids and roles; all
session mutations funnel through the per-session lock and are flushed to
disk so a crash never loses annotation labor.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from fastapi import Depends, FastAPI, Header, HTTPException, Query, Request, Response
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import annotation as ann
from .model import LabelRecord, ValidationError, canonical_json

ANNOTATION_TIPS = {
    "EN": "Judge the binary layer first; only PCL texts get subcategories, "
          "group and intensity. When unsure between mild and none, prefer "
          "mild and leave a conflict for proofreading.",
    "ZH": "先判断是否属于居高临下言论；仅当判定为是时再选择子类别、群体和强度。"
          "在轻微与无之间犹豫时优先选择轻微，分歧交由校对员裁决。",
}

LAYER_SCHEMA = {
    "layers": ["pcl", "subcategories", "group", "intensity"],
    "subcategories": ["UNBALANCED_POWER", "SPECTATOR", "PREJUDICE", "APPEAL", "COMPASSION"],
    "groups": ["DISABLED", "WOMEN", "ELDERLY", "CHILDREN", "SINGLE_PARENT",
               "ORDINARY", "DISADVANTAGED", "OTHER"],
    "intensities": ["MILD", "MODERATE", "SEVERE"],
}


@dataclass(frozen=True)
class ApiToken:
    token: str
    annotator_id: str
    role: str


class TokenStore:
    """``token<TAB>annotator_id<TAB>role`` per line."""

    def __init__(self, tokens: dict):
        self._tokens = tokens

    @classmethod
    def load(cls, path) -> "TokenStore":
        tokens = {}
        for line in Path(path).read_text(encoding="utf-8").splitlines():
            if not line.strip():
                continue
            token, annotator_id, role = line.split("\t")
            tokens[token] = ApiToken(token, annotator_id, role)
        return cls(tokens)

    def resolve(self, token: str) -> Optional[ApiToken]:
        return self._tokens.get(token)


class SessionStore:
    """Sessions held in memory, flushed atomically on every mutation."""

    def __init__(self, directory=None):
        self._dir = Path(directory) if directory else None
        self.sessions: dict = {}
        if self._dir:
            self._dir.mkdir(parents=True, exist_ok=True)
            for f in sorted(self._dir.glob("*.session.json")):
                session = ann.AnnotationSession.load(f)
                self.sessions[session.session_id] = session

    def add(self, session: ann.AnnotationSession) -> None:
        self.sessions[session.session_id] = session
        self.flush(session)

    def get(self, session_id: Optional[str]) -> ann.AnnotationSession:
        if session_id is None:
            if len(self.sessions) == 1:
                return next(iter(self.sessions.values()))
            raise HTTPException(status_code=404, detail="session parameter required")
        session = self.sessions.get(session_id)
        if session is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id!r}")
        return session

    def flush(self, session: ann.AnnotationSession) -> None:
        if not self._dir:
            return
        target = self._dir / f"{session.session_id}.session.json"
        fd, tmp = tempfile.mkstemp(dir=self._dir, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as fh:
                fh.write(canonical_json(session.to_dict()))
            os.replace(tmp, target)
        finally:
            if os.path.exists(tmp):
                os.unlink(tmp)


class LabelBody(BaseModel):
    session: Optional[str] = None
    doc_id: str
    annotator_id: str
    round: str = "PRIMARY"
    pcl: bool
    subcategories: list = []
    group: Optional[str] = None
    intensity: str = "NONE"
    dpm_level: Optional[int] = None


class ResolutionBody(LabelBody):
    pass


def _gating_errors(body: LabelBody) -> list:
    errors = []
    if not body.pcl:
        if body.subcategories:
            errors.append({"field": "subcategories",
                           "reason": "subcategories require pcl=true"})
        if body.intensity not in ("NONE", None):
            errors.append({"field": "intensity",
                           "reason": "intensity requires pcl=true"})
    else:
        if not body.subcategories:
            errors.append({"field": "subcategories",
                           "reason": "pcl=true requires at least one subcategory"})
    if body.dpm_level is not None and not 0 <= body.dpm_level <= 4:
        errors.append({"field": "dpm_level", "reason": "dpm_level outside 0..4"})
    return errors


def _record_from_body(body: LabelBody) -> LabelRecord:
    errors = _gating_errors(body)
    if errors:
        raise HTTPException(status_code=422, detail={"errors": errors})
    try:
        return LabelRecord.from_dict(body.model_dump(exclude={"session"}))
    except ValidationError as exc:
        raise HTTPException(status_code=422,
                            detail={"errors": [{"field": "record", "reason": str(exc)}]})


def _canonical_response(obj) -> Response:
    return Response(content=canonical_json(obj), media_type="application/json")


def create_app(
    session_store: SessionStore,
    token_store: TokenStore,
    eval_runs_dir=None,
    static_dir=None,
) -> FastAPI:
    app = FastAPI(title="pclkit annotation service")
    eval_dir = Path(eval_runs_dir) if eval_runs_dir else None

    def auth(authorization: Optional[str] = Header(default=None)) -> ApiToken:
        if not authorization or not authorization.startswith("Bearer "):
            raise HTTPException(status_code=401, detail="missing bearer token")
        token = token_store.resolve(authorization[len("Bearer "):])
        if token is None:
            raise HTTPException(status_code=401, detail="invalid token")
        return token

    @app.get("/api/tasks/next")
    def next_task(
        annotator: str,
        session: Optional[str] = None,
        token: ApiToken = Depends(auth),
    ):
        sess = session_store.get(session)
        if annotator not in sess.annotators:
            raise HTTPException(status_code=404, detail=f"unknown annotator {annotator!r}")
        pending = sess.pending_docs(annotator)
        if not pending:
            return Response(status_code=204)
        doc = sess.docs[pending[0]]
        total = sum(1 for d in sess.docs
                    if annotator in sess.assignment.get(d, ()))
        return _canonical_response({
            "session": sess.session_id,
            "doc_id": doc.id,
            "text": doc.text,
            "language": doc.language.value,
            "layer_schema": LAYER_SCHEMA,
            "tips": ANNOTATION_TIPS.get(doc.language.value, ANNOTATION_TIPS["EN"]),
            "remaining": len(pending),
            "total": total,
        })

    @app.post("/api/labels")
    def post_label(body: LabelBody, token: ApiToken = Depends(auth)):
        if token.role not in (ann.Role.PRIMARY, ann.Role.ADMIN):
            raise HTTPException(status_code=403, detail="primary role required")
        if token.annotator_id != body.annotator_id:
            raise HTTPException(status_code=403,
                                detail="token does not match record annotator")
        sess = session_store.get(body.session)
        record = _record_from_body(body)
        try:
            ann.submit_label(sess, body.annotator_id, record)
        except ann.SessionError as exc:
            raise HTTPException(status_code=409, detail=str(exc))
        session_store.flush(sess)
        return _canonical_response({"stored": record.to_dict(), "status": "SUBMITTED"})

    @app.get("/api/reports/iaa")
    def iaa_report(session: Optional[str] = None, token: ApiToken = Depends(auth)):
        sess = session_store.get(session)
        pairs = sess.annotated_pairs()
        if not pairs:
            raise HTTPException(
                status_code=409,
                detail="IAA needs at least one doubly-annotated item",
            )
        report = ann.compute_iaa_report(pairs)
        return _canonical_response(report.to_dict())

    @app.get("/api/reports/eval")
    def eval_report(run: str, token: ApiToken = Depends(auth)):
        if eval_dir is None:
            raise HTTPException(status_code=404, detail="no eval runs configured")
        path = eval_dir / f"{run}.json"
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"unknown run {run!r}")
        return Response(content=path.read_bytes(), media_type="application/json")

    @app.get("/api/adjudication")
    def adjudication(
        session: Optional[str] = None,
        cursor: int = Query(default=0, ge=0),
        limit: int = Query(default=50, ge=1, le=500),
        token: ApiToken = Depends(auth),
    ):
        sess = session_store.get(session)
        queue = [c.to_dict() for c in ann.adjudication_queue(sess)]
        session_store.flush(sess)  # auto-agreed finals may have been set
        page = queue[cursor:cursor + limit]
        next_cursor = cursor + limit if cursor + limit < len(queue) else None
        return _canonical_response({
            "items": page,
            "next_cursor": next_cursor,
            "total": len(queue),
        })

    @app.post("/api/adjudication/resolve")
    def resolve(body: ResolutionBody, token: ApiToken = Depends(auth)):
        if token.role not in (ann.Role.PROOFREADER, ann.Role.ADMIN):
            raise HTTPException(status_code=403, detail="proofreader role required")
        sess = session_store.get(body.session)
        record = _record_from_body(body)
        try:
            ann.resolve_conflict(sess, token.annotator_id, record)
        except ann.SessionError as exc:
            raise HTTPException(status_code=403, detail=str(exc))
        session_store.flush(sess)
        return _canonical_response({"final": record.to_dict()})

    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app

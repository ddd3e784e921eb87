"""HTTP service backing the explorer UI.

Uploads are cached on disk keyed by content hash (no database); every
response is a pure function of the uploaded bytes and query parameters, so
repeated identical requests return identical payloads.  Variant lists per
(granularity, tiebreaker) are memoized per session; caches are insert-only
and racing recomputations publish identical values.

Error mapping: 400 malformed input, 404 unknown id/key, 409 tiebreaker
conflict, 422 inconsistent log, 507 resource limit.
"""

from __future__ import annotations

import email.parser
import email.policy
import hashlib
import json
import os
import tempfile
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.responses import JSONResponse

from .errors import (
    CyclicOrder,
    InconsistentLog,
    OrdlogError,
    ResourceLimit,
    TiebreakerConflict,
)
from .export import write_simplified_csv, write_simplified_xes
from .ingest import IngestConfig, parse_log
from .model import EventLog, Granularity, check_consistency
from .preprocess import TimeAggregator, Tiebreaker
from .preprocess import apply as apply_preprocessing
from .sequentialize import SamplerConfig, k_sequentialize_runs
from .variants import group_variants, variant_to_json

SCHEMA_VERSION = 1
DEFAULT_PAGE_SIZE = 50
_DEFAULT_TB_GRANULARITY = Granularity.HOUR  # the explorer's initial aggregation level


def _data_dir(explicit: str | None) -> Path:
    path = explicit or os.environ.get("ORDLOG_DATA_DIR") or str(
        Path(tempfile.gettempdir()) / "ordlog-data"
    )
    p = Path(path)
    p.mkdir(parents=True, exist_ok=True)
    return p


@dataclass
class LogSession:
    log_id: str
    base: EventLog
    timezone: str
    tiebreakers: dict[str, Tiebreaker] = field(default_factory=dict)
    variants_cache: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def tiebreaker(self, tb_id: str | None) -> Tiebreaker | None:
        if tb_id is None:
            return None
        tb = self.tiebreakers.get(tb_id)
        if tb is None:
            raise HTTPException(404, f"unknown tiebreaker_id {tb_id!r}")
        return tb

    def variants_for(self, granularity: Granularity, tb_id: str | None):
        key = (int(granularity), tb_id)
        cached = self.variants_cache.get(key)
        if cached is not None:
            return cached
        tb = self.tiebreaker(tb_id)
        pre = apply_preprocessing(
            self.base, TimeAggregator(granularity, self.timezone), tb
        )
        variants = group_variants(pre)
        with self.lock:
            self.variants_cache.setdefault(key, variants)
        return self.variants_cache[key]

    def preprocessed(self, granularity: Granularity | None, tb_id: str | None) -> EventLog:
        tb = self.tiebreaker(tb_id)
        if granularity is None and tb is None:
            return self.base
        ta = TimeAggregator(granularity or Granularity.MILLISECOND, self.timezone)
        return apply_preprocessing(self.base, ta, tb)


class LogStore:
    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.sessions: dict[str, LogSession] = {}
        self.lock = threading.Lock()

    def add(self, raw: bytes, cfg_json: dict) -> LogSession:
        digest = hashlib.sha256(
            raw + json.dumps(cfg_json, sort_keys=True).encode()
        ).hexdigest()[:16]
        with self.lock:
            if digest in self.sessions:
                return self.sessions[digest]
        cfg = IngestConfig.from_dict(cfg_json)
        log = parse_log(raw, cfg)
        (self.data_dir / f"{digest}.bin").write_bytes(raw)
        (self.data_dir / f"{digest}.json").write_text(json.dumps(cfg_json, sort_keys=True))
        session = LogSession(log_id=digest, base=log, timezone=cfg.timezone)
        with self.lock:
            self.sessions.setdefault(digest, session)
        return self.sessions[digest]

    def get(self, log_id: str) -> LogSession:
        session = self.sessions.get(log_id)
        if session is not None:
            return session
        raw_path = self.data_dir / f"{log_id}.bin"
        cfg_path = self.data_dir / f"{log_id}.json"
        if raw_path.exists() and cfg_path.exists():
            cfg_json = json.loads(cfg_path.read_text())
            cfg = IngestConfig.from_dict(cfg_json)
            log = parse_log(raw_path.read_bytes(), cfg)
            session = LogSession(log_id=log_id, base=log, timezone=cfg.timezone)
            with self.lock:
                self.sessions.setdefault(log_id, session)
            return self.sessions[log_id]
        raise HTTPException(404, f"unknown log id {log_id!r}")


def _parse_multipart(body: bytes, content_type: str) -> dict[str, bytes]:
    """Minimal multipart/form-data parsing via the stdlib email machinery."""
    header = f"Content-Type: {content_type}\r\nMIME-Version: 1.0\r\n\r\n".encode()
    msg = email.parser.BytesParser(policy=email.policy.HTTP).parsebytes(header + body)
    if not msg.is_multipart():
        raise HTTPException(400, "expected multipart/form-data body")
    parts: dict[str, bytes] = {}
    for part in msg.iter_parts():
        name = part.get_param("name", header="content-disposition")
        if name is None:
            continue
        payload = part.get_payload(decode=True)
        parts[str(name)] = payload if payload is not None else b""
    return parts


def _granularity_param(value: str) -> Granularity:
    try:
        return Granularity.from_name(value)
    except ValueError as exc:
        raise HTTPException(400, str(exc)) from exc


def create_app(data_dir: str | None = None) -> FastAPI:
    app = FastAPI(title="ordlog service", version="0.1.0")
    # the explorer UI is served as static files from another origin
    from fastapi.middleware.cors import CORSMiddleware

    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
        expose_headers=["Content-Disposition", "X-Trace-Count"],
    )
    store = LogStore(_data_dir(data_dir))
    app.state.store = store

    @app.exception_handler(OrdlogError)
    async def _domain_error(request: Request, exc: OrdlogError):
        if isinstance(exc, InconsistentLog):
            return JSONResponse(
                status_code=422,
                content={
                    "detail": str(exc),
                    "violations": [
                        {
                            "first_id": v.first_id,
                            "second_id": v.second_id,
                            "first_time": v.first_time,
                            "second_time": v.second_time,
                        }
                        for v in exc.report.violations[:100]
                    ],
                },
            )
        if isinstance(exc, TiebreakerConflict):
            return JSONResponse(
                status_code=409,
                content={"detail": str(exc), "conflicts": _conflicts_json(exc.conflicts)},
            )
        if isinstance(exc, ResourceLimit):
            return JSONResponse(status_code=507, content={"detail": str(exc)})
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    @app.get("/health")
    def health():
        return {"status": "ok", "schema_version": SCHEMA_VERSION}

    @app.post("/logs")
    async def upload_log(request: Request):
        content_type = request.headers.get("content-type", "")
        body = await request.body()
        if "multipart/form-data" not in content_type:
            raise HTTPException(400, "upload must be multipart/form-data with a 'file' part")
        parts = _parse_multipart(body, content_type)
        if "file" not in parts:
            raise HTTPException(400, "missing 'file' part")
        cfg_json = {}
        if "config" in parts:
            try:
                cfg_json = json.loads(parts["config"].decode("utf-8"))
            except (UnicodeDecodeError, json.JSONDecodeError) as exc:
                raise HTTPException(400, f"config part is not valid JSON: {exc}") from exc
        if "edges" in parts:
            cfg_json["edge_list"] = parts["edges"].decode("utf-8")
        try:
            session = store.add(parts["file"], cfg_json)
        except (TypeError, ValueError) as exc:
            raise HTTPException(400, f"bad ingest config: {exc}") from exc
        log = session.base
        report = check_consistency(log, max_violations=1)
        return {
            "schema_version": SCHEMA_VERSION,
            "log_id": session.log_id,
            "summary": {
                "events": len(log),
                "cases": len(log.case_table) if len(log) else 0,
                "activities": len(set(log.acts.tolist())),
                "order_pairs": int(len(log.order_pairs)),
                "consistent": report.consistent,
            },
        }

    @app.get("/logs/{log_id}/consistency")
    def consistency(log_id: str):
        session = store.get(log_id)
        report = check_consistency(session.base, max_violations=1000)
        return {
            "schema_version": SCHEMA_VERSION,
            "consistent": report.consistent,
            "time_constrained": report.time_constrained,
            "order_constrained": report.order_constrained,
            "violations_truncated": report.violations_truncated,
            "violations": [
                {
                    "first_id": v.first_id,
                    "second_id": v.second_id,
                    "first_time": v.first_time,
                    "second_time": v.second_time,
                }
                for v in report.violations
            ],
        }

    @app.get("/logs/{log_id}/variants")
    def variants(
        log_id: str,
        granularity: str,
        tiebreaker_id: str | None = None,
        page: int = 1,
        page_size: int = DEFAULT_PAGE_SIZE,
    ):
        session = store.get(log_id)
        gran = _granularity_param(granularity)
        if page < 1 or page_size < 1:
            raise HTTPException(400, "page and page_size must be positive")
        all_variants = session.variants_for(gran, tiebreaker_id)
        start = (page - 1) * page_size
        chunk = all_variants[start : start + page_size]
        return {
            "schema_version": SCHEMA_VERSION,
            "granularity": str(gran),
            "tiebreaker_id": tiebreaker_id,
            "total_variants": len(all_variants),
            "total_cases": sum(v.frequency for v in all_variants),
            "page": page,
            "page_size": page_size,
            "variants": [variant_to_json(v) for v in chunk],
        }

    @app.get("/logs/{log_id}/variants/{key}")
    def variant_detail(
        log_id: str, key: str, granularity: str, tiebreaker_id: str | None = None
    ):
        session = store.get(log_id)
        gran = _granularity_param(granularity)
        for v in session.variants_for(gran, tiebreaker_id):
            if v.canonical_key == key:
                doc = variant_to_json(v)
                doc["schema_version"] = SCHEMA_VERSION
                doc["granularity"] = str(gran)
                return doc
        raise HTTPException(404, f"no variant with key {key!r} at granularity {gran}")

    @app.put("/logs/{log_id}/tiebreaker")
    async def put_tiebreaker(
        log_id: str, request: Request, granularity: str = str(_DEFAULT_TB_GRANULARITY)
    ):
        session = store.get(log_id)
        gran = _granularity_param(granularity)
        text = (await request.body()).decode("utf-8", errors="replace")
        try:
            tb = Tiebreaker.from_text(text)
        except ValueError as exc:
            raise HTTPException(400, str(exc)) from exc
        except CyclicOrder as exc:
            raise HTTPException(400, f"tiebreaker is not a strict partial order: {exc}") from exc
        aggregated = apply_preprocessing(
            session.base, TimeAggregator(gran, session.timezone)
        )
        from .preprocess import validate_tiebreaker

        conflicts = validate_tiebreaker(tb, aggregated)
        if conflicts:
            return JSONResponse(
                status_code=409,
                content={
                    "schema_version": SCHEMA_VERSION,
                    "detail": "tiebreaker conflicts with the explicit order",
                    "conflicts": _conflicts_json(conflicts),
                },
            )
        tb_id = hashlib.sha256(
            "\n".join(sorted(f"{a}->{b}" for a, b in tb.pairs)).encode()
        ).hexdigest()[:12]
        with session.lock:
            session.tiebreakers.setdefault(tb_id, tb)
        return {
            "schema_version": SCHEMA_VERSION,
            "tiebreaker_id": tb_id,
            "pairs": sorted(list(p) for p in tb.pairs),
            "conflicts": [],
        }

    @app.post("/logs/{log_id}/sequentialize")
    async def sequentialize(log_id: str, request: Request):
        session = store.get(log_id)
        try:
            spec = await request.json()
        except Exception as exc:
            raise HTTPException(400, f"body must be JSON: {exc}") from exc
        k = spec.get("k", 1)
        seed = spec.get("seed", 0)
        fmt = spec.get("format", "xes")
        if not isinstance(k, int) or k < 1:
            raise HTTPException(400, "k must be a positive integer")
        if fmt not in ("xes", "csv"):
            raise HTTPException(400, "format must be 'xes' or 'csv'")
        gran = spec.get("granularity")
        granularity = _granularity_param(gran) if gran is not None else None
        log = session.preprocessed(granularity, spec.get("tiebreaker_id"))
        runs = k_sequentialize_runs(log, k, SamplerConfig(seed=int(seed)))
        triples = [(r.case_id, i % k + 1, r.event_indices) for i, r in enumerate(runs)]
        if fmt == "xes":
            payload = write_simplified_xes(log, triples)
            media = "application/xml"
        else:
            payload = write_simplified_csv(log, triples)
            media = "text/csv"
        return Response(
            content=payload,
            media_type=media,
            headers={
                "Content-Disposition": f'attachment; filename="{log_id}-k{k}.{fmt}"',
                "X-Trace-Count": str(len(runs)),
            },
        )

    @app.get("/logs/{log_id}/granularities")
    def granularities(log_id: str, tiebreaker_id: str | None = None):
        session = store.get(log_id)
        levels = []
        for g in Granularity:
            variants = session.variants_for(g, tiebreaker_id)
            levels.append({"granularity": str(g), "variant_count": len(variants)})
        return {"schema_version": SCHEMA_VERSION, "levels": levels}

    return app


def _conflicts_json(conflicts) -> list[dict]:
    return [
        {
            "first_id": c.first_id,
            "second_id": c.second_id,
            "first_activity": c.first_activity,
            "second_activity": c.second_activity,
            "contradicts": c.contradicts,
        }
        for c in conflicts
    ]

"""HTTP API over precomputed pipeline artifacts.

Read-mostly by design: every GET is pure with respect to the loaded session,
so repeated calls return identical bodies until a rename lands. The rename
endpoint is the only writer; it serializes behind a lock, persists the
override store atomically, and swaps in a fully renamed dendrogram in one
assignment, so no request ever observes a half-applied rename.

The service never runs a model. Probability vectors arrive from clients (or
the exporter) in the same JSON shape as log lines.
"""

from __future__ import annotations

import hashlib
import json
import math
import threading
from dataclasses import dataclass, field
from pathlib import Path

from fastapi import FastAPI, HTTPException, Request, Response

from conceptscope.clustering import (
    Dendrogram,
    cut_nodes,
    from_json,
    structure_hash,
)
from conceptscope.explain import (
    ExplainError,
    ReferenceAnnotation,
    explain_label,
    explain_record,
    load_reference,
)
from conceptscope.ingest import LabelSet, RecordError, parse_record_obj
from conceptscope.naming import (
    NameOverrides,
    OverrideError,
    Taxonomy,
    load_overrides,
    load_taxonomy,
    name_dendrogram,
    save_overrides,
    set_override,
)


@dataclass
class SessionState:
    """Loaded artifacts plus the mutable override store.

    ``named`` is always a fully named dendrogram consistent with
    ``overrides``; renames rebuild it before swapping it in.
    """

    base: Dendrogram  # structure authority; names on it are ignored
    taxonomy: Taxonomy
    overrides: NameOverrides
    overrides_path: Path
    named: Dendrogram
    reference: ReferenceAnnotation | None = None
    images: dict[str, str] = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)


def load_session(
    dendrogram_path: str | Path,
    taxonomy_path: str | Path,
    overrides_path: str | Path,
    reference_path: str | Path | None = None,
    images_path: str | Path | None = None,
) -> SessionState:
    """Assemble a session from on-disk artifacts.

    The overrides file may not exist yet; it is created on the first rename.
    """
    base = from_json(Path(dendrogram_path).read_text(encoding="utf-8"))
    labels = LabelSet.from_iterable(base.labels)
    taxonomy = load_taxonomy(taxonomy_path, labels)
    overrides_path = Path(overrides_path)
    if overrides_path.exists():
        overrides = load_overrides(overrides_path, base)
    else:
        overrides = NameOverrides.for_dendrogram(base)
    named = name_dendrogram(base, taxonomy, overrides)
    reference = load_reference(reference_path) if reference_path else None
    images: dict[str, str] = {}
    if images_path is not None:
        images = json.loads(Path(images_path).read_text(encoding="utf-8"))
    return SessionState(
        base=base,
        taxonomy=taxonomy,
        overrides=overrides,
        overrides_path=overrides_path,
        named=named,
        reference=reference,
        images=images,
    )


def _member_entries(dg: Dendrogram, members: tuple[int, ...], images: dict[str, str]):
    return [
        {"label": dg.labels[m], "image_url": images.get(dg.labels[m])}
        for m in members
    ]


def _node_payload(dg: Dendrogram, node: int, images: dict[str, str]) -> dict:
    members = dg.member_table()[node]
    n = len(dg.labels)
    children = [] if node < n else list(dg.merges[node - n][:2])
    return {
        "id": node,
        "name": dg.name_of(node),
        "height": dg.heights()[node],
        "size": len(members),
        "children": children,
        "members": _member_entries(dg, members, images),
    }


def _render_dendrogram(dg: Dendrogram, images: dict[str, str]) -> str:
    heights = dg.heights()
    table = dg.member_table()
    n = len(dg.labels)
    nodes = [
        {
            "id": node,
            "name": dg.name_of(node),
            "height": heights[node],
            "size": len(table[node]),
            "children": [] if node < n else list(dg.merges[node - n][:2]),
            "members": _member_entries(dg, table[node], images),
        }
        for node in range(dg.n_nodes)
    ]
    payload = {
        "structure_hash": structure_hash(dg),
        "root": dg.root,
        "nodes": nodes,
    }
    return json.dumps(payload, separators=(",", ":"))


def create_app(state: SessionState | None = None) -> FastAPI:
    app = FastAPI(title="conceptscope")
    app.state.session = state

    def _session() -> SessionState:
        session = app.state.session
        if session is None:
            raise HTTPException(status_code=503, detail="no session loaded")
        return session

    @app.get("/dendrogram")
    def get_dendrogram() -> Response:
        session = _session()
        with session.lock:
            named = session.named
        body = _render_dendrogram(named, session.images)
        etag = hashlib.sha256(body.encode("utf-8")).hexdigest()
        return Response(
            content=body, media_type="application/json", headers={"ETag": etag}
        )

    @app.get("/clusters")
    def get_clusters(cut: str | None = None) -> dict:
        session = _session()
        if cut is None:
            raise HTTPException(status_code=400, detail="missing cut parameter")
        try:
            height = float(cut)
        except ValueError:
            raise HTTPException(status_code=400, detail=f"bad cut {cut!r}")
        if math.isnan(height) or height < 0:
            raise HTTPException(
                status_code=400, detail="cut must be a number >= 0"
            )
        with session.lock:
            named = session.named
        table = named.member_table()
        clusters = [
            {
                "node": node,
                "name": named.name_of(node),
                "size": len(table[node]),
                "members": _member_entries(named, table[node], session.images),
            }
            for node in cut_nodes(named, height)
        ]
        return {"cut": height, "clusters": clusters}

    @app.post("/clusters/{node}/name")
    async def rename_node(node: str, request: Request) -> dict:
        session = _session()
        try:
            node_id = int(node)
        except ValueError:
            raise HTTPException(status_code=404, detail=f"unknown node {node!r}")
        try:
            body = await request.json()
        except Exception:
            raise HTTPException(status_code=422, detail="body must be JSON")
        name = body.get("name") if isinstance(body, dict) else None
        if not isinstance(name, str):
            raise HTTPException(status_code=422, detail="name must be a string")
        with session.lock:
            if not 0 <= node_id < session.base.n_nodes:
                raise HTTPException(
                    status_code=404, detail=f"unknown node {node_id}"
                )
            try:
                set_override(session.overrides, node_id, name)
            except OverrideError as exc:
                raise HTTPException(status_code=422, detail=str(exc))
            save_overrides(session.overrides, session.overrides_path)
            session.named = name_dendrogram(
                session.base, session.taxonomy, session.overrides
            )
            return _node_payload(session.named, node_id, session.images)

    @app.get("/explain")
    def get_explain(label: str) -> dict:
        session = _session()
        with session.lock:
            named = session.named
        try:
            return explain_label(named, label).to_dict()
        except ExplainError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    @app.post("/classify-explain")
    async def classify_explain(request: Request) -> dict:
        session = _session()
        try:
            obj = await request.json()
        except Exception:
            raise HTTPException(status_code=400, detail="body must be JSON")
        try:
            record = parse_record_obj(obj)
        except RecordError as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        with session.lock:
            named = session.named
        try:
            return explain_record(named, record).to_dict()
        except ExplainError as exc:
            raise HTTPException(status_code=404, detail=str(exc))

    return app

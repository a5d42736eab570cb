"""Extractors that populate designer/builder cells from OpenAPI documents and
Kubernetes manifests, plus the merge step that folds proposals into a
repository.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

import yaml

from .model import (
    Concern,
    Entity,
    Interrogative,
    Link,
    ModelError,
    Repository,
    View,
    ViewCell,
    slugify,
)
from .repofmt import Diagnostic, Location, SourceDocument

HTTP_VERBS = ("get", "put", "post", "delete", "options", "head", "patch", "trace")

K8S_WORKLOAD_KINDS = ("Deployment", "StatefulSet")
K8S_SUPPORTED_KINDS = K8S_WORKLOAD_KINDS + ("Service", "Namespace")


@dataclass
class IngestProposal:
    """Entities/links/concerns extracted from one source, to be merged later."""

    entities: list[Entity] = field(default_factory=list)
    links: list[Link] = field(default_factory=list)
    concerns: list[Concern] = field(default_factory=list)
    source: str = ""
    extractor: str = ""


def _load(doc: SourceDocument):
    return yaml.safe_load(doc.text)


def _warn(diags, path, message, line=1):
    diags.append(Diagnostic("warning", message, Location(path, line, 1)))


def ingest_openapi(doc: SourceDocument) -> tuple[IngestProposal, list[Diagnostic]]:
    """Extract api entities with method records from an OpenAPI 3.x document.

    Grouping: one api entity per declared tag when the document has tags,
    otherwise one per ``info.title``.  Each (path, verb) pair becomes one
    method record carrying the verb, declared response codes, and
    ``design_tech: OpenAPI``.  A concern holding the record table is proposed
    at the designer/how cell.
    """
    proposal = IngestProposal(source=doc.path, extractor="openapi")
    diags: list[Diagnostic] = []

    try:
        data = _load(doc)
    except yaml.YAMLError as exc:
        diags.append(Diagnostic("error", f"invalid document: {exc}", Location(doc.path, 1, 1)))
        return proposal, diags
    if not isinstance(data, dict):
        diags.append(Diagnostic("error", "not an OpenAPI document", Location(doc.path, 1, 1)))
        return proposal, diags

    version = str(data.get("openapi", data.get("swagger", "")))
    if not version.startswith("3"):
        _warn(diags, doc.path, f"unsupported OpenAPI version {version!r}; parsing best-effort")

    title = (data.get("info") or {}).get("title") or "untitled-api"
    tags = [t.get("name") for t in data.get("tags") or [] if isinstance(t, dict) and t.get("name")]

    apis: dict[str, Entity] = {}

    def api_for(group: str) -> Entity:
        if group not in apis:
            apis[group] = Entity(kind="api", name=group, attributes={"methods": []})
        return apis[group]

    # Untagged operations fall back to the document title even when tags exist.
    default_group = title

    paths = data.get("paths")
    if not isinstance(paths, dict):
        paths = {}
        _warn(diags, doc.path, "document has no 'paths' mapping")
    if not paths:
        _warn(diags, doc.path, "document declares no operations")
        api_for(default_group)

    method_count = 0
    for path in sorted(paths):
        item = paths[path]
        if not isinstance(item, dict):
            _warn(diags, doc.path, f"path {path!r} is not a mapping; skipped")
            continue
        for verb in HTTP_VERBS:
            op = item.get(verb)
            if not isinstance(op, dict):
                continue
            codes = sorted(str(c) for c in (op.get("responses") or {}))
            record = {
                "verb": verb,
                "path": path,
                "design_tech": "OpenAPI",
                "status_code": int(codes[0]) if codes and codes[0].isdigit() else (codes[0] if codes else None),
            }
            if len(codes) > 1:
                record["status_codes"] = codes
            op_tags = [t for t in op.get("tags") or [] if t in tags]
            group = op_tags[0] if (tags and op_tags) else default_group
            api_for(group).attributes["methods"].append(record)
            method_count += 1

    if not apis:
        api_for(default_group)

    proposal.entities = [apis[name] for name in sorted(apis)]
    records = []
    for api in proposal.entities:
        for rec in api.attributes["methods"]:
            records.append({"api": api.id, **rec})
    concern_id = f"designer.how.openapi-{slugify(title)}"
    proposal.concerns.append(
        Concern(
            id=concern_id,
            cell=ViewCell(View.DESIGNER, Interrogative.HOW),
            statement=f"API design details extracted from {doc.path}",
            entity_refs=[a.id for a in proposal.entities],
            records=records,
        )
    )
    return proposal, diags


def ingest_k8s(
    docs: list[SourceDocument], repo: Optional[Repository] = None
) -> tuple[IngestProposal, list[Diagnostic]]:
    """Extract deployment targets and networking records from K8s manifests.

    Deployments/StatefulSets become deployment_target entities (namespace,
    replica count, container images); Services contribute endpoint attributes
    to the like-named target.  When a workload's ``app`` label matches a
    microservice in ``repo``, a deployed_on link is proposed.  A concern
    holding the pod/network table is proposed at the builder/where cell.
    """
    proposal = IngestProposal(
        source=";".join(d.path for d in docs), extractor="k8s"
    )
    diags: list[Diagnostic] = []
    targets: dict[str, Entity] = {}
    rows: list[dict] = []
    pending_links: list[tuple[str, str]] = []  # (app label, target id)

    for doc in docs:
        try:
            manifests = [m for m in yaml.safe_load_all(doc.text) if m is not None]
        except yaml.YAMLError as exc:
            diags.append(
                Diagnostic("error", f"invalid manifest: {exc}", Location(doc.path, 1, 1))
            )
            continue
        for manifest in manifests:
            if not isinstance(manifest, dict):
                _warn(diags, doc.path, "manifest document is not a mapping; skipped")
                continue
            kind = manifest.get("kind")
            if kind not in K8S_SUPPORTED_KINDS:
                _warn(diags, doc.path, f"unsupported manifest kind {kind!r} skipped")
                continue
            metadata = manifest.get("metadata") or {}
            name = metadata.get("name")
            if not name:
                _warn(diags, doc.path, f"{kind} without metadata.name skipped")
                continue
            spec = manifest.get("spec") or {}

            if kind in K8S_WORKLOAD_KINDS:
                images = []
                containers = ((spec.get("template") or {}).get("spec") or {}).get(
                    "containers"
                ) or []
                for container in containers:
                    image = container.get("image")
                    if image:
                        images.append(image)
                target = _target_for(targets, name)
                target.attributes.update(
                    {
                        "namespace": metadata.get("namespace", "default"),
                        "replicas": int(spec.get("replicas", 1)),
                        "images": images,
                    }
                )
                app = _app_label(metadata, spec)
                if app:
                    pending_links.append((app, target.id))
                rows.append(
                    {
                        "workload": name,
                        "kind": kind,
                        "namespace": metadata.get("namespace", "default"),
                        "replicas": int(spec.get("replicas", 1)),
                        "images": images,
                    }
                )
            elif kind == "Service":
                ports = []
                for port in spec.get("ports") or []:
                    ports.append(
                        {
                            "port": port.get("port"),
                            "target_port": port.get("targetPort"),
                            "protocol": port.get("protocol", "TCP"),
                        }
                    )
                target = _target_for(targets, name)
                target.attributes["endpoints"] = ports
                if spec.get("selector"):
                    target.attributes["selector"] = dict(spec["selector"])
                rows.append({"service": name, "endpoints": ports})
            elif kind == "Namespace":
                proposal.entities.append(Entity(kind="location", name=name))

    proposal.entities.extend(targets[name] for name in sorted(targets))

    known_ms = set()
    if repo is not None:
        known_ms = {e.id for e in repo.entities_of_kind("microservice")}
    for app, target_id in pending_links:
        ms_id = f"microservice.{slugify(app)}"
        if ms_id in known_ms:
            proposal.links.append(Link(kind="deployed_on", source=ms_id, target=target_id))

    if rows:
        proposal.concerns.append(
            Concern(
                id=f"builder.where.k8s-{slugify(proposal.source) or 'manifests'}",
                cell=ViewCell(View.BUILDER, Interrogative.WHERE),
                statement="Cluster deployment and networking extracted from manifests",
                entity_refs=sorted({t.id for t in targets.values()}),
                records=rows,
            )
        )
    return proposal, diags


def _target_for(targets: dict[str, Entity], name: str) -> Entity:
    if name not in targets:
        targets[name] = Entity(kind="deployment_target", name=name, attributes={})
    return targets[name]


def _app_label(metadata: dict, spec: dict) -> Optional[str]:
    for labels in (
        (spec.get("selector") or {}).get("matchLabels") or {},
        metadata.get("labels") or {},
        ((spec.get("template") or {}).get("metadata") or {}).get("labels") or {},
    ):
        if labels.get("app"):
            return str(labels["app"])
    return None


MERGE_STRATEGIES = ("add_only", "overwrite_attributes")


def merge_proposal(
    repo: Repository, proposal: IngestProposal, strategy: str = "add_only"
) -> tuple[Repository, list[Diagnostic]]:
    """Fold a proposal into a copy of ``repo``.  Idempotent for both strategies.

    ``add_only`` keeps existing entities/concerns untouched on id collision
    (warning); ``overwrite_attributes`` replaces the attribute map / records
    while preserving links.  Dangling proposal links are reported and skipped.
    """
    if strategy not in MERGE_STRATEGIES:
        raise ValueError(f"unknown merge strategy {strategy!r}")
    out = copy.deepcopy(repo)
    diags: list[Diagnostic] = []
    origin = Location(proposal.source or "<proposal>", 1, 1)

    for entity in proposal.entities:
        existing = out.entities.get(entity.id)
        if existing is None:
            try:
                out.add_entity(copy.deepcopy(entity))
            except ModelError as exc:
                diags.append(Diagnostic("error", str(exc), origin))
        elif strategy == "overwrite_attributes":
            existing.attributes = copy.deepcopy(entity.attributes)
        else:
            diags.append(
                Diagnostic(
                    "warning", f"entity {entity.id!r} already present; kept as-is", origin
                )
            )

    for concern in proposal.concerns:
        existing = out.concerns.get(concern.id)
        if existing is None:
            try:
                out.add_concern(copy.deepcopy(concern))
            except ModelError as exc:
                diags.append(Diagnostic("error", str(exc), origin))
        elif strategy == "overwrite_attributes":
            out.concerns[concern.id] = copy.deepcopy(concern)
        else:
            diags.append(
                Diagnostic(
                    "warning", f"concern {concern.id!r} already present; kept as-is", origin
                )
            )

    for link in proposal.links:
        if link.id in out.links:
            continue  # merging twice must equal merging once
        try:
            out.add_link(copy.deepcopy(link))
        except ModelError as exc:
            diags.append(Diagnostic("error", str(exc), origin))

    return out, diags

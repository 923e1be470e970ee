"""
JSON documents: decompositions, MUB vectors, certificate reports and search
results. Every document carries format_version "1"; unknown fields are
rejected with their path.

Subspaces are stored as canonical echelon integer rows, never as matrices.
Floats are written with repr, which round-trips doubles exactly.
"""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Dict

import numpy as np

from .analysis import CertificateReport, MubFamily, SearchResult, Verdict
from .constructions import Decomposition, Family
from .errors import ParseError, VersionMismatch
from .residue import Gl2Matrix, ResidueScalar, Subspace2, check_modulus
from .subalgebra import SubalgebraDesc, SubalgebraKind, describe
from .utils import __version__, int_rows
from .weyl import PureState

logger = logging.getLogger(__name__)

# --- CONFIGURATION ---
FORMAT_VERSION = "1"
VECTOR_NORM_TOLERANCE = 1e-10
METADATA_FIELDS = ("seed", "tool_version", "timestamp", "notes")


@dataclass
class DecompositionFile:
    decomposition: Decomposition
    metadata: Dict[str, object] = field(default_factory=dict)


def build_metadata(seed=None, notes=None):
    return {
        "seed": seed,
        "tool_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "notes": list(notes or []),
    }


# --- Parsing helpers ---

def _loads(text):
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Malformed JSON: {e.msg}", line=e.lineno) from e


def _dumps(document):
    return json.dumps(document, indent=2) + "\n"


def _object(value, path, required, optional=()):
    if not isinstance(value, dict):
        raise ParseError(f"Expected an object, got {type(value).__name__}", field=path or "<root>")
    for key in value:
        if key not in required and key not in optional:
            raise ParseError("Unknown field", field=_join(path, key))
    for key in required:
        if key not in value:
            raise ParseError("Missing field", field=_join(path, key))
    return value


def _mapping(value, path):
    if not isinstance(value, dict):
        raise ParseError(f"Expected an object, got {type(value).__name__}", field=path)
    return value


def _join(path, key):
    if isinstance(key, int):
        return f"{path}[{key}]"
    return f"{path}.{key}" if path else key


def _check_version(document):
    version = document.get("format_version") if isinstance(document, dict) else None
    if version is None:
        raise ParseError("Missing field", field="format_version")
    if version != FORMAT_VERSION:
        raise VersionMismatch(f"Unsupported format_version {version!r}, expected {FORMAT_VERSION!r}")


def _int(value, path):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ParseError(f"Expected an integer, got {value!r}", field=path)
    return value


def _float(value, path):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"Expected a number, got {value!r}", field=path)
    return float(value)


def _list(value, path, length=None):
    if not isinstance(value, list):
        raise ParseError(f"Expected a list, got {type(value).__name__}", field=path)
    if length is not None and len(value) != length:
        raise ParseError(f"Expected {length} entries, got {len(value)}", field=path)
    return value


def _string_list(value, path):
    for index, item in enumerate(_list(value, path)):
        if not isinstance(item, str):
            raise ParseError(f"Expected a string, got {item!r}", field=_join(path, index))
    return list(value)


def _rows(value, path, n_rows, n_cols):
    rows = _list(value, path, n_rows)
    return tuple(tuple(_int(x, _join(_join(path, r), c)) for c, x in enumerate(_list(row, _join(path, r), n_cols)))
                 for r, row in enumerate(rows))


def _domain(path, build):
    """Runs a constructor, turning its ValueError into a ParseError at `path`."""
    try:
        return build()
    except ParseError:
        raise
    except ValueError as e:
        raise ParseError(str(e), field=path) from e


def _vector_payload(v):
    return {"re": [float(x) for x in v.real], "im": [float(x) for x in v.imag]}


def _parse_vector(value, path, dimension):
    _object(value, path, ("re", "im"))
    re = [_float(x, _join(_join(path, "re"), i)) for i, x in enumerate(_list(value["re"], _join(path, "re"), dimension))]
    im = [_float(x, _join(_join(path, "im"), i)) for i, x in enumerate(_list(value["im"], _join(path, "im"), dimension))]
    return np.array(re) + 1j * np.array(im)


# --- DecompositionFile ---

def decomposition_to_dict(decomposition: Decomposition, metadata=None):
    return {
        "format_version": FORMAT_VERSION,
        "p": decomposition.p,
        "family": decomposition.family.value,
        "D": decomposition.nonresidue.value if decomposition.nonresidue is not None else None,
        "generators": ([[list(row) for row in g.rows] for g in decomposition.generators]
                       if decomposition.generators is not None else None),
        "subalgebras": [{"kind": s.kind.value, "subspace": int_rows(s.subspace.basis)}
                        for s in decomposition.subalgebras],
        "metadata": dict(metadata if metadata is not None else build_metadata(notes=decomposition.notes)),
    }


def serialize_decomposition(decomposition: Decomposition, metadata=None) -> str:
    return _dumps(decomposition_to_dict(decomposition, metadata))


def parse_decomposition(text) -> DecompositionFile:
    document = _loads(text)
    _check_version(document)
    _object(document, "", ("format_version", "p", "family", "subalgebras"), ("D", "generators", "metadata"))

    p = _domain("p", lambda: check_modulus(_int(document["p"], "p")))
    family = _domain("family", lambda: Family(document["family"]))

    D = document.get("D")
    nonresidue = None if D is None else ResidueScalar(_int(D, "D"), p)

    generators = None
    if document.get("generators") is not None:
        generators = []
        for index, g in enumerate(_list(document["generators"], "generators")):
            path = _join("generators", index)
            rows = _rows(g, path, 2, 2)
            generators.append(_domain(path, lambda: Gl2Matrix.from_rows(rows, p)))

    subalgebras = []
    for index, entry in enumerate(_list(document["subalgebras"], "subalgebras")):
        path = _join("subalgebras", index)
        _object(entry, path, ("kind", "subspace"))
        kind = _domain(_join(path, "kind"), lambda: SubalgebraKind(entry["kind"]))
        rows = _rows(entry["subspace"], _join(path, "subspace"), 2, 4)
        subspace = _domain(_join(path, "subspace"), lambda: Subspace2(rows, p))
        # The stored tag is kept as written; certificates compare it with the subspace.
        subalgebras.append(SubalgebraDesc(kind, subspace, describe(subspace).gl2_rep))

    metadata = _parse_metadata(document.get("metadata", {}))
    decomposition = Decomposition(p, family, subalgebras, nonresidue=nonresidue, generators=generators,
                                  notes=list(metadata.get("notes", [])))
    logger.debug(f"Parsed decomposition p={p} family={family.value} with {len(subalgebras)} subalgebras")
    return DecompositionFile(decomposition, metadata)


def _parse_metadata(value):
    metadata = _object(value, "metadata", (), METADATA_FIELDS)
    if metadata.get("seed") is not None:
        _int(metadata["seed"], "metadata.seed")
    for key in ("tool_version", "timestamp"):
        if metadata.get(key) is not None and not isinstance(metadata[key], str):
            raise ParseError("Expected a string", field=f"metadata.{key}")
    if "notes" in metadata:
        _string_list(metadata["notes"], "metadata.notes")
    return dict(metadata)


# --- MubVectorsFile ---

def mub_family_to_dict(family: MubFamily):
    return {
        "format_version": FORMAT_VERSION,
        "p": family.p,
        "dimension": family.dimension,
        "seed": family.seed,
        "bases": [
            {
                "source_subspace": int_rows(S.subspace.basis),
                "vectors": [_vector_payload(U[:, k]) for k in range(U.shape[1])],
            }
            for S, U in zip(family.source_masas, family.bases)
        ],
    }


def serialize_mub_family(family: MubFamily) -> str:
    return _dumps(mub_family_to_dict(family))


def parse_mub_family(text) -> MubFamily:
    document = _loads(text)
    _check_version(document)
    _object(document, "", ("format_version", "p", "dimension", "bases"), ("seed",))
    p = _int(document["p"], "p")
    dimension = _int(document["dimension"], "dimension")
    if dimension != p * p:
        raise ParseError(f"Dimension {dimension} is not p^2 = {p * p}", field="dimension")
    seed = _int(document.get("seed", 0), "seed")

    bases, sources = [], []
    for index, entry in enumerate(_list(document["bases"], "bases")):
        path = _join("bases", index)
        _object(entry, path, ("source_subspace", "vectors"))
        rows = _rows(entry["source_subspace"], _join(path, "source_subspace"), 2, 4)
        subspace = _domain(_join(path, "source_subspace"), lambda: Subspace2(rows, p))
        columns = []
        for k, vector in enumerate(_list(entry["vectors"], _join(path, "vectors"), dimension)):
            vpath = _join(_join(path, "vectors"), k)
            v = _parse_vector(vector, vpath, dimension)
            if abs(np.linalg.norm(v) - 1.0) > VECTOR_NORM_TOLERANCE:
                raise ParseError(f"Vector norm {np.linalg.norm(v)!r} differs from 1", field=vpath)
            columns.append(v)
        bases.append(np.column_stack(columns))
        sources.append(describe(subspace))
    return MubFamily(p, bases, sources, seed)


# --- CertificateReport ---

def certificate_to_dict(report: CertificateReport):
    return {
        "format_version": FORMAT_VERSION,
        "p": report.p,
        "family": report.family,
        "subalgebra_count": report.subalgebra_count,
        "factor_count": report.factor_count,
        "bound_required": report.bound_required,
        "verdict": report.verdict.value,
        "residuals": {k: float(v) for k, v in sorted(report.residuals.items())},
        "provenance": report.provenance,
        "failures": list(report.failures),
        "notes": list(report.notes),
    }


def serialize_certificate(report: CertificateReport) -> str:
    return _dumps(certificate_to_dict(report))


def parse_certificate(text) -> CertificateReport:
    document = _loads(text)
    _check_version(document)
    _object(document, "", ("format_version", "p", "family", "subalgebra_count", "factor_count",
                           "bound_required", "verdict"), ("residuals", "provenance", "failures", "notes"))
    residuals = _mapping(document.get("residuals", {}), "residuals")
    provenance = _mapping(document.get("provenance", {}), "provenance")
    return CertificateReport(
        p=_int(document["p"], "p"),
        family=_domain("family", lambda: Family(document["family"]).value),
        subalgebra_count=_int(document["subalgebra_count"], "subalgebra_count"),
        factor_count=_int(document["factor_count"], "factor_count"),
        bound_required=_int(document["bound_required"], "bound_required"),
        verdict=_domain("verdict", lambda: Verdict(document["verdict"])),
        residuals={k: _float(v, _join("residuals", k)) for k, v in residuals.items()},
        provenance=dict(provenance),
        failures=_string_list(document.get("failures", []), "failures"),
        notes=_string_list(document.get("notes", []), "notes"),
    )


# --- SearchResult ---

def search_result_to_dict(result: SearchResult):
    return {
        "format_version": FORMAT_VERSION,
        "best_residual": float(result.best_residual),
        "witness_found": result.witness_found,
        "restarts": result.restarts,
        "evaluated": result.evaluated,
        "iterations": result.iterations,
        "seed": result.seed,
        "best_vector": _vector_payload(result.best_vector.amplitudes),
    }


def serialize_search_result(result: SearchResult) -> str:
    return _dumps(search_result_to_dict(result))


def parse_search_result(text) -> SearchResult:
    document = _loads(text)
    _check_version(document)
    _object(document, "", ("format_version", "best_residual", "restarts", "seed", "best_vector"),
            ("witness_found", "evaluated", "iterations"))
    vector = document["best_vector"]
    dimension = len(vector.get("re", [])) if isinstance(vector, dict) else 0
    amplitudes = _parse_vector(vector, "best_vector", dimension)
    return SearchResult(
        best_vector=_domain("best_vector", lambda: PureState(amplitudes)),
        best_residual=_float(document["best_residual"], "best_residual"),
        restarts=_int(document["restarts"], "restarts"),
        seed=_int(document["seed"], "seed"),
        evaluated=_int(document.get("evaluated", 0), "evaluated"),
        iterations=_int(document.get("iterations", 0), "iterations"),
    )


# --- Files ---

def write_text(path, text):
    Path(path).write_text(text, encoding="utf-8")


def read_text(path):
    try:
        return Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as e:
        line = e.object[:e.start].count(b"\n") + 1
        raise ParseError(f"{path} is not UTF-8 text: {e.reason}", line=line) from e

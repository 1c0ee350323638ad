"""Fine-grained rib fracture annotation schema.

Each fracture carries six clinical dimensions: location along the rib
(anterior / lateral / posterior), displacement grade (the three CWIS
grades plus ``severely-displaced``), morphological characterization
(config-driven vocabulary), per-rib multiplicity, rib side and rib
number, plus flags recording contribution to flail or segmental injury.

Worksheets are UTF-8 JSON-lines files: a header line with scan identity,
voxel spacing and volume shape, then one annotation record per line.
The exact grammar lives in ``docs/formats.md`` with a golden file under
``docs/golden/``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Sequence

NO_FRACTURE = "no-fracture"

SIDES = ("left", "right")
LOCATIONS = ("anterior", "lateral", "posterior")
DISPLACEMENTS = ("undisplaced", "offset", "displaced", "severely-displaced")
DEFAULT_CHARACTERIZATIONS = ("buckle", "oblique", "transverse", "comminuted", "segmental")
MULTIPLICITIES = ("single", "multiple")

HEAD_LOCATION = "location"
HEAD_DISPLACEMENT = "displacement"
HEAD_CHARACTERIZATION = "characterization"
HEAD_MULTIPLE = "multiple"

RIB_MIN, RIB_MAX = 1, 12

_TOKEN_RE = re.compile(r"^[a-z][a-z0-9]*(-[a-z0-9]+)*$")


@dataclass(frozen=True)
class LabelVocabulary:
    """Ordered label set for one classification head.

    Every head carries the distinguished ``no-fracture`` token exactly
    once; the remaining labels are the tokens annotations may use.
    """

    head_name: str
    labels: tuple[str, ...]

    def __post_init__(self):
        if not self.labels:
            raise ValueError(f"head {self.head_name!r}: empty label list")
        if len(set(self.labels)) != len(self.labels):
            raise ValueError(f"head {self.head_name!r}: duplicate labels")
        for token in self.labels:
            if not _TOKEN_RE.match(token):
                raise ValueError(
                    f"head {self.head_name!r}: label {token!r} is not a lowercase-kebab token"
                )
        if self.labels.count(NO_FRACTURE) != 1:
            raise ValueError(f"head {self.head_name!r}: {NO_FRACTURE!r} must appear exactly once")

    @property
    def size(self) -> int:
        return len(self.labels)

    @property
    def no_fracture_index(self) -> int:
        return self.labels.index(NO_FRACTURE)

    @property
    def annotation_labels(self) -> tuple[str, ...]:
        """Labels an annotated fracture may carry (everything but the sentinel)."""
        return tuple(t for t in self.labels if t != NO_FRACTURE)

    def index(self, token: str) -> int:
        try:
            return self.labels.index(token)
        except ValueError:
            raise KeyError(f"head {self.head_name!r}: unknown label {token!r}") from None


def default_vocabularies(
    characterizations: Sequence[str] = DEFAULT_CHARACTERIZATIONS,
) -> list[LabelVocabulary]:
    """The four classification-head vocabularies, characterization replaceable."""
    return [
        LabelVocabulary(HEAD_LOCATION, LOCATIONS + (NO_FRACTURE,)),
        LabelVocabulary(HEAD_DISPLACEMENT, DISPLACEMENTS + (NO_FRACTURE,)),
        LabelVocabulary(HEAD_CHARACTERIZATION, tuple(characterizations) + (NO_FRACTURE,)),
        LabelVocabulary(HEAD_MULTIPLE, MULTIPLICITIES + (NO_FRACTURE,)),
    ]


@dataclass(frozen=True)
class FractureAnnotation:
    """One annotated fracture with its six clinical dimensions."""

    scan_id: str
    fracture_serial: int
    rib_side: str
    rib_number: int
    location: str
    displacement: str
    characterization: str
    multiple: str
    flail_contributor: bool = False
    segmental_contributor: bool = False


@dataclass(frozen=True)
class AnnotationWorksheet:
    """All annotations of one scan plus scan geometry."""

    scan_id: str
    annotations: tuple[FractureAnnotation, ...]
    voxel_spacing: tuple[float, float, float]
    volume_shape: tuple[int, int, int]


@dataclass(frozen=True)
class Violation:
    """One schema violation found by :func:`validate` (data, not an error)."""

    scan_id: str
    serial: int | None
    field: str
    message: str


class WorksheetParseError(ValueError):
    """Raised on the first malformed worksheet line."""

    def __init__(self, line: int, message: str, field: str | None = None):
        self.line = line
        self.field = field
        where = f"line {line}" + (f", field {field!r}" if field else "")
        super().__init__(f"{where}: {message}")


_RECORD_KEYS = (
    "scan_id", "serial", "side", "rib", "location",
    "displacement", "characterization", "multiple", "flail", "segmental",
)
_HEADER_KEYS = ("scan_id", "voxel_spacing", "volume_shape")


def _vocab_map(vocabularies: Sequence[LabelVocabulary] | None) -> dict[str, LabelVocabulary]:
    vocabs = list(vocabularies) if vocabularies is not None else default_vocabularies()
    return {v.head_name: v for v in vocabs}


def _require(obj: dict, key: str, line: int):
    if key not in obj:
        raise WorksheetParseError(line, "missing key", field=key)
    return obj[key]


def _token_field(obj: dict, key: str, allowed: Sequence[str], line: int) -> str:
    value = _require(obj, key, line)
    if value not in allowed:
        raise WorksheetParseError(line, f"unknown token {value!r}", field=key)
    return value


def parse_worksheet(
    data: bytes, vocabularies: Sequence[LabelVocabulary] | None = None
) -> AnnotationWorksheet:
    """Parse a worksheet file; total, or fails at the first offending line.

    Raises :class:`WorksheetParseError` carrying the 1-based line number
    and, where applicable, the offending field or token.
    """
    by_head = _vocab_map(vocabularies)
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise WorksheetParseError(1, f"not valid UTF-8: {exc}") from exc
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines:
        raise WorksheetParseError(1, "empty worksheet (header line required)")

    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise WorksheetParseError(1, f"malformed header: {exc.msg}") from exc
    if not isinstance(header, dict):
        raise WorksheetParseError(1, "header must be an object")
    for key in _HEADER_KEYS:
        _require(header, key, 1)
    scan_id = header["scan_id"]
    if not isinstance(scan_id, str) or not scan_id:
        raise WorksheetParseError(1, "scan_id must be a non-empty string", field="scan_id")
    spacing = header["voxel_spacing"]
    shape = header["volume_shape"]
    if not (isinstance(spacing, list) and len(spacing) == 3 and all(
            isinstance(v, (int, float)) and v > 0 for v in spacing)):
        raise WorksheetParseError(1, "voxel_spacing must be three positive numbers", field="voxel_spacing")
    if not (isinstance(shape, list) and len(shape) == 3 and all(
            isinstance(v, int) and v > 0 for v in shape)):
        raise WorksheetParseError(1, "volume_shape must be three positive integers", field="volume_shape")

    annotations: list[FractureAnnotation] = []
    seen_serials: set[int] = set()
    for lineno, raw in enumerate(lines[1:], start=2):
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise WorksheetParseError(lineno, f"malformed record: {exc.msg}") from exc
        if not isinstance(obj, dict):
            raise WorksheetParseError(lineno, "record must be an object")

        rec_scan = _require(obj, "scan_id", lineno)
        if rec_scan != scan_id:
            raise WorksheetParseError(
                lineno, f"scan_id {rec_scan!r} differs from header {scan_id!r}", field="scan_id"
            )
        serial = _require(obj, "serial", lineno)
        if not isinstance(serial, int) or serial < 1:
            raise WorksheetParseError(lineno, "serial must be a positive integer", field="serial")
        if serial in seen_serials:
            raise WorksheetParseError(lineno, f"duplicate serial {serial}", field="serial")
        seen_serials.add(serial)
        rib = _require(obj, "rib", lineno)
        if not isinstance(rib, int) or not (RIB_MIN <= rib <= RIB_MAX):
            raise WorksheetParseError(
                lineno, f"rib must be an integer in [{RIB_MIN}, {RIB_MAX}]", field="rib"
            )
        side = _token_field(obj, "side", SIDES, lineno)
        location = _token_field(obj, "location", by_head[HEAD_LOCATION].annotation_labels, lineno)
        displacement = _token_field(
            obj, "displacement", by_head[HEAD_DISPLACEMENT].annotation_labels, lineno
        )
        characterization = _token_field(
            obj, "characterization", by_head[HEAD_CHARACTERIZATION].annotation_labels, lineno
        )
        multiple = _token_field(obj, "multiple", by_head[HEAD_MULTIPLE].annotation_labels, lineno)
        flail = _require(obj, "flail", lineno)
        segmental = _require(obj, "segmental", lineno)
        if not isinstance(flail, bool):
            raise WorksheetParseError(lineno, "flail must be a boolean", field="flail")
        if not isinstance(segmental, bool):
            raise WorksheetParseError(lineno, "segmental must be a boolean", field="segmental")

        annotations.append(FractureAnnotation(
            scan_id=scan_id,
            fracture_serial=serial,
            rib_side=side,
            rib_number=rib,
            location=location,
            displacement=displacement,
            characterization=characterization,
            multiple=multiple,
            flail_contributor=flail,
            segmental_contributor=segmental,
        ))

    return AnnotationWorksheet(
        scan_id=scan_id,
        annotations=tuple(annotations),
        voxel_spacing=(float(spacing[0]), float(spacing[1]), float(spacing[2])),
        volume_shape=(shape[0], shape[1], shape[2]),
    )


def serialize_worksheet(worksheet: AnnotationWorksheet) -> bytes:
    """Canonical byte form; ``parse_worksheet`` of it reproduces the worksheet."""
    header = {
        "scan_id": worksheet.scan_id,
        "voxel_spacing": list(worksheet.voxel_spacing),
        "volume_shape": list(worksheet.volume_shape),
    }
    out = [json.dumps(header, separators=(",", ":"))]
    for a in worksheet.annotations:
        out.append(json.dumps({
            "scan_id": a.scan_id,
            "serial": a.fracture_serial,
            "side": a.rib_side,
            "rib": a.rib_number,
            "location": a.location,
            "displacement": a.displacement,
            "characterization": a.characterization,
            "multiple": a.multiple,
            "flail": a.flail_contributor,
            "segmental": a.segmental_contributor,
        }, separators=(",", ":")))
    return ("\n".join(out) + "\n").encode("utf-8")


def validate(
    worksheet: AnnotationWorksheet,
    vocabularies: Sequence[LabelVocabulary] | None = None,
) -> list[Violation]:
    """Check every schema invariant; violations are returned, never raised."""
    by_head = _vocab_map(vocabularies)
    violations: list[Violation] = []

    def flag(serial, field, message):
        violations.append(Violation(worksheet.scan_id, serial, field, message))

    if any(s <= 0 for s in worksheet.volume_shape):
        flag(None, "volume_shape", f"components must be positive, got {worksheet.volume_shape}")
    if any(s <= 0 for s in worksheet.voxel_spacing):
        flag(None, "voxel_spacing", f"components must be positive, got {worksheet.voxel_spacing}")

    seen: set[int] = set()
    for a in worksheet.annotations:
        if a.scan_id != worksheet.scan_id:
            flag(a.fracture_serial, "scan_id",
                 f"annotation scan_id {a.scan_id!r} differs from worksheet {worksheet.scan_id!r}")
        if a.fracture_serial < 1:
            flag(a.fracture_serial, "serial", "serial must be a positive integer")
        elif a.fracture_serial in seen:
            flag(a.fracture_serial, "serial", f"duplicate serial {a.fracture_serial}")
        seen.add(a.fracture_serial)
        if not (RIB_MIN <= a.rib_number <= RIB_MAX):
            flag(a.fracture_serial, "rib_number",
                 f"rib_number {a.rib_number} outside [{RIB_MIN}, {RIB_MAX}]")
        if a.rib_side not in SIDES:
            flag(a.fracture_serial, "rib_side", f"unknown token {a.rib_side!r}")
        checks = (
            ("location", a.location, HEAD_LOCATION),
            ("displacement", a.displacement, HEAD_DISPLACEMENT),
            ("characterization", a.characterization, HEAD_CHARACTERIZATION),
            ("multiple", a.multiple, HEAD_MULTIPLE),
        )
        for field_name, token, head in checks:
            if token not in by_head[head].annotation_labels:
                flag(a.fracture_serial, field_name, f"unknown token {token!r}")
    return violations


# Display phrasing used by the templated clinical descriptions.  The CWIS
# grade "undisplaced" reads "non-displaced" in report prose.
_DISPLACEMENT_PHRASE = {
    "undisplaced": "non-displaced",
    "offset": "offset",
    "displaced": "displaced",
    "severely-displaced": "severely displaced",
}


def _with_article(phrase: str) -> str:
    article = "an" if phrase[0] in "aeiou" else "a"
    return f"{article} {phrase}"


def generate_description(a: FractureAnnotation) -> str:
    """Deterministic templated clinical description of one fracture.

    Pure function of the annotation: identical annotations yield
    byte-identical text.
    """
    displacement = _DISPLACEMENT_PHRASE.get(a.displacement, a.displacement.replace("-", " "))
    characterization = a.characterization.replace("-", " ")
    return (
        f"The fracture is located on the {a.rib_side} side of the rib, "
        f"specifically in the {a.location} region. "
        f"It is {_with_article(displacement)} fracture "
        f"with {_with_article(characterization)} pattern."
    )

"""Validation, serialization and DOT export for emitter-detector fiber networks."""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from pathlib import Path

import networkx as nx
from networkx.algorithms import bipartite
from pydantic import ValidationError

from src.models.setup import Diagnostic, DiagnosticCode, Fiber, OpticalSetup
from src.utils.exceptions import InvalidSetupError, ReportExportError, SetupParseError

logger = logging.getLogger(__name__)


def maximum_matching(setup: OpticalSetup) -> dict[int, int]:
    """Maximum emitter -> detector matching along existing fibers (Hopcroft-Karp)."""

    emitters = [("emitter", index) for index in range(1, setup.n + 1)]
    graph = nx.Graph()
    graph.add_nodes_from(emitters, bipartite=0)
    graph.add_nodes_from((("detector", index) for index in range(1, setup.n + 1)), bipartite=1)
    graph.add_edges_from(
        (("emitter", fiber.emitter), ("detector", fiber.detector))
        for fiber in setup.fibers
        if 1 <= fiber.emitter <= setup.n and 1 <= fiber.detector <= setup.n
    )

    matching = bipartite.hopcroft_karp_matching(graph, top_nodes=emitters)
    return {node[1]: matching[node][1] for node in emitters if node in matching}


def has_perfect_matching(setup: OpticalSetup) -> bool:
    return len(maximum_matching(setup)) == setup.n


def validate_setup(setup: OpticalSetup) -> list[Diagnostic]:
    """Return every invariant violation of ``setup``; an empty list means valid.

    Never raises, so it can be pointed at instances built with ``model_construct``.
    """

    diagnostics: list[Diagnostic] = []
    n = setup.n

    if len(setup.polarizers) != n:
        diagnostics.append(
            Diagnostic(
                code=DiagnosticCode.POLARIZER_COUNT,
                message=f"{len(setup.polarizers)} polarizers for {n} detectors.",
            )
        )

    seen: set[tuple[int, int]] = set()
    wired: set[int] = set()
    for fiber in setup.fibers:
        key = (fiber.emitter, fiber.detector)
        if not (1 <= fiber.emitter <= n and 1 <= fiber.detector <= n):
            diagnostics.append(
                Diagnostic(
                    code=DiagnosticCode.INDEX_OUT_OF_RANGE,
                    message=f"Fiber ({fiber.emitter}, {fiber.detector}) is outside 1..{n}.",
                    emitter=fiber.emitter,
                    detector=fiber.detector,
                )
            )
            continue
        if key in seen:
            diagnostics.append(
                Diagnostic(
                    code=DiagnosticCode.DUPLICATE_FIBER,
                    message=f"More than one fiber from emitter {fiber.emitter} to detector {fiber.detector}.",
                    emitter=fiber.emitter,
                    detector=fiber.detector,
                )
            )
            continue
        seen.add(key)
        wired.add(fiber.emitter)

    isolated = [emitter for emitter in range(1, n + 1) if emitter not in wired]
    for emitter in isolated:
        diagnostics.append(
            Diagnostic(
                code=DiagnosticCode.ISOLATED_EMITTER,
                message=f"Emitter {emitter} has no fibers.",
                emitter=emitter,
            )
        )

    if not isolated:
        matched = maximum_matching(setup)
        if len(matched) < n:
            unmatched = [emitter for emitter in range(1, n + 1) if emitter not in matched]
            free = sorted(set(range(1, n + 1)) - set(matched.values()))
            diagnostics.append(
                Diagnostic(
                    code=DiagnosticCode.NO_PERFECT_MATCHING,
                    message=(
                        f"No perfect matching: maximum matching covers {len(matched)} of {n} emitters; "
                        f"unmatched emitters {unmatched}, uncovered detectors {free}."
                    ),
                    emitter=unmatched[0],
                    detector=free[0] if free else None,
                )
            )

    if diagnostics:
        logger.debug("Setup validation produced %s diagnostics", len(diagnostics))
    return diagnostics


def require_valid(setup: OpticalSetup) -> None:
    """Raise :class:`InvalidSetupError` if ``setup`` has any diagnostics."""

    diagnostics = validate_setup(setup)
    if diagnostics:
        summary = "; ".join(diagnostic.message for diagnostic in diagnostics)
        raise InvalidSetupError(f"Invalid optical setup: {summary}", diagnostics=diagnostics)


def serialize_setup(setup: OpticalSetup) -> str:
    """Render the setup document (JSON, fibers in canonical order)."""

    return setup.model_dump_json(indent=2) + "\n"


def parse_setup(text: str) -> OpticalSetup:
    """Parse a setup document; structural problems raise :class:`SetupParseError`."""

    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SetupParseError(exc.msg, location=f"line {exc.lineno}, column {exc.colno}") from exc

    if not isinstance(payload, dict):
        raise SetupParseError("setup document must be a JSON object", location="$")

    try:
        return OpticalSetup.model_validate(payload)
    except ValidationError as exc:
        first = exc.errors()[0]
        location = "$" + "".join(f"[{part}]" if isinstance(part, int) else f".{part}" for part in first["loc"])
        raise SetupParseError(first["msg"], location=location) from exc


def load_setup(path: Path) -> OpticalSetup:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except UnicodeDecodeError as exc:
        raise SetupParseError("setup document is not valid UTF-8", location=f"byte {exc.start}") from exc
    return parse_setup(text)


def save_setup(setup: OpticalSetup, path: Path) -> None:
    try:
        Path(path).write_text(serialize_setup(setup), encoding="utf-8")
    except OSError as exc:
        raise ReportExportError(f"Failed to write setup document to {path}.") from exc


def flip_polarizers(setup: OpticalSetup) -> OpticalSetup:
    """Swap σ- and σ+ on every detector, keeping the fiber graph."""

    return OpticalSetup(
        n=setup.n,
        polarizers=tuple(polarizer.flipped() for polarizer in setup.polarizers),
        fibers=setup.fibers,
    )


def _phase_label(phase_over_pi: Fraction) -> str:
    reduced = phase_over_pi % 2
    numerator, denominator = reduced.numerator, reduced.denominator
    prefix = "" if numerator == 1 else str(numerator)
    return f"{prefix}π" if denominator == 1 else f"{prefix}π/{denominator}"


def _edge_attributes(fiber: Fiber) -> str:
    if fiber.phase_over_pi % 2 == 0:
        return ""
    style = "dashed" if fiber.is_pi else "dotted"
    return f' [style={style}, label="{_phase_label(fiber.phase_over_pi)}"]'


def export_dot(setup: OpticalSetup) -> str:
    """Render the bipartite fiber graph in Graphviz DOT."""

    lines = [
        "graph optical_setup {",
        "  rankdir=LR;",
        '  node [fontname="Helvetica"];',
    ]
    lines.extend(f'  e{index} [shape=circle, label="{index}"];' for index in range(1, setup.n + 1))
    lines.extend(
        f'  d{index} [shape=box, label="D{index} {polarizer.value}"];'
        for index, polarizer in enumerate(setup.polarizers, start=1)
    )
    lines.extend(f"  e{fiber.emitter} -- d{fiber.detector}{_edge_attributes(fiber)};" for fiber in setup.fibers)
    lines.append("}")
    return "\n".join(lines) + "\n"

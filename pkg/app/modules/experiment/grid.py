"""
The `individual` / `sequence` grid grammar.

    -M individual 1 3 7        -> M = (1, 3, 7)
    -T sequence 1.0 1.0 5.0    -> T = (1.0, 2.0, 3.0, 4.0, 5.0)

A malformed group never aborts parsing: the switch falls back to its
default and a notification is recorded on the grid.
"""

import logging
import math
import re
from typing import Any, Dict, List, Optional, Tuple, Union

from app.modules.experiment.registry import AlgorithmSpec, DEFAULT_ALGORITHM, SwitchSpec, ValueKind, get_algorithm
from app.modules.experiment.schemas import ParamGrid

logger = logging.getLogger(__name__)

INDIVIDUAL = "individual"
SEQUENCE = "sequence"

_SWITCH_TOKEN = re.compile(r"^-[A-Za-z]+$")


def _tokenize(args: Union[str, List[str]]) -> List[str]:
    return args.split() if isinstance(args, str) else [str(token) for token in args]


def _groups(tokens: List[str]) -> Tuple[List[Tuple[str, List[str]]], List[str]]:
    """Split the token stream into (switch, arguments) groups plus stray tokens."""
    groups: List[Tuple[str, List[str]]] = []
    stray: List[str] = []
    for token in tokens:
        if _SWITCH_TOKEN.match(token):
            groups.append((token[1:], []))
        elif groups:
            groups[-1][1].append(token)
        else:
            stray.append(token)
    return groups, stray


def expand_sequence(spec: SwitchSpec, arguments: List[str]) -> List[Any]:
    """start, start + inc, ... up to and including `end` when it is hit exactly."""
    if len(arguments) != 3:
        raise ValueError(f"sequence needs exactly 3 values (start, increment, end), got {len(arguments)}")
    start, increment, end = (spec.convert(token) if spec.kind == ValueKind.INT else float(token)
                             for token in arguments)
    if increment <= 0:
        raise ValueError(f"sequence increment must be positive, got {increment}")
    if end < start:
        raise ValueError(f"sequence end {end} lies below its start {start}")

    steps = int(math.floor((end - start) / increment + 1e-9))
    if spec.kind == ValueKind.INT:
        values = [start + i * increment for i in range(steps + 1)]
    else:
        values = [round(start + i * increment, 12) for i in range(steps + 1)]
    return [spec.convert(str(value)) for value in values]


def _resolve_group(spec: SwitchSpec, arguments: List[str]) -> List[Any]:
    if not arguments:
        raise ValueError("no keyword or values given")
    keyword, values = arguments[0].lower(), arguments[1:]
    if keyword == INDIVIDUAL:
        if not values:
            raise ValueError("individual needs at least one value")
        return [spec.convert(token) for token in values]
    if keyword == SEQUENCE:
        if not spec.allows_sequence:
            raise ValueError("sequence is not available for this option")
        return expand_sequence(spec, values)
    raise ValueError(f"unknown keyword '{arguments[0]}' (use individual or sequence)")


def parse_param_grid(args: Union[str, List[str]], algorithm: Optional[Union[str, AlgorithmSpec]] = None) -> ParamGrid:
    """
    Expand a grid string for `algorithm` (default KNN).

    Unspecified switches take their single default value. Every problem
    becomes a notification and the affected switch keeps its default.
    """
    if not isinstance(algorithm, AlgorithmSpec):
        algorithm = get_algorithm(algorithm or DEFAULT_ALGORITHM)

    groups, stray = _groups(_tokenize(args))
    notifications: List[str] = []
    if stray:
        notifications.append(f"Ignored text before the first option: {' '.join(stray)}")

    chosen: Dict[str, List[Any]] = {}
    for letter, arguments in groups:
        spec = algorithm.switch(letter)
        if spec is None:
            notifications.append(f"Unknown option -{letter} for {algorithm.id}; ignored")
            continue
        try:
            chosen[spec.name] = _resolve_group(spec, arguments)
        except ValueError as exc:
            chosen.pop(spec.name, None)
            notifications.append(f"-{letter}: {exc}; using the default ({spec.default})")

    for message in notifications:
        logger.warning(message)

    return ParamGrid(
        values={spec.name: chosen.get(spec.name, [spec.default]) for spec in algorithm.switches},
        notifications=notifications,
    )


def default_grid(algorithm: Union[str, AlgorithmSpec]) -> ParamGrid:
    return parse_param_grid("", algorithm)


def format_value(value: Any) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def render_grid_echo(grid: ParamGrid, algorithm: AlgorithmSpec) -> str:
    """The "<title> Options selected:-" block listing every resolved value list."""
    lines = [f"{algorithm.title} Options selected:-", ""]
    for spec in algorithm.switches:
        values = grid.values.get(spec.name, [spec.default])
        head = f"-{spec.switch} ({spec.description})"
        lines.append(f"{head:<30}---> {' '.join(format_value(v) for v in values)}")
    return "\n".join(lines)


def render_grid_help(algorithm: AlgorithmSpec) -> str:
    lines: List[str] = []
    for spec in algorithm.switches:
        if spec.allows_sequence:
            lines.append(f"-{spec.switch} sequence <start> <increment> <end>")
            lines.append("or")
        lines.append(f"-{spec.switch} individual <{spec.switch} value1> <{spec.switch} value2>...")
        lines.append(f"    {spec.help} (default: {format_value(spec.default)}).")
        lines.append("")
    lines.append("Example usage below;")
    lines.append(f"Type: {algorithm.example_usage}")
    return "\n".join(lines)

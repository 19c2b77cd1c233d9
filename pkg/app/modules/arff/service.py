"""
ARFF reading, writing and one-sided relabelling.
"""

import logging
import re
from typing import List, Optional, Tuple

import numpy as np

from app.shared.exceptions import ArffParseError, RelabelError
from app.modules.arff.schemas import AttributeKind, AttributeSpec, RelabelProvenance
from app.modules.dataset.schemas import ExampleSet, ONE_SIDED_LABELS, OTHER, TARGET

logger = logging.getLogger(__name__)

NUMERIC_TYPES = {"numeric", "real", "integer"}
REJECTED_TYPES = {"string", "date", "relational"}
MISSING_VALUE = "?"

_ATTRIBUTE_LINE = re.compile(
    r"^@attribute\s+('(?:[^'\\]|\\.)*'|\"(?:[^\"\\]|\\.)*\"|\S+)\s+(.+)$", re.IGNORECASE
)
# one comma-separated value: single-quoted, double-quoted or bare
_VALUE = re.compile(r"""\s*(?:'((?:[^'\\]|\\.)*)'|"((?:[^"\\]|\\.)*)"|([^,'"]*?))\s*(,|$)""")
_ESCAPE = re.compile(r"\\(.)")
_NEEDS_QUOTES = re.compile(r"[\s,{}%'\"]")


def _unquote(token: str) -> str:
    token = token.strip()
    if len(token) >= 2 and token[0] == token[-1] and token[0] in "'\"":
        return _ESCAPE.sub(r"\1", token[1:-1])
    return token


def _split_values(text: str, line_number: int) -> List[Tuple[str, bool]]:
    """Split on commas outside quotes; each value comes with whether it was quoted."""
    values: List[Tuple[str, bool]] = []
    position = 0
    while True:
        match = _VALUE.match(text, position)
        if match is None:
            raise ArffParseError(f"unbalanced quotes in '{text}'", line_number)
        single, double, bare, separator = match.groups()
        if bare is None:
            values.append((_ESCAPE.sub(r"\1", single if single is not None else double), True))
        else:
            values.append((bare, False))
        position = match.end()
        if not separator:
            if position < len(text):
                raise ArffParseError(f"unbalanced quotes in '{text}'", line_number)
            return values


def _quote(token: str) -> str:
    if token == "" or _NEEDS_QUOTES.search(token):
        return "'" + token.replace("'", "\\'") + "'"
    return token


def _parse_nominal_values(spec: str, line_number: int) -> Tuple[str, ...]:
    body = spec.strip()
    if not (body.startswith("{") and body.endswith("}")):
        raise ArffParseError(f"malformed nominal specification '{spec}'", line_number)
    # a trailing comma ("{a, b, }") leaves an empty token behind
    values = tuple(v for v, quoted in _split_values(body[1:-1], line_number) if v or quoted)
    if not values:
        raise ArffParseError("nominal attribute with an empty value list", line_number)
    if len(set(values)) != len(values):
        raise ArffParseError("nominal attribute repeats a value", line_number)
    return values


def _parse_attribute(line: str, line_number: int) -> AttributeSpec:
    match = _ATTRIBUTE_LINE.match(line)
    if not match:
        raise ArffParseError(f"malformed attribute declaration '{line}'", line_number)
    name = _unquote(match.group(1))
    type_spec = match.group(2).strip()
    lowered = type_spec.lower()
    if lowered in NUMERIC_TYPES:
        return AttributeSpec(name=name, kind=AttributeKind.NUMERIC)
    if type_spec.startswith("{"):
        return AttributeSpec(
            name=name,
            kind=AttributeKind.NOMINAL,
            values=_parse_nominal_values(type_spec, line_number),
        )
    kind = lowered.split()[0]
    if kind in REJECTED_TYPES:
        raise ArffParseError(f"attribute '{name}' has unsupported type '{kind}'", line_number)
    raise ArffParseError(f"attribute '{name}' has unknown type '{type_spec}'", line_number)


def parse_arff(source: str) -> ExampleSet:
    """
    Parse ARFF text into an ExampleSet.

    Keywords are case-insensitive, `%` lines are comments, and the last
    attribute is the class attribute (it must be nominal). Rows holding a
    missing value (`?`) are skipped with a warning.
    """
    relation: Optional[str] = None
    schema: List[AttributeSpec] = []
    names = set()
    rows: List[List[float]] = []
    labels: List[str] = []
    in_data = False

    for line_number, raw in enumerate(source.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue

        if not in_data:
            lowered = line.lower()
            if lowered.startswith("@relation"):
                if relation is not None:
                    raise ArffParseError("@relation declared twice", line_number)
                relation = _unquote(line[len("@relation"):].strip())
            elif lowered.startswith("@attribute"):
                if relation is None:
                    raise ArffParseError("@attribute before @relation", line_number)
                attribute = _parse_attribute(line, line_number)
                if attribute.name in names:
                    raise ArffParseError(f"attribute '{attribute.name}' redeclared", line_number)
                names.add(attribute.name)
                schema.append(attribute)
            elif lowered.startswith("@data"):
                if relation is None:
                    raise ArffParseError("missing @relation", line_number)
                if not schema:
                    raise ArffParseError("@data without any @attribute", line_number)
                if schema[-1].kind != AttributeKind.NOMINAL:
                    raise ArffParseError(
                        f"class attribute '{schema[-1].name}' must be nominal", line_number
                    )
                in_data = True
            else:
                raise ArffParseError(f"unexpected header line '{line}'", line_number)
            continue

        if line.startswith("{"):
            raise ArffParseError("sparse ARFF rows are not supported", line_number)
        values = _split_values(line, line_number)
        tokens = [value for value, _ in values]
        if len(tokens) != len(schema):
            raise ArffParseError(
                f"row has {len(tokens)} values but {len(schema)} attributes are declared",
                line_number,
            )
        if any(value == MISSING_VALUE and not quoted for value, quoted in values):
            logger.warning(f"Skipping row at line {line_number}: missing value '?'")
            continue

        row: List[float] = []
        for attribute, token in zip(schema[:-1], tokens[:-1]):
            if attribute.kind == AttributeKind.NUMERIC:
                try:
                    row.append(float(token))
                except ValueError:
                    raise ArffParseError(
                        f"non-numeric value '{token}' for attribute '{attribute.name}'", line_number
                    ) from None
            else:
                if token not in attribute.values:
                    raise ArffParseError(
                        f"value '{token}' not in the domain of '{attribute.name}'", line_number
                    )
                row.append(float(attribute.values.index(token)))
        label = tokens[-1]
        if label not in schema[-1].values:
            raise ArffParseError(
                f"label '{label}' not in class domain {list(schema[-1].values)}", line_number
            )
        rows.append(row)
        labels.append(label)

    if relation is None:
        raise ArffParseError("missing @relation")
    if not in_data:
        raise ArffParseError("missing @data")

    return ExampleSet(
        relation=relation,
        schema=tuple(schema),
        features=np.array(rows, dtype=float).reshape(len(rows), len(schema) - 1),
        labels=tuple(labels),
    )


def _format_value(attribute: AttributeSpec, value: float) -> str:
    if attribute.kind == AttributeKind.NOMINAL:
        return _quote(attribute.values[int(value)])
    return repr(float(value))


def _provenance_banner(prov: RelabelProvenance) -> List[str]:
    old_values = ", ".join(prov.original_class_values)
    return [
        "%##### O S C A I L #####",
        "%#One-Sided Classification and Inductive Learning#",
        "%#####",
        "%",
        f"%The {prov.original_relation} example set has been relabeled to",
        "%only contain one Target class and one Other class.",
        "%",
        f'%[Target Class = "{prov.target_label}"], [Other Class = All others]',
        "%",
        "%The old class options were written as follows:",
        f"%@attribute class {{ {old_values}, }}",
        "%",
        "%",
        "%",
    ]


def write_arff(example_set: ExampleSet, prov: Optional[RelabelProvenance] = None) -> str:
    """Render an ExampleSet as ARFF text; a provenance banner is emitted for relabelled sets."""
    lines: List[str] = _provenance_banner(prov) if prov is not None else []
    lines.append(f"@relation {_quote(example_set.relation)}")
    for attribute in example_set.feature_attributes:
        if attribute.kind == AttributeKind.NUMERIC:
            lines.append(f"@attribute {_quote(attribute.name)} real")
        else:
            lines.append(
                f"@attribute {_quote(attribute.name)} {{{', '.join(_quote(v) for v in attribute.values)}}}"
            )

    class_attribute = example_set.class_attribute
    if prov is not None or set(class_attribute.values) == set(ONE_SIDED_LABELS):
        class_values = ", ".join(f'"{v}"' for v in class_attribute.values)
    else:
        class_values = ", ".join(_quote(v) for v in class_attribute.values)
    lines.append(f"@attribute {_quote(class_attribute.name)} {{{class_values}}}")

    lines.append("@data")
    if prov is not None:
        lines.extend(["%", "%"])
    for example in example_set.examples():
        values = [_format_value(a, v) for a, v in zip(example_set.feature_attributes, example.features)]
        values.append(_quote(example.label))
        lines.append(", ".join(values))
    return "\n".join(lines) + "\n"


def relabel(example_set: ExampleSet, target_label: str) -> Tuple[ExampleSet, RelabelProvenance]:
    """Map `target_label` rows to Target and every other row to Other."""
    domain = list(example_set.class_attribute.values)
    if target_label not in domain:
        raise RelabelError(
            f"'{target_label}' is not a class of this example set; "
            f"please re-enter one of: {', '.join(domain)}"
        )
    class_attribute = AttributeSpec(
        name=example_set.class_attribute.name,
        kind=AttributeKind.NOMINAL,
        values=ONE_SIDED_LABELS,
    )
    relabelled = ExampleSet(
        relation=example_set.relation,
        schema=example_set.feature_attributes + (class_attribute,),
        features=example_set.features,
        labels=tuple(TARGET if label == target_label else OTHER for label in example_set.labels),
    )
    provenance = RelabelProvenance(
        original_relation=example_set.relation,
        target_label=target_label,
        original_class_values=domain,
    )
    logger.info(
        f"Relabelled '{example_set.relation}': {relabelled.labels.count(TARGET)} Target, "
        f"{relabelled.labels.count(OTHER)} Other"
    )
    return relabelled, provenance


def is_one_sided(example_set: ExampleSet) -> bool:
    """True iff every label is Target or Other and at least one Target exists."""
    labels = set(example_set.labels)
    return TARGET in labels and labels <= set(ONE_SIDED_LABELS)


def read_arff_file(path: str) -> ExampleSet:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_arff(handle.read())


def write_arff_file(example_set: ExampleSet, path: str, prov: Optional[RelabelProvenance] = None) -> None:
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(write_arff(example_set, prov))

"""Machine-readable verification reports.

A report is an ordered list of records. Each check record carries a tag from
:data:`TAGS`, a description, a residual, a threshold and a verdict; the verdict
is ``pass`` exactly when the residual does not exceed the threshold. The text
rendering is tab separated with ``key=value`` fields in a fixed order so that
two runs on the same input produce byte-identical output.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

__all__ = ["TAGS", "Check", "Record", "Report", "format_float", "REPORT_VERSION"]

REPORT_VERSION = "ncsusy-report/1"

#: Every tag a check may carry, mapped to the module implementing the check.
TAGS: dict[str, str] = {
    # N=1 data
    "n1.algebra-star-closed": "spectral",
    "n1.algebra-unital": "spectral",
    "n1.faithful": "spectral",
    "n1.dirac-self-adjoint": "spectral",
    "n1.bounded-commutators": "spectral",
    "n1.theta-summable": "spectral",
    "n1.grading-involution": "spectral",
    "n1.grading-commutes-algebra": "spectral",
    "n1.grading-anticommutes-dirac": "spectral",
    # real structures
    "real.antiunitary": "spectral",
    "real.sign-epsilon": "spectral",
    "real.sign-epsilon-prime": "spectral",
    "real.sign-epsilon-double-prime": "spectral",
    "real.order-zero": "spectral",
    "real.first-order": "spectral",
    "real.ko-table": "spectral",
    # one-forms and modules
    "forms.bimodule": "forms",
    "forms.star-convention": "forms",
    "module.projection": "modules",
    "module.injective": "modules",
    "module.dense": "modules",
    "module.stable-real": "modules",
    "module.stable-grading": "modules",
    "module.positive": "modules",
    "module.left-linear": "modules",
    "tensor.relations": "modules",
    "tensor.gram-hermitian": "modules",
    "tensor.gram-psd": "modules",
    "tensor.gram-descends": "modules",
    "tensor.gram-kernel": "modules",
    # connections
    "connection.leibniz": "connections",
    "connection.compatible": "connections",
    "connection.grading": "connections",
    "connection.flip-well-defined": "connections",
    "connection.flip-twisted-linear": "connections",
    "connection.right-leibniz": "connections",
    "connection.tensored-well-defined": "connections",
    # extension
    "phi.contraction-well-defined": "extension",
    "phi.contraction-bar-well-defined": "extension",
    "phi.dirac-well-defined": "extension",
    "phi.dirac-bar-well-defined": "extension",
    "phi.grading-well-defined": "extension",
    "phi.hodge-well-defined": "extension",
    "phi.algebra-well-defined": "extension",
    # N=(1,1) data
    "n11.faithful": "extension",
    "n11.d-nilpotent": "extension",
    "n11.d-bounded-commutators": "extension",
    "n11.laplacian-trace-class": "extension",
    "n11.grading-involution": "extension",
    "n11.grading-commutes-algebra": "extension",
    "n11.grading-anticommutes-d": "extension",
    "n11.hodge-unitary": "extension",
    "n11.hodge-commutes-algebra": "extension",
    "n11.hodge-intertwines-d": "extension",
    "n11.hodge-self-adjoint": "extension",
    "n11.hodge-involution": "extension",
    "n11.hodge-commutes-grading": "extension",
    "n11.dirac-self-adjoint": "extension",
    "n11.dirac-bar-self-adjoint": "extension",
    "n11.dirac-squares-equal": "extension",
    "n11.diracs-anticommute": "extension",
    "n11.grading-anticommutes-diracs": "extension",
    "n11.hodge-dirac-relations": "extension",
    "n11.grading-equivalence": "extension",
    "n11.hodge-equivalence": "extension",
    "n11.nilpotency-equivalence": "extension",
    "n11.laplacian-is-dirac-square": "extension",
    # products
    "product.kasparov-square": "products",
    "product.equivalence-unitary": "products",
    "product.dirac-convention-equivalence": "products",
    "product.associated-n1-equivalence": "products",
    "product.heat-trace": "products",
    # multiplicativity
    "mult.iso-well-defined": "multiplicativity",
    "mult.iso-unitary": "multiplicativity",
    "mult.iso-intertwines-algebra": "multiplicativity",
    "mult.iso-intertwines-grading": "multiplicativity",
    "mult.hodge-transport": "multiplicativity",
    "mult.variant-dirac": "multiplicativity",
    "mult.variant-dirac-bar": "multiplicativity",
    "mult.spectrum": "multiplicativity",
    "trace.forms-sum": "multiplicativity",
    "trace.forms-direct": "multiplicativity",
    "trace.differential": "multiplicativity",
    "trace.hermitian-factorizes": "multiplicativity",
    "trace.connection-grassmann": "multiplicativity",
    "trace.iso-forms-module": "multiplicativity",
    "trace.iso-module-forms": "multiplicativity",
    "trace.iso-triple": "multiplicativity",
    "trace.flip": "multiplicativity",
    "trace.right-connection": "multiplicativity",
    "trace.tensored-connection": "multiplicativity",
    "trace.contraction": "multiplicativity",
    "trace.contraction-bar": "multiplicativity",
    "trace.dirac": "multiplicativity",
    "trace.dirac-bar": "multiplicativity",
}


def format_float(x: float) -> str:
    """Fixed-width scientific rendering used in every report."""
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:.3e}"


@dataclass(frozen=True)
class Check:
    """One verified identity."""

    tag: str
    description: str
    residual: float
    threshold: float

    def __post_init__(self) -> None:
        if self.tag not in TAGS:
            raise KeyError(f"unregistered check tag {self.tag!r}")

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.threshold)

    @property
    def verdict(self) -> str:
        return "pass" if self.passed else "fail"

    def fields(self) -> list[tuple[str, str]]:
        return [
            ("tag", self.tag),
            ("verdict", self.verdict),
            ("residual", format_float(self.residual)),
            ("threshold", format_float(self.threshold)),
            ("description", self.description),
        ]


@dataclass(frozen=True)
class Record:
    """A non-check line such as a dimension or a verdict-table row."""

    kind: str
    items: tuple[tuple[str, str], ...]


@dataclass
class Report:
    """Ordered collection of checks and informational records."""

    command: str
    input: str
    threshold: float = 1e-10
    entries: list = field(default_factory=list)
    timing: float | None = None

    def check(self, tag: str, description: str, residual: float, threshold: float | None = None) -> Check:
        c = Check(tag, description, float(residual), self.threshold if threshold is None else threshold)
        self.entries.append(c)
        return c

    def trivial(self, tag: str, description: str) -> Check:
        """Record a condition that holds automatically in finite dimension."""
        return self.check(tag, description + " (trivial in finite dimension)", 0.0)

    def info(self, kind: str = "info", **items) -> None:
        self.entries.append(Record(kind, tuple((k, _fmt(v)) for k, v in items.items())))

    def extend(self, other: "Report") -> None:
        self.entries.extend(other.entries)

    @property
    def checks(self) -> list[Check]:
        return [e for e in self.entries if isinstance(e, Check)]

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    @property
    def passed(self) -> bool:
        return not self.failures

    def residual(self, tag: str) -> float:
        """Largest residual among checks carrying ``tag``."""
        values = [c.residual for c in self.checks if c.tag == tag]
        if not values:
            raise KeyError(tag)
        return max(values)

    def get(self, tag: str) -> Check:
        for c in self.checks:
            if c.tag == tag:
                return c
        raise KeyError(tag)

    def to_text(self) -> str:
        from . import __version__

        lines = [_line("report", [("format", REPORT_VERSION), ("version", __version__),
                                  ("command", self.command), ("input", self.input)])]
        for e in self.entries:
            if isinstance(e, Check):
                lines.append(_line("check", e.fields()))
            else:
                lines.append(_line(e.kind, list(e.items)))
        summary = [("verdict", "pass" if self.passed else "fail"),
                   ("checks", str(len(self.checks))), ("failed", str(len(self.failures)))]
        if self.timing is not None:
            summary.append(("seconds", f"{self.timing:.3f}"))
        lines.append(_line("summary", summary))
        return "\n".join(lines) + "\n"

    def to_dict(self) -> dict:
        from . import __version__

        records = []
        for e in self.entries:
            if isinstance(e, Check):
                records.append({"kind": "check", **dict(e.fields())})
            else:
                records.append({"kind": e.kind, **dict(e.items)})
        out = {
            "format": REPORT_VERSION,
            "version": __version__,
            "command": self.command,
            "input": self.input,
            "records": records,
            "verdict": "pass" if self.passed else "fail",
        }
        if self.timing is not None:
            out["seconds"] = round(self.timing, 3)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def _fmt(v) -> str:
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _line(kind: str, items: list[tuple[str, str]]) -> str:
    for k, v in items:
        if "\t" in v or "\n" in v:
            raise ValueError(f"field {k} contains a tab or newline")
    return "\t".join([kind] + [f"{k}={v}" for k, v in items])

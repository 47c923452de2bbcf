"""Flat ``key = value`` configuration files and the validated sweep description.

A config file mirrors the long command-line flags::

    # every kind at N=15 over a 101-point p grid
    kinds = dabt, dsbt, uabt, usbt
    nodes = 15
    p_start = 0
    p_stop = 1
    p_steps = 101

Values given on the command line win over values read from the file.
"""

from __future__ import annotations

import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, Mapping, Optional, Tuple

import numpy as np

from . import _constants as C
from .errors import InvalidParameterError
from .quantum_core import werner_param
from .topology import TreeKind, _check_depth, depth_from_nodes

logger = logging.getLogger(__name__)

WORKERS_ENV = "QTREE_WORKERS"

ANALYSES = ("fidelity", "threshold", "asymptotic")
FORMATS = ("csv", "json", "table")


def parse_kinds(text: str) -> Tuple[TreeKind, ...]:
    """Comma-separated kinds; ``all`` expands to every kind."""
    items = [t.strip() for t in str(text).split(",") if t.strip()]
    if items == ["all"]:
        return tuple(TreeKind)
    return tuple(TreeKind.parse(t) for t in items)


def parse_int_list(text: str) -> Tuple[int, ...]:
    """Comma-separated integers; ``lo..hi`` expands to an inclusive range."""
    out = []
    for item in str(text).split(","):
        item = item.strip()
        if not item:
            continue
        try:
            if ".." in item:
                lo, hi = (int(x) for x in item.split("..", 1))
                out.extend(range(lo, hi + 1))
            else:
                out.append(int(item))
        except ValueError:
            raise InvalidParameterError(f"not an integer or lo..hi range: {item!r}") from None
    return tuple(out)


def parse_float_list(text: str) -> Tuple[float, ...]:
    try:
        return tuple(float(t) for t in str(text).split(",") if t.strip())
    except ValueError:
        raise InvalidParameterError(f"not a list of numbers: {text!r}") from None


def _as_float(text: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise InvalidParameterError(f"not a number: {text!r}") from None


def _as_int(text: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise InvalidParameterError(f"not an integer: {text!r}") from None


_COERCE: Dict[str, Callable[[str], Any]] = {
    "kind": TreeKind.parse,
    "kinds": parse_kinds,
    "depth": _as_int,
    "depths": parse_int_list,
    "nodes": parse_int_list,
    "p": parse_float_list,
    "p_start": _as_float,
    "p_stop": _as_float,
    "p_steps": _as_int,
    "target": _as_float,
    "m": _as_int,
    "strategy": str,
    "trials": _as_int,
    "seed": _as_int,
    "format": str,
    "out": str,
    "analysis": str,
}

CONFIG_KEYS = frozenset(_COERCE)


def read_config(path: "str | os.PathLike") -> Dict[str, str]:
    """Raw string values of a config file; unknown or repeated keys are errors."""
    values: Dict[str, str] = {}
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidParameterError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in CONFIG_KEYS:
            raise InvalidParameterError(f"{path}:{lineno}: unknown key {key!r}")
        if key in values:
            raise InvalidParameterError(f"{path}:{lineno}: duplicate key {key!r}")
        values[key] = value
    logger.debug("read %d config keys from %s", len(values), path)
    return values


def coerce(key: str, text: str) -> Any:
    return _COERCE[key](text)


# Singular keys for commands that only take the list form of a flag.
_LIST_FORMS = {"kind": "kinds", "depth": "depths"}


def apply_config(namespace: Any, values: Mapping[str, str]) -> None:
    """Fill attributes of an argparse namespace that the command line left unset.

    ``kind`` and ``depth`` fill ``kinds`` and ``depths`` on commands that
    only take the list form; any other key the command does not take is an
    error. ``depth``, ``depths`` and ``nodes`` are treated as one choice: if
    any came from the command line, none is taken from the file.
    """
    command = getattr(namespace, "command", None) or "this command"
    size_given = any(getattr(namespace, k, None) is not None for k in ("depth", "depths", "nodes"))
    for key, text in values.items():
        target, value = key, None
        if not hasattr(namespace, key):
            target = _LIST_FORMS.get(key)
            if target is None or not hasattr(namespace, target):
                raise InvalidParameterError(f"config key {key!r} is not an option of {command}")
            if target in values:
                raise InvalidParameterError(f"config keys {key!r} and {target!r} both set {target} for {command}")
            value = (coerce(key, text),)
        if getattr(namespace, target) is not None:
            continue
        if target in ("depth", "nodes", "depths") and size_given:
            continue
        setattr(namespace, target, coerce(key, text) if value is None else value)


def resolve_workers(n_threads: Optional[int] = None) -> int:
    """Worker count: explicit argument, else ``QTREE_WORKERS``, else 1."""
    if n_threads is None:
        raw = os.environ.get(WORKERS_ENV)
        if raw is None or not raw.strip():
            return 1
        try:
            n_threads = int(raw)
        except ValueError:
            raise InvalidParameterError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from None
    if n_threads < 1:
        raise InvalidParameterError(f"worker count must be >= 1, got {n_threads}")
    return int(n_threads)


def p_grid(
    p: Optional[Tuple[float, ...]] = None,
    p_start: Optional[float] = None,
    p_stop: Optional[float] = None,
    p_steps: Optional[int] = None,
) -> Tuple[float, ...]:
    """Explicit values if given, else ``p_steps`` evenly spaced points from start to stop."""
    if p:
        grid = tuple(float(x) for x in p)
    elif p_steps is not None:
        if p_steps < 1:
            raise InvalidParameterError(f"p_steps must be >= 1, got {p_steps}")
        start = 0.0 if p_start is None else p_start
        stop = 1.0 if p_stop is None else p_stop
        grid = tuple(float(x) for x in np.linspace(start, stop, p_steps))
    else:
        grid = ()
    for value in grid:
        werner_param(value)
    return tuple(sorted(set(grid)))


@dataclass(frozen=True)
class SweepConfig:
    """Validated cross-product of kinds, tree sizes and Werner parameters."""

    kinds: Tuple[TreeKind, ...]
    sizes: Tuple[int, ...]
    by_nodes: bool
    p_values: Tuple[float, ...]
    analysis: str = "fidelity"
    target: float = C.CLASSICAL_LIMIT
    out: Optional[str] = None
    format: str = "csv"

    def __post_init__(self):
        if not self.kinds:
            raise InvalidParameterError("sweep needs at least one kind")
        if not self.sizes:
            raise InvalidParameterError("sweep needs at least one depth or node count")
        if self.analysis not in ANALYSES:
            raise InvalidParameterError(f"analysis must be one of {', '.join(ANALYSES)}, got {self.analysis!r}")
        if self.format not in FORMATS:
            raise InvalidParameterError(f"format must be one of {', '.join(FORMATS)}, got {self.format!r}")
        if self.analysis != "threshold" and not self.p_values:
            raise InvalidParameterError(f"{self.analysis} sweep needs a p grid")
        if not 0.5 < self.target < 1.0:
            raise InvalidParameterError(f"target must lie in (1/2, 1), got {self.target!r}")
        for kind in self.kinds:
            self.depths_for(kind)

    def depths_for(self, kind: TreeKind) -> Tuple[int, ...]:
        """Ascending depths for ``kind``; node counts are converted per kind."""
        if self.by_nodes:
            return tuple(sorted({depth_from_nodes(kind, n) for n in self.sizes}))
        return tuple(sorted({_check_depth(d) for d in self.sizes}))

    def ordered_kinds(self) -> Tuple[TreeKind, ...]:
        return tuple(sorted(set(self.kinds), key=lambda k: k.value))

    @classmethod
    def from_namespace(cls, args: Any) -> "SweepConfig":
        kinds = args.kinds or tuple(TreeKind)
        by_nodes = args.nodes is not None
        sizes = tuple(args.nodes) if by_nodes else tuple(args.depths or ())
        return cls(
            kinds=tuple(kinds),
            sizes=sizes,
            by_nodes=by_nodes,
            p_values=p_grid(args.p, args.p_start, args.p_stop, args.p_steps),
            analysis=args.analysis or "fidelity",
            target=C.CLASSICAL_LIMIT if args.target is None else args.target,
            out=args.out,
            format=args.format or "csv",
        )

"""Content-addressed disk cache for :class:`~nlsff.thermo.ThermoModel`.

Entries are keyed by ``(c, q, m)`` rounded to 12 significant digits and
stored as the model's versioned JSON record.  A Fermi boundary looked up from
a density ``D`` is cached separately under ``(c, D, m)``.  Unreadable,
corrupt or outdated entries are rebuilt; writes are atomic.
"""

from __future__ import annotations

import hashlib
import json
import os
import tempfile
from pathlib import Path
from typing import Optional

from .thermo import DEFAULT_NODES, SERIAL_VERSION, ThermoModel, find_q, solve_dressed

CACHE_ENV = "NLSFF_CACHE_DIR"
KEY_DIGITS = 12


def default_cache_dir() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    return Path(os.environ.get("XDG_CACHE_HOME", Path.home() / ".cache")) / "nlsff"


def _fmt(x: float) -> str:
    return f"{float(x):.{KEY_DIGITS}g}"


def cache_key(kind: str, c: float, x: float, m: int) -> str:
    text = f"{kind}|v{SERIAL_VERSION}|c={_fmt(c)}|x={_fmt(x)}|m={int(m)}"
    return hashlib.sha256(text.encode()).hexdigest()[:32]


def _atomic_write(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=".tmp-", suffix=".json")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _read(path: Path) -> Optional[str]:
    try:
        return path.read_text()
    except FileNotFoundError:
        return None


class ThermoCache:
    """Get-or-solve access to thermodynamic models on disk."""

    def __init__(self, directory: Optional[os.PathLike] = None):
        self.directory = Path(directory) if directory is not None else default_cache_dir()
        self.hits = 0
        self.misses = 0

    def path(self, kind: str, c: float, x: float, m: int) -> Path:
        return self.directory / f"{kind}-{cache_key(kind, c, x, m)}.json"

    def model(self, c: float, q: float, m: int = DEFAULT_NODES) -> ThermoModel:
        path = self.path("model", c, q, m)
        text = _read(path)
        if text is not None:
            try:
                model = ThermoModel.from_json(text)
                if model.m == int(m) and _fmt(model.c) == _fmt(c) and _fmt(model.q) == _fmt(q):
                    self.hits += 1
                    return model
            except (ValueError, KeyError, TypeError):
                pass  # corrupt or outdated: rebuild below
        self.misses += 1
        model = solve_dressed(c, q, m)
        _atomic_write(path, model.to_json())
        # hand back exactly what a later hit would return
        return ThermoModel.from_json(model.to_json())

    def fermi_boundary(self, c: float, D: float, m: int = DEFAULT_NODES) -> float:
        path = self.path("fermi", c, D, m)
        text = _read(path)
        if text is not None:
            try:
                rec = json.loads(text)
                if rec.get("version") == SERIAL_VERSION:
                    self.hits += 1
                    return float(rec["q"])
            except (ValueError, KeyError, TypeError):
                pass
        self.misses += 1
        q = find_q(c, D, m)
        record = {"version": SERIAL_VERSION, "c": "%.17g" % c, "D": "%.17g" % D, "m": int(m), "q": "%.17g" % q}
        _atomic_write(path, json.dumps(record, indent=1))
        return q

    def model_for_density(self, c: float, D: float, m: int = DEFAULT_NODES) -> ThermoModel:
        return self.model(c, self.fermi_boundary(c, D, m), m)

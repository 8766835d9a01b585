"""Pipeline configuration: flat ``key = value`` files with typed, range-checked keys."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Optional

from .exceptions import ConfigError


@dataclass
class PipelineConfig:
    # paths
    corpus: Optional[str] = None
    lexicon: Optional[str] = None
    out_dir: Optional[str] = None
    # topic model
    alpha: Optional[float] = None
    beta: float = 0.01
    sweeps: int = 1000
    burn_in: int = 0
    seed: int = 0
    conflict_policy: str = "union"
    estimate: str = "final"
    biterm_window: Optional[int] = None
    # term ranking and keyphrases
    window: int = 1
    damping: float = 0.85
    tol: float = 1e-10
    max_iter: int = 200
    top_n: int = 100
    max_len: int = 4
    min_support: Optional[float] = None
    top_k: int = 10
    soft_assign: bool = False
    # emoticons
    p: float = 0.6
    relevance_source: str = "phi"
    # evaluation
    gain: str = "linear"
    ks: tuple = (5, 10)
    # runtime
    threads: int = 1
    json: bool = False

    def validate(self) -> "PipelineConfig":
        def need(cond, msg):
            if not cond:
                raise ConfigError(msg)

        need(self.alpha is None or self.alpha > 0, "alpha must be > 0")
        need(self.beta > 0, "beta must be > 0")
        need(self.sweeps >= 1, "sweeps must be >= 1")
        need(self.burn_in >= 0, "burn_in must be >= 0")
        need(self.estimate != "average" or self.burn_in < self.sweeps, "burn_in must be < sweeps")
        need(self.conflict_policy in ("union", "drop"), "conflict_policy must be union|drop")
        need(self.estimate in ("final", "average"), "estimate must be final|average")
        need(self.biterm_window is None or self.biterm_window >= 1, "biterm_window must be >= 1")
        need(self.window >= 1, "window must be >= 1")
        need(0 <= self.damping < 1, "damping must lie in [0, 1)")
        need(self.tol > 0, "tol must be > 0")
        need(self.max_iter >= 1, "max_iter must be >= 1")
        need(self.top_n >= 1, "top_n must be >= 1")
        need(self.max_len >= 2, "max_len must be >= 2")
        need(self.min_support is None or self.min_support >= 1, "min_support must be >= 1")
        need(self.top_k >= 1, "top_k must be >= 1")
        need(self.p > 0, "p must be > 0")
        need(self.relevance_source in ("phi", "pagerank"), "relevance_source must be phi|pagerank")
        need(self.gain in ("linear", "exponential"), "gain must be linear|exponential")
        need(len(self.ks) > 0 and all(k >= 1 for k in self.ks), "ks must be positive integers")
        need(self.threads >= 1, "threads must be >= 1")
        return self

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["ks"] = list(self.ks)
        return d


def _parse_bool(text):
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_optional(conv):
    def parse(text):
        if isinstance(text, str) and text.strip().lower() in ("", "none", "null"):
            return None
        return conv(text)
    return parse


def _parse_ks(text):
    if isinstance(text, (list, tuple)):
        return tuple(int(k) for k in text)
    return tuple(int(k) for k in str(text).split(",") if k.strip())


_PARSERS = {
    "corpus": _parse_optional(str), "lexicon": _parse_optional(str), "out_dir": _parse_optional(str),
    "alpha": _parse_optional(float), "biterm_window": _parse_optional(int),
    "min_support": _parse_optional(float), "soft_assign": _parse_bool, "json": _parse_bool,
    "ks": _parse_ks,
}

KEYS = tuple(f.name for f in fields(PipelineConfig))


def parse_value(key, value):
    if key not in KEYS:
        raise ConfigError(f"unknown config key {key!r}")
    if not isinstance(value, str):
        return _parse_ks(value) if key == "ks" else value
    parser = _PARSERS.get(key)
    if parser is None:
        default = PipelineConfig.__dataclass_fields__[key].default
        parser = type(default)
    try:
        return parser(value)
    except ValueError as exc:
        raise ConfigError(f"bad value for {key!r}: {exc}") from None


_INPUT_PATHS = ("corpus", "lexicon")


def read_config_file(path) -> dict:
    """``key = value`` per line; ``#`` starts a comment.

    Relative ``corpus`` and ``lexicon`` paths resolve against the file's directory.
    """
    out = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        value = parse_value(key, value)
        if key in _INPUT_PATHS and value is not None and not Path(value).is_absolute():
            value = str(Path(path).parent / value)
        out[key] = value
    return out


def make_config(path=None, **overrides) -> PipelineConfig:
    """File values first, then non-None ``overrides``; validated."""
    values = read_config_file(path) if path is not None else {}
    for key, value in overrides.items():
        if value is not None:
            values[key] = parse_value(key, value)
    unknown = set(values) - set(KEYS)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return PipelineConfig(**values).validate()

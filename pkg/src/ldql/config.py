"""Settings shared by the command-line front end and the execution backends.

Layer: Core
May only import from: .rewrite, stdlib

Configuration comes from CLI flags only. The HTTP backend additionally
honours the usual proxy environment variables through httpx.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any

from ldql.rewrite import DEFAULT_NORMAL_FORM_LIMIT

_DEFAULT_HTTP_TIMEOUT = 10.0
_DEFAULT_MAX_REDIRECTS = 5
_OUTPUT_FORMATS = ("text", "structured")


@dataclass(frozen=True)
class Settings:
    """Knobs of one ``ldql`` invocation."""

    normal_form_limit: int = DEFAULT_NORMAL_FORM_LIMIT
    http_timeout: float = _DEFAULT_HTTP_TIMEOUT
    max_redirects: int = _DEFAULT_MAX_REDIRECTS
    host_delay: float = 0.0
    output_format: str = "text"
    trace: bool = False
    verbose: bool = False

    def __post_init__(self) -> None:
        if self.output_format not in _OUTPUT_FORMATS:
            raise ValueError(f"unknown output format {self.output_format!r}")
        if self.normal_form_limit < 1:
            raise ValueError("normal_form_limit must be positive")
        if self.http_timeout <= 0:
            raise ValueError("http_timeout must be positive")
        if self.max_redirects < 0 or self.host_delay < 0:
            raise ValueError("max_redirects and host_delay must not be negative")

    @property
    def structured(self) -> bool:
        return self.output_format == "structured"

    def to_dict(self) -> dict[str, Any]:
        return {
            "normal_form_limit": self.normal_form_limit,
            "http_timeout": self.http_timeout,
            "max_redirects": self.max_redirects,
            "host_delay": self.host_delay,
            "output_format": self.output_format,
            "trace": self.trace,
            "verbose": self.verbose,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> Settings:
        """Settings from plain values; missing keys keep their defaults."""
        defaults = cls()
        return cls(
            normal_form_limit=int(d.get("normal_form_limit", defaults.normal_form_limit)),
            http_timeout=float(d.get("http_timeout", defaults.http_timeout)),
            max_redirects=int(d.get("max_redirects", defaults.max_redirects)),
            host_delay=float(d.get("host_delay", defaults.host_delay)),
            output_format=str(d.get("output_format", defaults.output_format)),
            trace=bool(d.get("trace", defaults.trace)),
            verbose=bool(d.get("verbose", defaults.verbose)),
        )

"""Read-only LMFDB client for classical newforms, with an on-disk cache.

The base URL comes from ``FREY_LMFDB_URL`` (default https://www.lmfdb.org).
Responses are cached as JSON files keyed by a hash of the request; a file lock
per entry gives concurrent readers and a single writer.
"""

from __future__ import annotations

import hashlib
import json
import os
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import httpx
from filelock import FileLock

from .heckedata import NewformRecord, Q_FIELD
from .numfield import NFElement, NumberFieldSpec

DEFAULT_URL = "https://www.lmfdb.org"


class LMFDBError(RuntimeError):
    """Network or response-format failure (retriable)."""


def base_url() -> str:
    return os.environ.get("FREY_LMFDB_URL", DEFAULT_URL).rstrip("/")


def cache_dir() -> Path:
    d = os.environ.get("FREY_LMFDB_CACHE")
    return Path(d) if d else Path.home() / ".cache" / "multifrey" / "lmfdb"


class LMFDBClient:
    def __init__(self, url: str | None = None, cache: Path | None = None, transport: httpx.BaseTransport | None = None):
        self.url = (url or base_url()).rstrip("/")
        self.cache = cache or cache_dir()
        self._transport = transport or httpx.HTTPTransport(retries=3)

    def _key(self, path: str, params: Mapping[str, Any]) -> str:
        blob = json.dumps([self.url, path, sorted((k, str(v)) for k, v in params.items())])
        return hashlib.sha256(blob.encode()).hexdigest()

    def get(self, path: str, params: Mapping[str, Any]) -> dict:
        self.cache.mkdir(parents=True, exist_ok=True)
        key = self._key(path, params)
        target = self.cache / f"{key}.json"
        with FileLock(str(target) + ".lock"):
            if target.exists():
                return json.loads(target.read_text(encoding="utf-8"))
            try:
                with httpx.Client(base_url=self.url, transport=self._transport, timeout=30) as client:
                    resp = client.get(path, params=dict(params))
                    resp.raise_for_status()
                    data = resp.json()
            except (httpx.HTTPError, ValueError) as exc:
                raise LMFDBError(f"LMFDB request {path} failed: {exc}") from exc
            tmp = target.with_suffix(".tmp")
            tmp.write_text(json.dumps(data), encoding="utf-8")
            tmp.replace(target)
            return data

    def newforms(self, level: int) -> list[dict]:
        data = self.get(
            "/api/mf_newforms/",
            {
                "level": level,
                "weight": 2,
                "char_order": 1,
                "_format": "json",
                "_fields": "label,dim,field_poly,hecke_orbit_code",
            },
        )
        return list(data.get("data", []))

    def hecke_nf(self, orbit_code: int) -> dict:
        data = self.get(
            "/api/mf_hecke_nf/",
            {
                "hecke_orbit_code": orbit_code,
                "_format": "json",
                "_fields": "ap,hecke_ring_numerators,hecke_ring_denominators,field_poly,maxp",
            },
        )
        rows = data.get("data", [])
        if len(rows) != 1:
            raise LMFDBError(f"expected one Hecke row for orbit {orbit_code}, got {len(rows)}")
        return rows[0]


def _ap_to_power_basis(ap: list[int], nums: list[list[int]] | None, dens: list[int] | None) -> list[Fraction]:
    if nums is None:
        return [Fraction(c) for c in ap]
    out: list[Fraction] = [Fraction(0)] * max(len(n) for n in nums)
    for c, num, den in zip(ap, nums, dens or [1] * len(nums)):
        for k, x in enumerate(num):
            out[k] += Fraction(c * x, den)
    return out


def fetch_classical_records(level: int, bound: int = 41, client: LMFDBClient | None = None) -> list[NewformRecord]:
    """Weight-2 trivial-character newforms of the given level from LMFDB."""
    from sympy import primerange

    client = client or LMFDBClient()
    primes = list(primerange(2, bound))
    out = []
    for nf in client.newforms(level):
        row = client.hecke_nf(nf["hecke_orbit_code"])
        poly = tuple(int(c) for c in row.get("field_poly") or nf.get("field_poly") or (0, 1))
        spec = Q_FIELD if len(poly) == 2 else NumberFieldSpec(poly)
        aps = row["ap"]
        if len(aps) < len(primes):
            raise LMFDBError(f"{nf['label']}: only {len(aps)} eigenvalues available")
        eig = {}
        for q, ap in zip(primes, aps):
            coords = _ap_to_power_basis(ap, row.get("hecke_ring_numerators"), row.get("hecke_ring_denominators"))
            if spec is Q_FIELD:
                coords = coords[:1]
            eig[q] = NFElement(spec, coords)
        out.append(
            NewformRecord(
                label=nf["label"],
                base_field="Q",
                level=level,
                hecke_field=spec,
                eigenvalues=eig,
                provenance="lmfdb",
                complete_below_norm=bound,
            )
        )
    return out

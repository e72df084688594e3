"""NVD CVE API 2.0 client with on-disk caching and a strict offline mode.

Resolves CVSS 3.1 vector strings for vulnerabilities whose vectors are not
inlined in the scenario file. Records are cached one JSON document per CVE;
cache writes are atomic so concurrent fetchers never see torn files.
"""

from __future__ import annotations

import json
import os
import re
import tempfile
import threading
import time
from dataclasses import dataclass
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path
from typing import Any, Callable, Iterable, Mapping, TYPE_CHECKING

from .cvss import parse_vector

if TYPE_CHECKING:
    from .scenario import ScenarioModel

DEFAULT_API_URL = "https://services.nvd.nist.gov/rest/json/cves/2.0"
CVE_ID_PATTERN = re.compile(r"^CVE-\d{4}-\d{4,}$")

# Published service limits: 5 requests per 30 s without a key, 50 with one.
NO_KEY_INTERVAL = 6.0
API_KEY_INTERVAL = 0.6
_PREFETCH_WORKERS = 4


class NvdError(Exception):
    """Base class for NVD resolution failures."""


class OfflineMissError(NvdError):
    def __init__(self, cve_id: str):
        super().__init__(f"{cve_id} is not cached and the client is offline")
        self.cve_id = cve_id


class NotFoundError(NvdError):
    def __init__(self, cve_id: str):
        super().__init__(f"{cve_id} not found in the NVD")
        self.cve_id = cve_id


class NoV31MetricsError(NvdError):
    def __init__(self, cve_id: str):
        super().__init__(f"{cve_id} carries no CVSS 3.1 metrics")
        self.cve_id = cve_id


class RateLimitedError(NvdError):
    def __init__(self, cve_id: str, retry_after: float | None):
        hint = f"; retry after {retry_after:g}s" if retry_after is not None else ""
        super().__init__(f"rate limited while fetching {cve_id}{hint}")
        self.cve_id = cve_id
        self.retry_after = retry_after


class TransportError(NvdError):
    """Network failure or an unexpected HTTP status."""


class PrefetchError(NvdError):
    """One or more CVEs could not be resolved during prefetch."""

    def __init__(self, errors: dict[str, NvdError]):
        detail = "; ".join(f"{cve}: {err}" for cve, err in errors.items())
        super().__init__(f"unresolved CVEs: {detail}")
        self.errors = errors


class RecordSource(str, Enum):
    LIVE = "live"
    CACHE = "cache"
    FIXTURE = "fixture"


@dataclass(frozen=True)
class CveRecord:
    cve_id: str
    vector_string: str
    base_score: float | None
    retrieved_at: datetime | None
    source: RecordSource

    def exploitability(self):
        """The record's exploitability metrics, parsed."""
        return parse_vector(self.vector_string)


# transport(url, params, headers, timeout) -> (status, parsed JSON body, headers)
Transport = Callable[[str, Mapping[str, str], Mapping[str, str], float], tuple]


def _requests_transport(url, params, headers, timeout):
    import requests

    try:
        resp = requests.get(url, params=params, headers=headers, timeout=timeout)
    except requests.RequestException as exc:
        raise TransportError(f"request to NVD failed: {exc}") from exc
    try:
        body = resp.json()
    except ValueError:
        body = None
    return resp.status_code, body, resp.headers


class NvdClient:
    """Fetch CVE records, preferring cache, then fixtures, then the live API."""

    def __init__(
        self,
        cache_dir: str | Path | None = None,
        *,
        offline: bool = False,
        api_key: str | None = None,
        fixture_dir: str | Path | None = None,
        transport: Transport | None = None,
        request_interval: float | None = None,
        timeout: float = 30.0,
        api_url: str = DEFAULT_API_URL,
    ):
        self.cache_dir = Path(cache_dir) if cache_dir is not None else None
        self.offline = offline
        self.api_key = api_key
        self.fixture_dir = Path(fixture_dir) if fixture_dir is not None else None
        self.timeout = timeout
        self.api_url = api_url
        self._transport = transport or _requests_transport
        if request_interval is not None:
            self._interval = request_interval
        else:
            self._interval = API_KEY_INTERVAL if api_key else NO_KEY_INTERVAL
        self._lock = threading.Lock()
        self._next_slot = 0.0

    @property
    def request_interval(self) -> float:
        """Seconds between live requests, per the service's published limits."""
        return self._interval

    def fetch(self, cve_id: str, *, refresh: bool = False) -> CveRecord:
        """Resolve one CVE. Raises before any network activity when offline."""
        if not CVE_ID_PATTERN.match(cve_id):
            raise ValueError(f"invalid CVE identifier {cve_id!r}")
        if not refresh:
            cached = self._read_cache(cve_id)
            if cached is not None:
                return cached
            fixture = self._read_fixture(cve_id)
            if fixture is not None:
                return fixture
        if self.offline:
            raise OfflineMissError(cve_id)
        return self._fetch_live(cve_id)

    def prefetch(self, scenario: "ScenarioModel", *, refresh: bool = False) -> list[CveRecord]:
        """Resolve every vulnerability lacking an inline vector.

        Sequential with rate-limit spacing by default; bounded parallelism
        when an API key is configured. Fails if any CVE stays unresolved.
        """
        wanted: list[str] = []
        for vuln in scenario.vulnerabilities:
            if vuln.vector is None and vuln.cve_id not in wanted:
                wanted.append(vuln.cve_id)
        if not wanted:
            return []

        records: dict[str, CveRecord] = {}
        errors: dict[str, NvdError] = {}
        if self.api_key and len(wanted) > 1:
            from concurrent.futures import ThreadPoolExecutor

            with ThreadPoolExecutor(max_workers=min(_PREFETCH_WORKERS, len(wanted))) as pool:
                futures = {cve: pool.submit(self.fetch, cve, refresh=refresh) for cve in wanted}
                for cve, future in futures.items():
                    try:
                        records[cve] = future.result()
                    except NvdError as exc:
                        errors[cve] = exc
        else:
            for cve in wanted:
                try:
                    records[cve] = self.fetch(cve, refresh=refresh)
                except NvdError as exc:
                    errors[cve] = exc
        if errors:
            if len(errors) == 1:
                raise next(iter(errors.values()))
            raise PrefetchError(errors)
        return [records[cve] for cve in wanted]

    # -- cache ------------------------------------------------------------

    def cache_path(self, cve_id: str) -> Path | None:
        if self.cache_dir is None:
            return None
        return self.cache_dir / f"{cve_id}.json"

    def _read_cache(self, cve_id: str) -> CveRecord | None:
        path = self.cache_path(cve_id)
        if path is None or not path.exists():
            return None
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
            return CveRecord(
                cve_id=data["cve_id"],
                vector_string=data["vector_string"],
                base_score=data.get("base_score"),
                retrieved_at=datetime.fromisoformat(data["retrieved_at"]),
                source=RecordSource.CACHE,
            )
        except (ValueError, KeyError, OSError):
            # Corrupt cache entries are treated as misses, not fatal errors.
            return None

    def write_cache(self, record: CveRecord) -> None:
        path = self.cache_path(record.cve_id)
        if path is None:
            return
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = {
            "cve_id": record.cve_id,
            "vector_string": record.vector_string,
            "base_score": record.base_score,
            "retrieved_at": record.retrieved_at.isoformat() if record.retrieved_at else None,
        }
        fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as handle:
                json.dump(payload, handle, indent=2)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise

    def read_cached(self, cve_id: str) -> CveRecord | None:
        """Public cache lookup; returns None on miss."""
        return self._read_cache(cve_id)

    # -- fixtures ----------------------------------------------------------

    def _read_fixture(self, cve_id: str) -> CveRecord | None:
        if self.fixture_dir is None:
            return None
        path = self.fixture_dir / f"{cve_id}.json"
        if not path.exists():
            return None
        body = json.loads(path.read_text(encoding="utf-8"))
        vector, score = _extract_v31(body, cve_id)
        return CveRecord(
            cve_id=cve_id,
            vector_string=vector,
            base_score=score,
            retrieved_at=None,
            source=RecordSource.FIXTURE,
        )

    # -- live --------------------------------------------------------------

    def _pace(self) -> None:
        if self._interval <= 0:
            return
        with self._lock:
            now = time.monotonic()
            start = max(now, self._next_slot)
            self._next_slot = start + self._interval
        wait = start - now
        if wait > 0:
            time.sleep(wait)

    def _fetch_live(self, cve_id: str) -> CveRecord:
        headers = {"apiKey": self.api_key} if self.api_key else {}
        self._pace()
        status, body, resp_headers = self._transport(
            self.api_url, {"cveId": cve_id}, headers, self.timeout
        )
        if status in (403, 429):
            retry_after = None
            raw = resp_headers.get("Retry-After") if resp_headers else None
            if raw is not None:
                try:
                    retry_after = float(raw)
                except ValueError:
                    pass
            raise RateLimitedError(cve_id, retry_after)
        if status == 404:
            raise NotFoundError(cve_id)
        if status != 200 or body is None:
            raise TransportError(f"NVD returned HTTP {status} for {cve_id}")
        vector, score = _extract_v31(body, cve_id)
        record = CveRecord(
            cve_id=cve_id,
            vector_string=vector,
            base_score=score,
            retrieved_at=datetime.now(timezone.utc),
            source=RecordSource.LIVE,
        )
        self.write_cache(record)
        return record


def _extract_v31(body: Mapping[str, Any], cve_id: str) -> tuple[str, float | None]:
    """Pull the CVSS 3.1 vector and base score from an API 2.0 document.

    Prefers the Primary (NVD-sourced) metric entry when several exist.
    """
    matches = body.get("vulnerabilities") or []
    if not matches:
        raise NotFoundError(cve_id)
    cve = matches[0].get("cve", {})
    entries = (cve.get("metrics") or {}).get("cvssMetricV31") or []
    if not entries:
        raise NoV31MetricsError(cve_id)
    chosen = next((e for e in entries if e.get("type") == "Primary"), entries[0])
    data = chosen.get("cvssData") or {}
    vector = data.get("vectorString")
    if not vector:
        raise NoV31MetricsError(cve_id)
    parse_vector(vector)  # reject records whose vector cannot drive the pipeline
    score = data.get("baseScore")
    return vector, float(score) if score is not None else None


def records_by_cve(records: Iterable[CveRecord]) -> dict[str, CveRecord]:
    return {r.cve_id: r for r in records}

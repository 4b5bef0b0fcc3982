"""Live environment probes bound to checkpoints.

A probe turns a checkpoint from an attestation into a measurement: open a
socket, resolve a name, fetch a URL, inspect a certificate, stat a file, or
(only when explicitly allow-listed) run a command.  Probes never raise; they
come back as a ProbeResult whose outcome is one of

    Pass  - the expectation was observed to hold
    Fail  - the expectation was observed definitively not to hold, including
            the target refusing or timing out
    Error - the engine could not observe the target at all (name resolution,
            local socket trouble, disabled command probes, bad spec targets)

The split matters for gating: Fail marks the checkpoint non-compliant, Error
leaves the recorded answer alone so a broken resolver cannot flip a score.
"""

from __future__ import annotations

import hashlib
import json
import os
import socket
import ssl
import subprocess
import time
import urllib.error
import urllib.request
from concurrent.futures import ThreadPoolExecutor
from concurrent.futures import TimeoutError as FutureTimeout
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Sequence

from .errors import SchemaError

DEFAULT_TIMEOUT_MS = 3000
DEFAULT_RETRIES = 1


class ProbeKind(str, Enum):
    TCP_PORT = "tcp_port"
    DNS_RESOLVE = "dns_resolve"
    HTTP_STATUS = "http_status"
    TLS_CERT_EXPIRY = "tls_cert_expiry"
    FILE_EXISTS = "file_exists"
    COMMAND_EXIT = "command_exit"


class ProbeOutcome(str, Enum):
    PASS = "Pass"
    FAIL = "Fail"
    ERROR = "Error"


@dataclass(frozen=True, slots=True)
class ProbeSpec:
    kind: ProbeKind
    host: str = ""
    port: int = 0
    expect: str = "open"  # tcp_port: "open" or "closed"
    hostname: str = ""  # dns_resolve
    url: str = ""  # http_status
    expect_class: int = 2  # http_status: 1..5
    min_days_remaining: int = 14  # tls_cert_expiry
    path: str = ""  # file_exists
    argv: tuple[str, ...] = ()  # command_exit
    expect_code: int = 0  # command_exit
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    retries: int = DEFAULT_RETRIES

    def __post_init__(self) -> None:
        if self.timeout_ms <= 0:
            raise SchemaError("probe timeout_ms must be positive")
        if self.retries < 0:
            raise SchemaError("probe retries must be >= 0")
        k = self.kind
        if k == ProbeKind.TCP_PORT:
            if not self.host or not (1 <= self.port <= 65535):
                raise SchemaError("tcp_port probe needs host and port 1..65535")
            if self.expect not in ("open", "closed"):
                raise SchemaError("tcp_port expect must be 'open' or 'closed'")
        elif k == ProbeKind.DNS_RESOLVE:
            if not self.hostname:
                raise SchemaError("dns_resolve probe needs hostname")
        elif k == ProbeKind.HTTP_STATUS:
            if not self.url.startswith(("http://", "https://")):
                raise SchemaError("http_status probe needs an http(s) url")
            if not 1 <= self.expect_class <= 5:
                raise SchemaError("http_status expect_class must be 1..5")
        elif k == ProbeKind.TLS_CERT_EXPIRY:
            if not self.host or not (1 <= self.port <= 65535):
                raise SchemaError("tls_cert_expiry probe needs host and port")
            if self.min_days_remaining < 0:
                raise SchemaError("min_days_remaining must be >= 0")
        elif k == ProbeKind.FILE_EXISTS:
            if not self.path:
                raise SchemaError("file_exists probe needs path")
        elif k == ProbeKind.COMMAND_EXIT:
            if not self.argv:
                raise SchemaError("command_exit probe needs argv")

    def to_doc(self) -> dict[str, Any]:
        doc: dict[str, Any] = {"kind": self.kind.value}
        k = self.kind
        if k == ProbeKind.TCP_PORT:
            doc.update(host=self.host, port=self.port, expect=self.expect)
        elif k == ProbeKind.DNS_RESOLVE:
            doc.update(hostname=self.hostname)
        elif k == ProbeKind.HTTP_STATUS:
            doc.update(url=self.url, expect_class=self.expect_class)
        elif k == ProbeKind.TLS_CERT_EXPIRY:
            doc.update(
                host=self.host,
                port=self.port,
                min_days_remaining=self.min_days_remaining,
            )
        elif k == ProbeKind.FILE_EXISTS:
            doc.update(path=self.path)
        elif k == ProbeKind.COMMAND_EXIT:
            doc.update(argv=list(self.argv), expect_code=self.expect_code)
        doc.update(timeout_ms=self.timeout_ms, retries=self.retries)
        return doc

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "ProbeSpec":
        if not isinstance(doc, dict) or "kind" not in doc:
            raise SchemaError("probe must be an object with a 'kind'")
        try:
            kind = ProbeKind(doc["kind"])
        except ValueError:
            raise SchemaError(f"unknown probe kind {doc['kind']!r}") from None
        known = {
            "kind", "host", "port", "expect", "hostname", "url",
            "expect_class", "min_days_remaining", "path", "argv",
            "expect_code", "timeout_ms", "retries",
        }
        stray = set(doc) - known
        if stray:
            raise SchemaError(f"unknown probe fields: {sorted(stray)}")
        kwargs: dict[str, Any] = {
            key: doc[key] for key in known - {"kind", "argv"} if key in doc
        }
        if "argv" in doc:
            argv = doc["argv"]
            if not isinstance(argv, list) or not all(
                isinstance(a, str) for a in argv
            ):
                raise SchemaError("probe argv must be a list of strings")
            kwargs["argv"] = tuple(argv)
        return cls(kind=kind, **kwargs)


@dataclass(frozen=True, slots=True)
class ProbeResult:
    spec: ProbeSpec
    outcome: ProbeOutcome
    observed: str
    started_at: str
    duration_ms: int
    attempts: int

    def transcript(self) -> bytes:
        """Canonical bytes of this result, stored as evidence."""
        doc = {
            "probe": self.spec.to_doc(),
            "outcome": self.outcome.value,
            "observed": self.observed,
            "started_at": self.started_at,
            "duration_ms": self.duration_ms,
            "attempts": self.attempts,
        }
        return (json.dumps(doc, indent=2, sort_keys=True) + "\n").encode("utf-8")


@dataclass(frozen=True, slots=True)
class Evidence:
    id: str
    source: str  # "probe", "attestation" or "document"
    digest: str  # sha256 hex of the stored artifact
    captured_at: str
    description: str = ""

    def to_doc(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "source": self.source,
            "digest": self.digest,
            "captured_at": self.captured_at,
            "description": self.description,
        }

    @classmethod
    def from_doc(cls, doc: dict[str, Any]) -> "Evidence":
        return cls(
            id=str(doc["id"]),
            source=str(doc["source"]),
            digest=str(doc["digest"]),
            captured_at=str(doc["captured_at"]),
            description=str(doc.get("description", "")),
        )


def sha256_hex(content: bytes) -> str:
    return hashlib.sha256(content).hexdigest()


def _now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


# --- single-attempt checks ------------------------------------------------------

def _attempt_tcp_port(spec: ProbeSpec, timeout_s: float) -> tuple[ProbeOutcome, str]:
    try:
        with socket.create_connection((spec.host, spec.port), timeout=timeout_s):
            observed = "open"
    except socket.gaierror as exc:
        return ProbeOutcome.ERROR, f"cannot resolve {spec.host}: {exc}"
    except (ConnectionRefusedError, ConnectionResetError):
        observed = "closed"
    except (socket.timeout, TimeoutError):
        observed = "filtered (connect timed out)"
    except OSError as exc:
        observed = f"unreachable ({exc})"
    wanted_open = spec.expect == "open"
    is_open = observed == "open"
    outcome = ProbeOutcome.PASS if is_open == wanted_open else ProbeOutcome.FAIL
    return outcome, f"port {observed}"


def _attempt_dns(spec: ProbeSpec, timeout_s: float) -> tuple[ProbeOutcome, str]:
    def lookup() -> list:
        return socket.getaddrinfo(spec.hostname, None)

    try:
        with ThreadPoolExecutor(max_workers=1) as pool:
            infos = pool.submit(lookup).result(timeout=timeout_s)
    except FutureTimeout:
        return ProbeOutcome.ERROR, "resolver did not answer in time"
    except socket.gaierror as exc:
        if exc.errno == socket.EAI_AGAIN:
            return ProbeOutcome.ERROR, f"resolver unavailable: {exc}"
        return ProbeOutcome.FAIL, f"does not resolve: {exc}"
    addresses = sorted({info[4][0] for info in infos})
    return ProbeOutcome.PASS, "resolves to " + ", ".join(addresses)


def _attempt_http(spec: ProbeSpec, timeout_s: float) -> tuple[ProbeOutcome, str]:
    try:
        with urllib.request.urlopen(spec.url, timeout=timeout_s) as resp:
            status = resp.status
    except urllib.error.HTTPError as exc:
        status = exc.code
    except urllib.error.URLError as exc:
        if isinstance(exc.reason, socket.gaierror):
            return ProbeOutcome.ERROR, f"cannot resolve host: {exc.reason}"
        return ProbeOutcome.FAIL, f"no http response ({exc.reason})"
    except (socket.timeout, TimeoutError):
        return ProbeOutcome.FAIL, "no http response (timed out)"
    except ValueError as exc:
        return ProbeOutcome.ERROR, f"bad url: {exc}"
    ok = status // 100 == spec.expect_class
    outcome = ProbeOutcome.PASS if ok else ProbeOutcome.FAIL
    return outcome, f"status {status}"


def _attempt_tls(spec: ProbeSpec, timeout_s: float) -> tuple[ProbeOutcome, str]:
    context = ssl.create_default_context()
    # Expiry is the subject here; trust-chain problems should still let us
    # read notAfter rather than abort the observation.
    context.check_hostname = False
    context.verify_mode = ssl.CERT_NONE
    try:
        with socket.create_connection((spec.host, spec.port), timeout=timeout_s) as raw:
            with context.wrap_socket(raw, server_hostname=spec.host) as tls:
                der = tls.getpeercert(binary_form=True)
    except socket.gaierror as exc:
        return ProbeOutcome.ERROR, f"cannot resolve {spec.host}: {exc}"
    except (ConnectionRefusedError, socket.timeout, TimeoutError) as exc:
        return ProbeOutcome.FAIL, f"no tls endpoint ({exc or 'timed out'})"
    except (ssl.SSLError, OSError) as exc:
        return ProbeOutcome.FAIL, f"tls handshake failed ({exc})"
    if der is None:
        return ProbeOutcome.FAIL, "peer presented no certificate"
    not_after = _cert_not_after(der)
    if not_after is None:
        return ProbeOutcome.ERROR, "could not read certificate expiry"
    remaining = (not_after - datetime.now(timezone.utc)).total_seconds() / 86400
    observed = f"certificate expires {not_after:%Y-%m-%d} ({remaining:.1f} days)"
    if remaining >= spec.min_days_remaining:
        return ProbeOutcome.PASS, observed
    return ProbeOutcome.FAIL, observed


def _cert_not_after(der: bytes) -> datetime | None:
    """Pull notAfter out of a DER certificate without extra dependencies.

    Validity holds two consecutive UTCTime (0x17) / GeneralizedTime (0x18)
    values; the second is notAfter.  A linear scan for time-tagged fields is
    enough for well-formed certificates.
    """
    stamps: list[datetime] = []
    i = 0
    while i < len(der) - 2 and len(stamps) < 2:
        tag = der[i]
        if tag in (0x17, 0x18):
            length = der[i + 1]
            raw = der[i + 2 : i + 2 + length]
            parsed = _parse_asn1_time(raw.decode("ascii", "replace"), tag)
            if parsed is not None:
                stamps.append(parsed)
                i += 2 + length
                continue
        i += 1
    return stamps[1] if len(stamps) == 2 else None


def _parse_asn1_time(text: str, tag: int) -> datetime | None:
    fmt = "%y%m%d%H%M%SZ" if tag == 0x17 else "%Y%m%d%H%M%SZ"
    try:
        return datetime.strptime(text, fmt).replace(tzinfo=timezone.utc)
    except ValueError:
        return None


def _attempt_file(spec: ProbeSpec) -> tuple[ProbeOutcome, str]:
    if os.path.exists(spec.path):
        return ProbeOutcome.PASS, "path exists"
    return ProbeOutcome.FAIL, "path does not exist"


def _attempt_command(
    spec: ProbeSpec, timeout_s: float, allowlist: Sequence[str]
) -> tuple[ProbeOutcome, str]:
    if spec.argv[0] not in allowlist:
        return (
            ProbeOutcome.ERROR,
            f"command probes disabled: {spec.argv[0]!r} is not allow-listed",
        )
    try:
        proc = subprocess.run(
            list(spec.argv),
            capture_output=True,
            timeout=timeout_s,
        )
    except subprocess.TimeoutExpired:
        return ProbeOutcome.FAIL, "command timed out"
    except FileNotFoundError:
        return ProbeOutcome.ERROR, f"command not found: {spec.argv[0]!r}"
    except OSError as exc:
        return ProbeOutcome.ERROR, f"could not start command: {exc}"
    ok = proc.returncode == spec.expect_code
    outcome = ProbeOutcome.PASS if ok else ProbeOutcome.FAIL
    return outcome, f"exit code {proc.returncode}"


def run_probe(
    spec: ProbeSpec, command_allowlist: Sequence[str] = ()
) -> ProbeResult:
    """Execute one probe, retrying failed attempts up to spec.retries times."""
    timeout_s = spec.timeout_ms / 1000.0
    started_at = _now()
    begin = time.monotonic()
    attempts = 0
    outcome, observed = ProbeOutcome.ERROR, "probe never ran"
    for attempts in range(1, spec.retries + 2):
        if spec.kind == ProbeKind.TCP_PORT:
            outcome, observed = _attempt_tcp_port(spec, timeout_s)
        elif spec.kind == ProbeKind.DNS_RESOLVE:
            outcome, observed = _attempt_dns(spec, timeout_s)
        elif spec.kind == ProbeKind.HTTP_STATUS:
            outcome, observed = _attempt_http(spec, timeout_s)
        elif spec.kind == ProbeKind.TLS_CERT_EXPIRY:
            outcome, observed = _attempt_tls(spec, timeout_s)
        elif spec.kind == ProbeKind.FILE_EXISTS:
            outcome, observed = _attempt_file(spec)
        elif spec.kind == ProbeKind.COMMAND_EXIT:
            outcome, observed = _attempt_command(spec, timeout_s, command_allowlist)
        if outcome == ProbeOutcome.PASS:
            break
    duration_ms = int((time.monotonic() - begin) * 1000)
    return ProbeResult(
        spec=spec,
        outcome=outcome,
        observed=observed,
        started_at=started_at,
        duration_ms=duration_ms,
        attempts=attempts,
    )

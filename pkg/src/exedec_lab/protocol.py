"""Line-delimited JSON protocol for external prediction backends.

Request (one line)::

    {"role": "subgoal" | "subprogram", "domain": "deepcoder" | "robustfill",
     "beam": 10, "examples": [{"inputs": {"x0": V}, "output": V}, ...]}

Response (one line)::

    {"candidates": [...]}

A subgoal candidate is a list holding one value per example; a subprogram
candidate is the canonical text of one step. Values are tagged:
``{"int": n}``, ``{"bool": b}``, ``{"list": [n, ...]}`` or ``{"str": s}``.
A response of the form ``{"error": "..."}`` reports a failed request.

Endpoints are ``stdio:<command line>`` (a child process speaking on its
standard streams) or ``tcp:<host>:<port>``.
"""

from __future__ import annotations

import json
import logging
import selectors
import shlex
import socket
import subprocess
import time

from .engine import PredictionBackend
from .errors import BackendError, ParseError, ProtocolError, SpecError
from .syntax import Domain
from .text import parse_step
from .values import Example, TaskSpec, Value, kind_of, normalize

log = logging.getLogger(__name__)

DEFAULT_TIMEOUT = 30.0


def encode_value(value: Value) -> dict:
    kind = kind_of(value)
    if kind.value == "list":
        return {"list": list(value)}
    return {kind.value: value}


def decode_value(obj) -> Value:
    if not isinstance(obj, dict) or len(obj) != 1:
        raise ProtocolError(f"malformed value {obj!r}")
    (tag, payload), = obj.items()
    if tag == "int" and isinstance(payload, int) and not isinstance(payload, bool):
        return payload
    if tag == "bool" and isinstance(payload, bool):
        return payload
    if tag == "str" and isinstance(payload, str):
        return payload
    if tag == "list" and isinstance(payload, list):
        try:
            return normalize(payload)
        except SpecError as exc:
            raise ProtocolError(str(exc)) from None
    raise ProtocolError(f"malformed value {obj!r}")


def encode_spec(spec: TaskSpec) -> list[dict]:
    return [
        {"inputs": {name: encode_value(v) for name, v in ex.inputs}, "output": encode_value(ex.output)}
        for ex in spec.examples
    ]


def decode_spec(examples) -> TaskSpec:
    if not isinstance(examples, list) or not examples:
        raise ProtocolError("examples must be a non-empty list")
    out = []
    for ex in examples:
        if not isinstance(ex, dict) or not isinstance(ex.get("inputs"), dict) or "output" not in ex:
            raise ProtocolError(f"malformed example {ex!r}")
        inputs = {name: decode_value(v) for name, v in ex["inputs"].items()}
        out.append(Example(inputs, decode_value(ex["output"])))
    try:
        return TaskSpec(out)
    except SpecError as exc:
        raise ProtocolError(str(exc)) from None


def encode_request(role: str, spec: TaskSpec, domain, beam: int) -> str:
    msg = {"role": role, "domain": Domain(domain).value, "beam": beam, "examples": encode_spec(spec)}
    return json.dumps(msg, ensure_ascii=False)


def decode_request(line: str) -> tuple[str, TaskSpec, Domain, int]:
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"request is not JSON: {exc}") from None
    if not isinstance(msg, dict):
        raise ProtocolError("request must be a JSON object")
    role = msg.get("role")
    if role not in ("subgoal", "subprogram"):
        raise ProtocolError(f"unknown role {role!r}")
    try:
        domain = Domain(msg.get("domain"))
    except ValueError:
        raise ProtocolError(f"unknown domain {msg.get('domain')!r}") from None
    beam = msg.get("beam")
    if not isinstance(beam, int) or isinstance(beam, bool) or beam < 1:
        raise ProtocolError(f"beam must be a positive integer, got {beam!r}")
    return role, decode_spec(msg.get("examples")), domain, beam


def encode_response(candidates) -> str:
    return json.dumps({"candidates": candidates}, ensure_ascii=False)


def decode_candidates(line: str, role: str, spec: TaskSpec, domain, beam: int) -> list:
    """Validate a response line and turn it into subgoals or steps."""
    try:
        msg = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"response is not JSON: {exc}") from None
    if isinstance(msg, dict) and "error" in msg:
        raise ProtocolError(f"backend reported an error: {msg['error']}")
    if not isinstance(msg, dict) or not isinstance(msg.get("candidates"), list):
        raise ProtocolError("response must be an object with a 'candidates' list")
    cands = msg["candidates"]
    if len(cands) > beam:
        log.warning("backend returned %d candidates for beam %d; truncating", len(cands), beam)
        cands = cands[:beam]
    out = []
    for cand in cands:
        if role == "subgoal":
            if not isinstance(cand, list):
                raise ProtocolError(f"subgoal candidate must be a list, got {cand!r}")
            if len(cand) != len(spec):
                raise ProtocolError(f"subgoal has {len(cand)} values for {len(spec)} examples")
            out.append(tuple(decode_value(v) for v in cand))
        else:
            if not isinstance(cand, str):
                raise ProtocolError(f"subprogram candidate must be text, got {cand!r}")
            try:
                out.append(parse_step(cand, domain))
            except (ParseError, ValueError) as exc:
                raise ProtocolError(f"unparsable subprogram {cand!r}: {exc}") from None
    return out


# ---------------------------------------------------------------------------
# transports


class _StdioTransport:
    def __init__(self, command: str, timeout: float):
        self.timeout = timeout
        try:
            self.proc = subprocess.Popen(
                shlex.split(command), stdin=subprocess.PIPE, stdout=subprocess.PIPE,
                text=True, encoding="utf-8", bufsize=1,
            )
        except OSError as exc:
            raise BackendError(f"cannot start backend {command!r}: {exc}") from None
        self.selector = selectors.DefaultSelector()
        self.selector.register(self.proc.stdout, selectors.EVENT_READ)

    def exchange(self, line: str) -> str:
        if self.proc.poll() is not None:
            raise BackendError(f"backend exited with status {self.proc.returncode}")
        try:
            self.proc.stdin.write(line + "\n")
            self.proc.stdin.flush()
        except OSError as exc:
            raise BackendError(f"cannot write to backend: {exc}") from None
        if not self.selector.select(self.timeout):
            raise BackendError(f"backend did not answer within {self.timeout} s")
        reply = self.proc.stdout.readline()
        if not reply:
            raise BackendError("backend closed its output")
        return reply

    def close(self):
        if self.proc.poll() is None:
            self.proc.stdin.close()
            try:
                self.proc.wait(timeout=5)
            except subprocess.TimeoutExpired:
                self.proc.kill()
                self.proc.wait()
        self.proc.stdout.close()
        self.selector.close()


class _TcpTransport:
    def __init__(self, host: str, port: int, timeout: float):
        self.timeout = timeout
        try:
            self.sock = socket.create_connection((host, port), timeout=timeout)
        except OSError as exc:
            raise BackendError(f"cannot connect to {host}:{port}: {exc}") from None
        self.buffer = b""

    def exchange(self, line: str) -> str:
        try:
            self.sock.sendall((line + "\n").encode("utf-8"))
            deadline = time.monotonic() + self.timeout
            while b"\n" not in self.buffer:
                self.sock.settimeout(max(deadline - time.monotonic(), 0.001))
                chunk = self.sock.recv(65536)
                if not chunk:
                    raise BackendError("backend closed the connection")
                self.buffer += chunk
        except socket.timeout:
            raise BackendError(f"backend did not answer within {self.timeout} s") from None
        except OSError as exc:
            raise BackendError(f"connection error: {exc}") from None
        reply, _, self.buffer = self.buffer.partition(b"\n")
        return reply.decode("utf-8", errors="replace")

    def close(self):
        self.sock.close()


def open_transport(endpoint: str, timeout: float = DEFAULT_TIMEOUT):
    scheme, _, rest = endpoint.partition(":")
    if scheme == "stdio" and rest:
        return _StdioTransport(rest, timeout)
    if scheme == "tcp":
        host, _, port = rest.rpartition(":")
        if host and port.isdigit():
            return _TcpTransport(host, int(port), timeout)
    raise BackendError(f"bad endpoint {endpoint!r}; use stdio:<command> or tcp:<host>:<port>")


class ExternalBackend(PredictionBackend):
    """Backend served by another process over the line protocol.

    Any malformed reply raises :class:`ProtocolError` for that request only;
    the connection stays usable.
    """

    can_predict_subgoal = True
    can_predict_subprogram = True

    def __init__(self, endpoint: str, timeout: float = DEFAULT_TIMEOUT):
        self.endpoint = endpoint
        self.transport = open_transport(endpoint, timeout)

    def _request(self, role, spec, domain, beam):
        reply = self.transport.exchange(encode_request(role, spec, domain, beam))
        return decode_candidates(reply, role, spec, domain, beam)

    def subgoal(self, spec, domain, beam):
        return self._request("subgoal", spec, domain, beam)

    def subprogram(self, spec, domain, beam):
        return self._request("subprogram", spec, domain, beam)

    def close(self):
        self.transport.close()

    def __enter__(self):
        return self

    def __exit__(self, *exc):
        self.close()


def external_backend(endpoint: str, timeout: float = DEFAULT_TIMEOUT) -> ExternalBackend:
    return ExternalBackend(endpoint, timeout)


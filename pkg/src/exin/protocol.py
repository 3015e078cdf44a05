"""Client for external model processes speaking the ei-predict/1 protocol.

Framing is newline-delimited JSON: every message is one line of UTF-8
JSON terminated by ``\\n``. A session is a handshake, any number of
predict request/response pairs (ids strictly increasing, one response per
request), and a ``{"bye": true}`` farewell. The same framing works over a
spawned child process's standard streams or a TCP stream socket.

Failure taxonomy: problems reaching or keeping the peer (timeouts, EOF,
broken pipes) raise TransportError; a reachable peer answering wrongly
(bad JSON, id/length mismatch, invalid probabilities, version mismatch)
raises ProtocolError; an explicit ``{"error": ...}`` answer from the model
raises RemoteModelError.
"""

from __future__ import annotations

import json
import select
import shlex
import socket
import subprocess
import time

import numpy as np

from .predictors import Predictor, Task, check_rows

PROTOCOL = "ei-predict/1"
HANDSHAKE_TIMEOUT = 10.0
RESPONSE_TIMEOUT = 60.0
PROB_SUM_TOL = 1e-6


class TransportError(RuntimeError):
    """The external predictor is unreachable, gone, or not answering."""


class ProtocolError(RuntimeError):
    """The external predictor answered, but not per ei-predict/1."""


class RemoteModelError(RuntimeError):
    """The external predictor reported a model-side error."""


class SubprocessTransport:
    """Line transport over a child process's stdin/stdout."""

    def __init__(self, argv: list[str]):
        try:
            self.proc = subprocess.Popen(
                argv, stdin=subprocess.PIPE, stdout=subprocess.PIPE, bufsize=0
            )
        except OSError as exc:
            raise TransportError(f"could not start {argv!r}: {exc}") from exc
        self._buf = b""

    def send_line(self, line: str) -> None:
        try:
            self.proc.stdin.write(line.encode("utf-8") + b"\n")
            self.proc.stdin.flush()
        except (BrokenPipeError, OSError) as exc:
            raise TransportError(f"external predictor pipe closed: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        fd = self.proc.stdout.fileno()
        deadline = time.monotonic() + timeout
        while b"\n" not in self._buf:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TransportError(f"no response within {timeout} s")
            ready, _, _ = select.select([fd], [], [], remaining)
            if not ready:
                continue
            chunk = self.proc.stdout.read(65536)
            if not chunk:
                raise TransportError("external predictor closed its output")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line.decode("utf-8")

    def close(self) -> None:
        try:
            if self.proc.stdin:
                self.proc.stdin.close()
        except OSError:
            pass
        try:
            self.proc.wait(timeout=2)
        except subprocess.TimeoutExpired:
            self.proc.kill()
            self.proc.wait()


class TcpTransport:
    """Line transport over a stream socket."""

    def __init__(self, host: str, port: int, connect_timeout: float = HANDSHAKE_TIMEOUT):
        try:
            self.sock = socket.create_connection((host, port), timeout=connect_timeout)
        except OSError as exc:
            raise TransportError(f"could not connect to {host}:{port}: {exc}") from exc
        self._buf = b""

    def send_line(self, line: str) -> None:
        try:
            self.sock.sendall(line.encode("utf-8") + b"\n")
        except OSError as exc:
            raise TransportError(f"socket send failed: {exc}") from exc

    def recv_line(self, timeout: float) -> str:
        deadline = time.monotonic() + timeout
        while b"\n" not in self._buf:
            remaining = deadline - time.monotonic()
            if remaining <= 0:
                raise TransportError(f"no response within {timeout} s")
            self.sock.settimeout(remaining)
            try:
                chunk = self.sock.recv(65536)
            except socket.timeout:
                raise TransportError(f"no response within {timeout} s") from None
            except OSError as exc:
                raise TransportError(f"socket receive failed: {exc}") from exc
            if not chunk:
                raise TransportError("external predictor closed the connection")
            self._buf += chunk
        line, self._buf = self._buf.split(b"\n", 1)
        return line.decode("utf-8")

    def close(self) -> None:
        try:
            self.sock.close()
        except OSError:
            pass


class ExternalPredictor(Predictor):
    """Predictor backed by an external process or endpoint.

    Performs the handshake on construction and satisfies the same batch
    contract as the built-in models. Serial request/response; the server's
    advertised ``concurrent`` capability is recorded on the instance.
    """

    def __init__(
        self,
        transport,
        task: Task,
        handshake_timeout: float = HANDSHAKE_TIMEOUT,
        response_timeout: float = RESPONSE_TIMEOUT,
    ):
        self.transport = transport
        self.task = task
        self.response_timeout = response_timeout
        self._next_id = 1
        self._closed = False
        try:
            self.transport.send_line(json.dumps({"protocol": PROTOCOL, "task": task.kind}))
            reply = self._read_message(handshake_timeout)
            if reply.get("protocol") != PROTOCOL:
                raise ProtocolError(
                    f"protocol mismatch: server speaks {reply.get('protocol')!r}, need {PROTOCOL!r}"
                )
            if "error" in reply:
                raise ProtocolError(f"handshake refused: {reply['error']}")
            if reply.get("task") != task.kind:
                raise ProtocolError(
                    f"task mismatch: server serves {reply.get('task')!r}, need {task.kind!r}"
                )
            self.concurrent_safe = bool(reply.get("concurrent", False))
        except (TransportError, ProtocolError):
            self.transport.close()
            raise

    @classmethod
    def from_command(cls, command: str | list[str], task: Task, **kwargs) -> "ExternalPredictor":
        argv = shlex.split(command) if isinstance(command, str) else list(command)
        if not argv:
            raise ValueError("empty external predictor command")
        return cls(SubprocessTransport(argv), task, **kwargs)

    @classmethod
    def from_tcp(cls, host: str, port: int, task: Task, **kwargs) -> "ExternalPredictor":
        return cls(TcpTransport(host, port), task, **kwargs)

    def _read_message(self, timeout: float) -> dict:
        line = self.transport.recv_line(timeout)
        try:
            msg = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ProtocolError(f"unparseable response line: {line[:200]!r}") from exc
        if not isinstance(msg, dict):
            raise ProtocolError(f"expected a JSON object, got: {line[:200]!r}")
        return msg

    def predict(self, rows) -> np.ndarray:
        arr = check_rows(rows)
        request_id = self._next_id
        self._next_id += 1
        self.transport.send_line(
            json.dumps(
                {"id": request_id, "rows": arr.tolist(), "task": self.task.kind},
                separators=(",", ":"),
            )
        )
        msg = self._read_message(self.response_timeout)
        if "error" in msg:
            raise RemoteModelError(f"external predictor error: {msg['error']}")
        if msg.get("id") != request_id:
            raise ProtocolError(f"response id {msg.get('id')!r} does not match request {request_id}")
        outputs = msg.get("outputs")
        if not isinstance(outputs, list) or len(outputs) != arr.shape[0]:
            raise ProtocolError(
                f"expected {arr.shape[0]} outputs, got "
                f"{len(outputs) if isinstance(outputs, list) else type(outputs).__name__}"
            )
        return self._validate_outputs(outputs)

    def _validate_outputs(self, outputs: list) -> np.ndarray:
        try:
            result = np.asarray(outputs, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ProtocolError(f"non-numeric outputs: {exc}") from exc
        if self.task.is_classification:
            if result.ndim != 2 or result.shape[1] != self.task.num_classes:
                raise ProtocolError(
                    f"expected probability rows of width {self.task.num_classes}, "
                    f"got shape {result.shape}"
                )
            if (result < -PROB_SUM_TOL).any() or (result > 1 + PROB_SUM_TOL).any():
                raise ProtocolError("probabilities outside [0, 1]")
            sums = result.sum(axis=1)
            if np.abs(sums - 1.0).max() > PROB_SUM_TOL:
                raise ProtocolError(
                    f"probability rows must sum to 1 within {PROB_SUM_TOL}; worst sum {sums[np.abs(sums - 1.0).argmax()]}"
                )
        else:
            if result.ndim != 1:
                raise ProtocolError(f"expected scalar outputs, got shape {result.shape}")
        return result

    def close(self) -> None:
        if self._closed:
            return
        self._closed = True
        try:
            self.transport.send_line(json.dumps({"bye": True}))
        except TransportError:
            pass
        self.transport.close()

    def __enter__(self) -> "ExternalPredictor":
        return self

    def __exit__(self, *exc) -> None:
        self.close()

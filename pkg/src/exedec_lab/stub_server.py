"""Reference backend server for the line protocol.

Run ``python3 -m exedec_lab.stub_server [--mode MODE] [--port N]``. It reads
requests from standard input (or from TCP clients with ``--port``) and
answers with the exhaustive oracle. The modes other than ``oracle``
misbehave on purpose so clients can test their error handling:

``overflow``     more candidates than the requested beam
``malformed``    a reply that is not JSON
``wrong-count``  subgoals with one value too few
"""

from __future__ import annotations

import argparse
import json
import socketserver
import sys

from .engine import OracleBackend
from .errors import ExedecLabError
from .protocol import decode_request, encode_response, encode_value
from .text import render_step

MODES = ("oracle", "overflow", "malformed", "wrong-count")


def answer(line: str, mode: str = "oracle", oracle: OracleBackend | None = None) -> str:
    """Reply line for one request line."""
    try:
        role, spec, domain, beam = decode_request(line)
    except ExedecLabError as exc:
        return json.dumps({"error": str(exc)})
    if mode == "malformed":
        return "{this is not json"
    want = beam + 3 if mode == "overflow" else beam
    if role == "subgoal":
        goal = [encode_value(o) for o in spec.outputs]
        if mode == "wrong-count":
            goal = goal[:-1]
        return encode_response([goal] * want)
    oracle = oracle or OracleBackend()
    steps = oracle.subprogram(spec, domain, want)
    texts = [render_step(s) for s in steps]
    while mode == "overflow" and texts and len(texts) < want:
        texts.append(texts[-1])
    return encode_response(texts)


def serve_stdio(mode: str, stdin=sys.stdin, stdout=sys.stdout) -> None:
    oracle = OracleBackend()
    for line in stdin:
        if not line.strip():
            continue
        stdout.write(answer(line, mode, oracle) + "\n")
        stdout.flush()


def serve_tcp(mode: str, port: int, host: str = "127.0.0.1") -> None:
    class Handler(socketserver.StreamRequestHandler):
        def handle(self):
            oracle = OracleBackend()
            for raw in self.rfile:
                line = raw.decode("utf-8", errors="replace")
                if line.strip():
                    self.wfile.write((answer(line, mode, oracle) + "\n").encode("utf-8"))
                    self.wfile.flush()

    with socketserver.ThreadingTCPServer((host, port), Handler) as server:
        print(f"listening on {host}:{server.server_address[1]}", file=sys.stderr, flush=True)
        server.serve_forever()


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="exedec_lab.stub_server", description=__doc__.splitlines()[0])
    parser.add_argument("--mode", choices=MODES, default="oracle")
    parser.add_argument("--port", type=int, help="serve TCP on this port instead of stdio")
    args = parser.parse_args(argv)
    if args.port is not None:
        serve_tcp(args.mode, args.port)
    else:
        serve_stdio(args.mode)
    return 0


if __name__ == "__main__":
    sys.exit(main())

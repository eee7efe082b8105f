"""Line-protocol server loop for model backends written in Python.

A handler maps one request dict (without "id") to a response payload dict such
as {"ok": True, "caption": "..."}. Raising AdapterError answers with an error
response and keeps the server running. Every exchange can be recorded to a
fixture file that `mock:<file>` replays.

    python -m anticipate.adapter --replay fixture.json [--record out.json]
"""

import argparse
import sys

from ._anticipate import AnticipateError, MockBackend, canonical_key, frame_response, parse_request, save_fixture


class AdapterError(Exception):
    def __init__(self, code, message=""):
        super().__init__(message)
        self.code = code
        self.message = message


def error_payload(code, message):
    return {"ok": False, "error": {"code": code, "message": message}}


def serve(handler, stdin=None, stdout=None, record=None):
    stdin = stdin or sys.stdin
    stdout = stdout or sys.stdout
    recorded = {}
    try:
        for line in stdin:
            if not line.strip():
                continue
            try:
                request = parse_request(line.rstrip("\n"))
            except AnticipateError as exc:
                stdout.write(frame_response(0, error_payload("MalformedMessage", str(exc))))
                stdout.flush()
                continue
            request_id = request.pop("id")
            try:
                payload = handler(request)
                frame = frame_response(request_id, payload)
            except AdapterError as exc:
                payload = error_payload(exc.code, exc.message)
                frame = frame_response(request_id, payload)
            except Exception as exc:  # the server outlives any single request
                payload = error_payload("GENERATION_FAILED", f"{type(exc).__name__}: {exc}")
                frame = frame_response(request_id, payload)
            stdout.write(frame)
            stdout.flush()
            if record is not None and payload.get("ok"):
                recorded[canonical_key(request)] = {"request": request, "response": payload}
    finally:
        if record is not None:
            save_fixture(record, [recorded[k] for k in sorted(recorded)])


def replay_handler(fixture):
    mock = MockBackend(fixture)

    def handle(request):
        try:
            return mock.lookup(request)
        except AnticipateError as exc:
            raise AdapterError("FixtureMiss", str(exc)) from None

    return handle


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--replay", required=True, help="fixture file answering every request")
    parser.add_argument("--record", help="write every successful exchange here")
    args = parser.parse_args(argv)
    serve(replay_handler(args.replay), record=args.record)


if __name__ == "__main__":
    main()

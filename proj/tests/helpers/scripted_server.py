"""Misbehaving protocol peer for transport tests.

  scripted_server.py reorder N     answer each group of N requests in reverse order
  scripted_server.py close N       answer N requests, then exit
  scripted_server.py unknown       answer with an id nobody asked for
  scripted_server.py late SECONDS  stall before the first answer, then behave
  scripted_server.py garbage       answer with a line that is not JSON
"""

import json
import sys
import time


def answer(request):
    kind = request.get("kind")
    if kind == "embed":
        payload = {"embedding": [float(len(request["text"])), float(request["id"])]}
    elif kind == "complete":
        payload = {"completion": "echo:" + request["prompt"]}
    elif kind == "caption":
        payload = {"caption": "caption for " + request["video_id"]}
    else:
        return {"id": request["id"], "ok": False, "error": {"code": "Unsupported", "message": kind or ""}}
    payload.update({"id": request["id"], "ok": True})
    return payload


def send(obj):
    try:
        sys.stdout.write(json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n")
        sys.stdout.flush()
    except BrokenPipeError:
        sys.exit(0)


def requests():
    for line in sys.stdin:
        if line.strip():
            yield json.loads(line)


def main():
    mode = sys.argv[1]
    if mode == "reorder":
        group = int(sys.argv[2])
        held = []
        for req in requests():
            held.append(req)
            if len(held) == group:
                for r in reversed(held):
                    send(answer(r))
                held = []
    elif mode == "close":
        limit = int(sys.argv[2])
        for i, req in enumerate(requests()):
            if i == limit:
                return
            send(answer(req))
    elif mode == "unknown":
        for req in requests():
            reply = answer(req)
            reply["id"] = req["id"] + 1000
            send(reply)
    elif mode == "late":
        delay = float(sys.argv[2])
        first = True
        for req in requests():
            if first:
                time.sleep(delay)
                first = False
            send(answer(req))
    elif mode == "garbage":
        for _ in requests():
            sys.stdout.write("this is not json\n")
            sys.stdout.flush()


if __name__ == "__main__":
    main()

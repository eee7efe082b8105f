"""Python access to the anticipate toolkit: core routines, the backend wire
protocol and mock fixtures."""

from ._anticipate import (
    AnticipateError,
    MockBackend,
    average_precision,
    canonical_key,
    dl_distance,
    ed_report,
    frame_response,
    load_fixture,
    parse_output,
    parse_request,
    prompt_hash,
    run_cli,
    save_fixture,
    select_mmr,
    select_similar,
    serialize_actions,
)

__all__ = [
    "AnticipateError",
    "MockBackend",
    "average_precision",
    "canonical_key",
    "dl_distance",
    "ed_report",
    "frame_response",
    "load_fixture",
    "parse_output",
    "parse_request",
    "prompt_hash",
    "run_cli",
    "save_fixture",
    "select_mmr",
    "select_similar",
    "serialize_actions",
]

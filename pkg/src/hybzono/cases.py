"""Built-in case studies available to the CLI and the test suite."""

from __future__ import annotations

from .mld import (
    build_heated_rooms,
    build_pwa_two_mode,
    load_model,
    pwa_initial_set,
    rooms_initial_set,
)
from .sets import lift

__all__ = ["CASE_NAMES", "load_case"]

CASE_NAMES = ("pwa2eq", "rooms:1", "rooms:2", "rooms:3", "rooms:4")


def load_case(source):
    """Resolve a built-in case name or a model file path.

    Returns ``(model, domains, R0, default_steps)``.  Model files carry no
    initial set; callers must supply one separately.
    """
    if source == "pwa2eq":
        model, domains = build_pwa_two_mode()
        return model, domains, lift(pwa_initial_set()), 15
    if source.startswith("rooms:"):
        p = int(source.split(":", 1)[1])
        model, domains = build_heated_rooms(p)
        return model, domains, rooms_initial_set(p), 100
    model, domains = load_model(source)
    return model, domains, None, 10

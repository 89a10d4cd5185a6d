"""Step semantics, processes, traces and conflict analysis for P/T nets."""

from importlib.resources import files

from .multiset import Multiset
from .net import FiringError, Net, NetError, explore, fire_sequence, fire_step, validate_net
from .verdict import Status, Verdict

__version__ = "0.1.0"


def fixture_text(name: str) -> str:
    """Text of a bundled example net, e.g. ``fixture_text("NET-A")``."""
    return files(__name__).joinpath("fixtures", f"{name}.net").read_text(encoding="utf-8")


def fixture(name: str) -> Net:
    from .io_format import parse_net

    return parse_net(fixture_text(name))


__all__ = [
    "FiringError", "Multiset", "Net", "NetError", "Status", "Verdict",
    "explore", "fire_sequence", "fire_step", "fixture", "fixture_text", "validate_net",
]

"""The three worked example nets, reconstructed from their textual description.

Each function returns ``(net, initial_marking)``.  ``tests/test_fixtures.py``
checks every behavioral fact stated about them before anything else relies
on them.
"""

from __future__ import annotations

from .net import Marking, PetriNet


def n1() -> tuple[PetriNet, Marking]:
    """Terminating free-choice net with an optional loop back to the start."""
    net = PetriNet.from_transitions(
        {
            "t1": (["p1"], ["p2"]),
            "t2": (["p1"], ["p2"]),
            "t3": (["p2"], ["p3"]),
            "t4": (["p3"], ["p4"]),
            "t5": (["p3"], ["p1"]),
        }
    )
    return net, Marking(["p1"])


def n2() -> tuple[PetriNet, Marking]:
    """Non-free-choice net whose later choice is steered by a hidden token."""
    net = PetriNet.from_transitions(
        {
            "t1": (["p1"], ["p2", "p5"]),
            "t2": (["p1"], ["p2", "p6"]),
            "t3": (["p2"], ["p3"]),
            "t4": (["p3", "p5"], ["p4"]),
            "t5": (["p3", "p6"], ["p4"]),
        }
    )
    return net, Marking(["p1"])


def n3() -> tuple[PetriNet, Marking]:
    """Live and safe marked graph that is not lucent."""
    net = PetriNet.from_transitions(
        {
            "t1": (["p1"], ["p2"]),
            "t2": (["p2", "p3"], ["p1", "p4"]),
            "t3": (["p4", "p5"], ["p3", "p6"]),
            "t4": (["p6"], ["p5"]),
        }
    )
    return net, Marking(["p1", "p3", "p6"])


FIXTURES = {"n1": n1, "n2": n2, "n3": n3}

"""padbench: the Preview-Accept-Discard (PAD) keyboard grammar, benchmarked.

A deterministic state machine for the two-modifier chord interaction
(hold to preview a predicted click target, tap to cycle candidates,
release together to accept, release apart to discard), plus the ISO
9241-9 style task generator, a calibrated synthetic-user simulator and
analytics over the resulting trial logs.
"""

__version__ = "0.1.0"

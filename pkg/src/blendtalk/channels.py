"""Canonical ARKit blendshape channel names and the channel groups built on them.

The 52-entry list below follows Apple's ARFaceAnchor blendshape location
order (eyes, jaw, mouth, brows, cheeks, nose, tongue). Metric and loss
channel groups are derived from the names, so the list is versioned: bump
``CHANNEL_SET_VERSION`` if it ever changes.
"""

from __future__ import annotations

CHANNEL_SET_VERSION = 1

ARKIT_CHANNELS: tuple[str, ...] = (
    "eyeBlinkLeft",
    "eyeLookDownLeft",
    "eyeLookInLeft",
    "eyeLookOutLeft",
    "eyeLookUpLeft",
    "eyeSquintLeft",
    "eyeWideLeft",
    "eyeBlinkRight",
    "eyeLookDownRight",
    "eyeLookInRight",
    "eyeLookOutRight",
    "eyeLookUpRight",
    "eyeSquintRight",
    "eyeWideRight",
    "jawForward",
    "jawLeft",
    "jawRight",
    "jawOpen",
    "mouthClose",
    "mouthFunnel",
    "mouthPucker",
    "mouthLeft",
    "mouthRight",
    "mouthSmileLeft",
    "mouthSmileRight",
    "mouthFrownLeft",
    "mouthFrownRight",
    "mouthDimpleLeft",
    "mouthDimpleRight",
    "mouthStretchLeft",
    "mouthStretchRight",
    "mouthRollLower",
    "mouthRollUpper",
    "mouthShrugLower",
    "mouthShrugUpper",
    "mouthPressLeft",
    "mouthPressRight",
    "mouthLowerDownLeft",
    "mouthLowerDownRight",
    "mouthUpperUpLeft",
    "mouthUpperUpRight",
    "browDownLeft",
    "browDownRight",
    "browInnerUp",
    "browOuterUpLeft",
    "browOuterUpRight",
    "cheekPuff",
    "cheekSquintLeft",
    "cheekSquintRight",
    "noseSneerLeft",
    "noseSneerRight",
    "tongueOut",
)

NUM_CHANNELS = len(ARKIT_CHANNELS)

CHANNEL_INDEX: dict[str, int] = {name: i for i, name in enumerate(ARKIT_CHANNELS)}


def _indices(predicate) -> tuple[int, ...]:
    return tuple(i for i, name in enumerate(ARKIT_CHANNELS) if predicate(name))


# Lip region: every mouth channel, the four jaw channels, and the tongue.
LIP_CHANNELS: tuple[int, ...] = _indices(
    lambda n: n.startswith("mouth") or n.startswith("jaw") or n == "tongueOut"
)

# Upper face: brows, eyes, and the cheek-raiser (squint) pair.
UPPER_FACE_CHANNELS: tuple[int, ...] = _indices(
    lambda n: n.startswith("brow") or n.startswith("eye") or n.startswith("cheekSquint")
)

BROW_CHANNELS: tuple[int, ...] = _indices(lambda n: n.startswith("brow"))
EYE_CHANNELS: tuple[int, ...] = _indices(lambda n: n.startswith("eye"))
JAW_CHANNELS: tuple[int, ...] = _indices(lambda n: n.startswith("jaw"))
MOUTH_CHANNELS: tuple[int, ...] = _indices(lambda n: n.startswith("mouth") or n == "tongueOut")
CHEEK_NOSE_CHANNELS: tuple[int, ...] = _indices(
    lambda n: n.startswith("cheek") or n.startswith("nose")
)

assert NUM_CHANNELS == 52
assert len(LIP_CHANNELS) == 28

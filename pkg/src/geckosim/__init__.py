"""Software twin of a gecko-adhesive perching gripper and its free-flyer host.

Layering, bottom up: protocol (wire format), registers and bus (virtual
servo devices), records (log format), firmware (gripper control program),
adhesion (tile mechanics), flyer (rigid body and sensing), scenario (closed
loop), bridge (host commands), report/cli/serve (front ends).
"""

__version__ = "0.1.0"

from .adhesion import (
    ContactConditions,
    EngageResult,
    TilePair,
    attempt_engage,
    normal_capacity,
    pull_test,
)
from .bridge import HostCommand, PacBridge
from .bus import Bus, BusTimeout
from .config import ConfigError, ScenarioConfig, load_config
from .firmware import GripperFirmware, TofSample, estimate_time_to_contact
from .flyer import FlyerState, PerchSurface, pd_control, step
from .protocol import Packet, StatusPacket, decode_packet, encode_packet
from .records import ExperimentRecord, crc16_ccitt
from .scenario import World, monte_carlo, run_scenario, wilson_interval

__all__ = [
    "__version__",
    "Bus",
    "BusTimeout",
    "ConfigError",
    "ContactConditions",
    "EngageResult",
    "ExperimentRecord",
    "FlyerState",
    "GripperFirmware",
    "HostCommand",
    "PacBridge",
    "Packet",
    "PerchSurface",
    "ScenarioConfig",
    "StatusPacket",
    "TilePair",
    "TofSample",
    "World",
    "attempt_engage",
    "crc16_ccitt",
    "decode_packet",
    "encode_packet",
    "estimate_time_to_contact",
    "load_config",
    "monte_carlo",
    "normal_capacity",
    "pd_control",
    "pull_test",
    "run_scenario",
    "step",
    "wilson_interval",
]

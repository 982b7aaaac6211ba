"""
Enumerations shared across the simulator.

`BaseStrEnum` adds case-insensitive and separator-insensitive lookup on top of
`enum.StrEnum`; the domain enums below build on it so that CLI options,
scenario keywords and modem status tokens all resolve the same way.
"""

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

# =============================================================================
# STANDARD LIBRARY IMPORTS
# =============================================================================
import enum
from typing import Any, ClassVar, Self

# =============================================================================
# CONSTANTS
# =============================================================================
# ? Lookup keys longer than this are rejected before any normalisation work.
DEFAULT_MAX_INPUT_LENGTH = 256


# =============================================================================
# BASE ENUM IMPLEMENTATION
# =============================================================================
@enum.verify(enum.UNIQUE)
class BaseStrEnum(enum.StrEnum):
    """
    A StrEnum with fuzzy lookup and alias support.

    Examples
    --------
    >>> class Format(BaseStrEnum):
    ...     __ALIASES__ = {"txt": "text"}
    ...     TEXT = "text"
    ...     JSON = "json"
    ...
    >>> Format.from_fuzzy_string("JSON") is Format.JSON
    True
    >>> Format.from_fuzzy_string("txt") is Format.TEXT
    True
    """

    # ? Dunder name so the mapping is not turned into a member.
    __ALIASES__: ClassVar[dict[str, str]] = {}

    _fuzzy_lookup_map: ClassVar[dict[str, Any]]

    @staticmethod
    def _normalize(text: str) -> str:
        return text.lower().replace("-", "_").replace(" ", "_")

    @classmethod
    def _get_fuzzy_map(cls) -> dict[str, Self]:
        """Build (once) the map from normalised value/name to member."""
        try:
            return cls._fuzzy_lookup_map
        except AttributeError:
            lookup_map: dict[str, Self] = {}
            for member in cls:
                lookup_map.setdefault(cls._normalize(member.value), member)
                lookup_map.setdefault(member.name.lower(), member)
            cls._fuzzy_lookup_map = lookup_map
            return lookup_map

    @classmethod
    def from_fuzzy_string(cls, value_str: str) -> Self:
        """
        Find a member by alias, normalised value, or case-insensitive name.

        Raises
        ------
        ValueError
            If nothing matches or the input exceeds the length limit.
        """
        if len(value_str) > DEFAULT_MAX_INPUT_LENGTH:
            raise ValueError(
                f"Input string too long (max {DEFAULT_MAX_INPUT_LENGTH} chars)"
            )

        value_lower = value_str.strip().lower()
        alias_target = cls.__ALIASES__.get(value_lower)
        if alias_target is not None:
            return cls(alias_target)

        fuzzy_map = cls._get_fuzzy_map()
        member = fuzzy_map.get(value_lower) or fuzzy_map.get(
            cls._normalize(value_lower)
        )
        if member is not None:
            return member

        valid_options = ", ".join(f"'{m.value}'" for m in cls)
        raise ValueError(
            f"'{value_str}' is not a valid {cls.__name__}. "
            f"Please use one of: {valid_options}"
        )

    @classmethod
    def get_or_none(cls, value: object) -> Self | None:
        """Return the matching member, or ``None`` when nothing matches."""
        if isinstance(value, cls):
            return value
        if not isinstance(value, str):
            return None
        try:
            return cls.from_fuzzy_string(value)
        except ValueError:
            return None

    @classmethod
    def values(cls) -> list[str]:
        return [member.value for member in cls]

    @classmethod
    def choices(cls) -> list[str]:
        return cls.values()


# =============================================================================
# DOMAIN ENUMS
# =============================================================================
class MessageStatus(BaseStrEnum):
    """Storage status of an SMS as reported in a ``+CMGR`` header."""

    __ALIASES__: ClassVar[dict[str, str]] = {"unread": "REC UNREAD", "read": "REC READ"}

    REC_UNREAD = "REC UNREAD"
    REC_READ = "REC READ"


class ControllerState(BaseStrEnum):
    POWER_ON = "power_on"
    HANDSHAKE = "handshake"
    SET_MODE = "set_mode"
    IDLE = "idle"
    READING = "reading"
    EXECUTING = "executing"
    FEEDBACK = "feedback"
    DELETING = "deleting"


class ActionKind(BaseStrEnum):
    SET_LOAD = "set_load"
    ALL_ON = "all_on"
    ALL_OFF = "all_off"
    STATUS = "status"


class Direction(BaseStrEnum):
    """Direction of a frame on the controller <-> modem serial link."""

    __ALIASES__: ClassVar[dict[str, str]] = {
        "tx": "ctl->modem",
        "rx": "modem->ctl",
    }

    TO_MODEM = "ctl->modem"
    TO_CONTROLLER = "modem->ctl"


class ReportFormat(BaseStrEnum):
    __ALIASES__: ClassVar[dict[str, str]] = {"txt": "text", "human": "text"}

    TEXT = "text"
    JSON = "json"

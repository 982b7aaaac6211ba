"""
Shared pydantic base for simulator data models.

Public surface
--------------

- :class:`SimBaseModel`: frozen Pydantic v2 base with ``extra="forbid"`` and
  ``validate_assignment=True``. Protocol units, configuration and reports all
  derive from it so that equality, hashing and JSON dumps behave the same way
  everywhere.
"""

# =============================================================================
# METADATA
# =============================================================================
__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from pydantic import BaseModel, ConfigDict


class SimBaseModel(BaseModel):
    """Frozen Pydantic v2 base for simulator values.

    - ``extra="forbid"``: unknown fields raise ``ValidationError``.
    - ``frozen=True``: instances are immutable and hashable, so parsed AT
      commands and responses compare by value.
    - ``validate_assignment=True``: kept for subclasses that opt out of
      ``frozen``.

    Whitespace is not stripped; an SMS body of ``" l1on "`` must
    reach the command matcher unchanged.

    Examples
    --------
    >>> class Reading(SimBaseModel):
    ...     value: int
    ...
    >>> Reading(value=1) == Reading(value=1)
    True
    """

    model_config = ConfigDict(
        extra="forbid",
        frozen=True,
        validate_assignment=True,
        str_strip_whitespace=False,
    )

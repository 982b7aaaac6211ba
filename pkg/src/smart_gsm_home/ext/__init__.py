"""
Third-party integrations of smart-gsm-home.

``observability_loguru`` configures log sinks; ``validation_pydantic`` provides
the ``type_checked`` decorator used on the numeric UART operations.
"""
from __future__ import annotations

__all__: list[str] = []

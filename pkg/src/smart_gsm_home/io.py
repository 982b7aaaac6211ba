"""Crash-safe writing of run reports."""

from __future__ import annotations

import os
import pathlib
import tempfile

__author__ = "Yeremia Gunawan Adhisantoso"
__email__ = "adhisant@tnt.uni-hannover.de"
__license__ = "Clear BSD"

__all__ = ["atomic_write"]


def atomic_write(
    path: str | pathlib.Path, text: str, *, mkdir: bool = False
) -> pathlib.Path:
    """Write UTF-8 ``text`` to ``path`` so readers never see a partial file.

    The text goes to a hidden temp file next to the target which then replaces
    it with ``os.replace``.

    Parameters
    ----------
    path : str or pathlib.Path
        Destination file.
    text : str
        Report content.
    mkdir : bool, default=False
        Create missing parent directories.

    Returns
    -------
    pathlib.Path
        The written path.

    Raises
    ------
    FileNotFoundError
        The parent directory is missing and ``mkdir`` is false.
    """
    target = pathlib.Path(path)
    if mkdir:
        target.parent.mkdir(parents=True, exist_ok=True)
    elif not target.parent.exists():
        raise FileNotFoundError(f"Parent directory does not exist: {target.parent}")

    fd, tmp_path = tempfile.mkstemp(
        dir=target.parent, prefix=f".{target.name}.", suffix=".tmp"
    )
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as file:
            file.write(text)
        os.replace(tmp_path, target)
    except BaseException:
        #? Interrupts must not leave the temp file behind either.
        try:
            os.unlink(tmp_path)
        except OSError:
            pass
        raise
    return target

"""
Argument validation for the public numeric operations.

`type_checked` wraps :func:`pydantic.validate_call` so that annotated
preconditions (``PositiveInt``, ``Field(ge=0, le=255)`` ...) are enforced at
call time and reported as a plain ``TypeError``.
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
import functools
import typing as t

# =============================================================================
# THIRD-PARTY IMPORTS
# =============================================================================
from pydantic import ValidationError, validate_call


def type_checked(func: t.Callable | None = None, **kwargs: t.Any) -> t.Callable:
    """
    Validate a function's annotated arguments and raise ``TypeError`` on failure.

    Parameters
    ----------
    func : Callable | None
        The function to decorate.
    **kwargs : Any
        Passed through to ``pydantic.validate_call`` (e.g. ``config``).

    Returns
    -------
    Callable
        The decorated function.

    Examples
    --------
    >>> from pydantic import PositiveFloat
    >>> @type_checked
    ... def per_bit_us(baud: PositiveFloat) -> float:
    ...     return 1e6 / baud
    ...
    >>> per_bit_us(baud=0)
    Traceback (most recent call last):
        ...
    TypeError: Validation error in 'per_bit_us':
    Argument 'baud': Input should be greater than 0 (got type 'int')
    """

    def decorator(f: t.Callable) -> t.Callable:
        validated_func = validate_call(f, **kwargs)

        @functools.wraps(f)
        def wrapper(*args: t.Any, **kw: t.Any) -> t.Any:
            try:
                return validated_func(*args, **kw)
            except ValidationError as e:
                errors = []
                for error in e.errors():
                    # ? loc is usually (index,) or (arg_name,), sometimes prefixed
                    # ? with 'args'/'kwargs'; only the argument part is shown.
                    loc = [
                        str(item)
                        for item in error.get("loc", ())
                        if item not in ("args", "kwargs")
                    ]
                    loc_str = " -> ".join(loc) if loc else "input"
                    input_type = type(error.get("input")).__name__
                    errors.append(
                        f"Argument '{loc_str}': "
                        f"{error.get('msg', 'Invalid input')} (got type '{input_type}')"
                    )

                error_msg = f"Validation error in '{f.__name__}':\n" + "\n".join(errors)
                raise TypeError(error_msg) from None

        return wrapper

    if func:
        return decorator(func)
    return decorator

"""revprime: exponential-sum verification lab and census tool for
digit-reversed primes in arithmetic progressions."""

__version__ = "0.1.0"

from .basedigits import (
    BaseContext,
    DigitVector,
    digits_of,
    digit_length,
    dist,
    e,
    floor_part,
    ilog,
    reverse,
    reverse_relative,
)
from .seeds import (
    Seed,
    f_eval,
    parse_seed,
    reverse_seed,
    shift,
    sod_seed,
    table_seed,
    zero_seed,
)

__all__ = [
    "BaseContext",
    "DigitVector",
    "digits_of",
    "digit_length",
    "dist",
    "e",
    "floor_part",
    "ilog",
    "reverse",
    "reverse_relative",
    "Seed",
    "f_eval",
    "parse_seed",
    "reverse_seed",
    "shift",
    "sod_seed",
    "table_seed",
    "zero_seed",
]

"""Deterministic seed derivation.

All randomness in the package flows from integer seeds derived with
splitmix64 so that adding ensemble members, or training them in any order,
never perturbs the streams of existing members.
"""

_MASK = (1 << 64) - 1

# Stream tags for the independent per-member random streams.
TRAINABLE = 1
PRIOR = 2
BOOTSTRAP = 3
SHUFFLE = 4
LF = 11
HF = 12


def splitmix64(x: int) -> int:
    """One splitmix64 scrambling round over a 64-bit integer."""
    x = (x + 0x9E3779B97F4A7C15) & _MASK
    z = x
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def derive_seed(base: int, *words: int) -> int:
    """Derive a child seed from a base seed and a sequence of stream tags.

    Deterministic, order-sensitive, and 64-bit stable: the same
    (base, words) always yields the same child seed.
    """
    s = splitmix64(base & _MASK)
    for w in words:
        s = splitmix64(s ^ (w & _MASK))
    return s

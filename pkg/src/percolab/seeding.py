"""Per-trial seed derivation ("fixed-mix-v1").

seed(master, i) = splitmix64(master * golden + i mod 2^64). For a fixed master
the map i -> seed is a composition of two bijections on 64-bit words, hence
injective over trial indices.
"""

DERIVATION = "fixed-mix-v1"
_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


def splitmix64(x: int) -> int:
    x = (x + _GOLDEN) & _MASK
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK
    return x ^ (x >> 31)


def trial_seed(master: int, index: int) -> int:
    return splitmix64((int(master) * _GOLDEN + int(index)) & _MASK)

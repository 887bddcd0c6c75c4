"""SplitMix64, a counter-based 64-bit generator.

Output ``i`` (0-based) for seed ``s`` is ``mix(s + (i + 1) * GAMMA mod 2**64)``,
which any language with 64-bit unsigned arithmetic reproduces exactly.
"""

GAMMA = 0x9E3779B97F4A7C15
MASK = (1 << 64) - 1


def mix64(z: int) -> int:
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
    return z ^ (z >> 31)


class SplitMix64:
    def __init__(self, seed: int):
        if not 0 <= seed <= MASK:
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.state = seed

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK
        return mix64(self.state)

    def below(self, bound: int) -> int:
        """Uniform integer in ``[0, bound)`` by rejection of the biased low range."""
        if bound < 1:
            raise ValueError("bound must be positive")
        threshold = (1 << 64) % bound
        while True:
            r = self.next()
            if r >= threshold:
                return r % bound

import random


class ScriptRng:
    """Deterministic rng stub: feeds scripted random() / randrange() values,
    then falls back to a seeded generator."""

    def __init__(self, randoms=(), ranges=(), seed=0):
        self.randoms = list(randoms)
        self.ranges = list(ranges)
        self._fallback = random.Random(seed)

    def random(self):
        if self.randoms:
            return self.randoms.pop(0)
        return self._fallback.random()

    def randrange(self, n):
        if self.ranges:
            v = self.ranges.pop(0)
            assert 0 <= v < n
            return v
        return self._fallback.randrange(n)

"""Exception types shared across the package."""


class SinghypError(Exception):
    """Base class for all errors raised by this package."""


class UndefinedAtCut(SinghypError, ValueError):
    """A map was evaluated exactly at one of its discontinuity points."""

    def __init__(self, x, cut):
        super().__init__(f"map undefined at cut point x={x!r} (cut {cut!r})")
        self.x = x
        self.cut = cut


class OrbitHitsCut(SinghypError):
    """An orbit landed on a cut before the requested number of steps."""

    def __init__(self, step, x):
        super().__init__(f"orbit hits a cut at step {step} (x={x!r})")
        self.step = step
        self.x = x


class InvalidParams(SinghypError, ValueError):
    pass


class InvalidEpsilon(SinghypError, ValueError):
    pass


class MassMismatch(SinghypError, ValueError):
    pass


class GridMismatch(SinghypError, ValueError):
    pass


class NoConvergence(SinghypError):
    def __init__(self, residual, iterations):
        super().__init__(
            f"power iteration did not converge: residual {residual:.3e} "
            f"after {iterations} iterations"
        )
        self.residual = residual
        self.iterations = iterations


class DegenerateSeries(SinghypError):
    pass


class TooManyCutHits(SinghypError):
    def __init__(self, nudged, total):
        super().__init__(f"{nudged} of {total} iterates landed on a cut")
        self.nudged = nudged
        self.total = total


class InsufficientOrbit(SinghypError, ValueError):
    pass


class NotHit(SinghypError):
    """No entrance into the target ball within the searched horizon."""

    def __init__(self, horizon):
        super().__init__(f"target not hit within horizon {horizon}")
        self.horizon = horizon


class AllMissing(SinghypError):
    pass


class SparseBall(SinghypError):
    def __init__(self, excluded):
        super().__init__(f"too few visits at radii {list(excluded)}")
        self.excluded = list(excluded)


class DegenerateFiber(SinghypError):
    pass


class OnStableManifold(SinghypError, ValueError):
    """Point on the stable manifold of the singularity; it never leaves the box."""


class ConfigError(SinghypError, ValueError):
    def __init__(self, message, key=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if key is not None:
            where.append(f"key {key!r}")
        prefix = f"{', '.join(where)}: " if where else ""
        super().__init__(prefix + message)
        self.key = key
        self.line = line

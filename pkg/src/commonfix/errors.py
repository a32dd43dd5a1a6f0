"""Exception types raised by commonfix.

Mathematical negatives (a condition that fails, a pair that is not
compatible) are reported as data, not raised. The exceptions below are for
precondition violations and inputs the engine cannot handle.
"""


class CommonFixError(Exception):
    """Base class for all commonfix errors."""


class OutOfDomain(CommonFixError):
    def __init__(self, x, where: str = ""):
        self.x = x
        super().__init__(f"{x} is outside the domain{' of ' + where if where else ''}")


class EdgeOffsetTooLarge(CommonFixError):
    pass


class UnsupportedSetOperation(CommonFixError):
    pass


class TotalityError(CommonFixError):
    """Guards of a piecewise map leave a gap or overlap; `witness` is a point."""

    def __init__(self, message: str, witness):
        self.witness = witness
        super().__init__(f"{message} (witness {witness})")


class PoleInGuard(CommonFixError):
    pass


class ImageEscapesDomain(CommonFixError):
    def __init__(self, x, value):
        self.x = x
        self.value = value
        super().__init__(f"image {value} of {x} leaves the target domain")


class NoPreimage(CommonFixError):
    def __init__(self, target, where: str = ""):
        self.target = target
        super().__init__(f"{target} has no preimage{' under ' + where if where else ''}")


class PreimageFailure(CommonFixError):
    def __init__(self, target, map_name: str, step: int):
        self.target = target
        self.map_name = map_name
        self.step = step
        super().__init__(f"step {step}: no preimage of {target} under {map_name}")


class NegativeArgument(CommonFixError):
    pass


class RatioReachesOne(CommonFixError):
    def __init__(self, t, ratio):
        self.t = t
        self.ratio = ratio
        super().__init__(f"phi(t)/t = {ratio} >= 1 at t = {t}")


class EnvelopeImpossible(CommonFixError):
    def __init__(self, t, value):
        self.t = t
        self.value = value
        super().__init__(f"control value {value} is not below t = {t}")


class AllKernelsZero(CommonFixError):
    pass


class InapplicableProbe(CommonFixError):
    pass


class PieceOscillation(CommonFixError):
    pass


class UnknownFixture(CommonFixError):
    pass


class FixtureInvalid(CommonFixError):
    pass

"""Package-wide exception types."""


class SuspatchError(Exception):
    """Base class for all errors raised by this package."""


class InvalidParameterError(SuspatchError, ValueError):
    """An argument violates its documented range."""


class GeometryError(SuspatchError, ValueError):
    """An antenna feature cannot be placed or rasterized."""


class InstabilityError(SuspatchError, RuntimeError):
    """The solver produced a non-finite field value."""

    def __init__(self, component: str, index, time_index: int):
        self.component = component
        self.index = tuple(int(v) for v in index)
        self.time_index = int(time_index)
        super().__init__(
            f"non-finite {component}[{', '.join(str(v) for v in self.index)}]"
            f" at time step {self.time_index}"
        )


class SingularImpedanceError(SuspatchError, ValueError):
    """Impedance is undefined because the current vanishes at a frequency."""


class PassivityError(SuspatchError, ValueError):
    """|Gamma| exceeds 1 beyond numerical tolerance (broken upstream data)."""


class FitError(SuspatchError, RuntimeError):
    """An equivalent-circuit fit failed or the data admit no resonance."""


class NoLinkError(SuspatchError, ValueError):
    """The link budget closes at no positive distance."""


class EnergyBalanceError(SuspatchError, ValueError):
    """Radiated power exceeds accepted input power beyond tolerance."""


class ConfigError(SuspatchError, ValueError):
    """A run configuration or input file fails validation."""

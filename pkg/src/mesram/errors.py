"""Exception hierarchy shared by all simulator layers."""


class MesramError(Exception):
    """Base class for all simulator errors."""


class ConfigError(MesramError):
    """Invalid configuration file, section, key, or value."""


class InvalidInputError(MesramError):
    """Non-finite or out-of-domain numeric input."""


class SwitchingFailureError(MesramError):
    """Magnetization did not settle within the allowed write window."""


class IndeterminateStateError(MesramError):
    """Resistance readout requested while the magnetization is unsettled."""


class IllegalSignalError(MesramError):
    """Signal vector matches no defined cell operating mode."""


class BusyError(MesramError):
    """Cell operation attempted during a write transient."""


class RestoreFailureError(MesramError):
    """Restore attempted from an indeterminate non-volatile state."""


class AddressError(MesramError):
    """Row, column, or byte address outside the addressable range."""


class MultiRowActivationError(MesramError):
    """More than two rows activated for a bit-line compute operation."""


class SpecError(MesramError):
    """Inconsistent hierarchy capacity specification."""


class ShapeError(MesramError):
    """Tensor shapes incompatible with the layer geometry."""


class MappingError(MesramError):
    """Workload does not fit the hierarchy capacity without tiling."""


class CostLookupError(MesramError, KeyError):
    """Unknown operation or baseline identifier in a cost table."""

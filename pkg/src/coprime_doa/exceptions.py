class CoprimeDOAError(ValueError):
    """Base class for estimation and configuration errors."""


class GeometryError(CoprimeDOAError):
    """Invalid coprime pair or subarray selector."""


class SubspaceCollapse(CoprimeDOAError):
    """Signal eigenvalues are indistinguishable from the noise floor."""


class DegreeDeficiency(CoprimeDOAError):
    """Leading polynomial coefficient vanishes."""


class EstimationFailure(CoprimeDOAError):
    """An estimator could not produce the requested number of angles."""

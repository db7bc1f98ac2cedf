"""Exception types shared across the package."""


class KirchdualError(Exception):
    """Base class for all errors raised by kirchdual."""


class InvalidParameter(KirchdualError):
    """An argument violates a documented precondition."""


class SingularTensor(KirchdualError):
    """A tensor that must be inverted is singular (or numerically so)."""


class OrientationViolation(KirchdualError):
    """Deformation gradient with det F <= 0 passed to an orientation-checked map."""


class OutOfDomain(KirchdualError):
    """Branch evaluation requested outside the branch's q-domain."""


class AtBranchJunction(KirchdualError):
    """Derivative requested at the junction of the two negative branches."""


class DegenerateStress(KirchdualError):
    """Applied stress has a (numerically) zero eigenvalue of tau^T tau."""


class ResidualTooLarge(KirchdualError):
    """A reconstructed quantity fails its defining equation's residual check."""

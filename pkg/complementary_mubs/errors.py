# --- EXCEPTION CLASSES ---
# Every error raised by the package derives from ComplementarityError and from
# the closest builtin, so `except ValueError` keeps working for callers.


class ComplementarityError(Exception):
    pass


# --- residue arithmetic ---
class NotPrime(ComplementarityError, ValueError):
    pass


class ModulusMismatch(ComplementarityError, ValueError):
    pass


class ZeroInverse(ComplementarityError, ZeroDivisionError):
    pass


class NoNonresidue(ComplementarityError, ValueError):
    pass


class DependentVectors(ComplementarityError, ValueError):
    pass


class SingularMatrix(ComplementarityError, ValueError):
    pass


class NotCanonical(ComplementarityError, ValueError):
    pass


# --- subalgebra map ---
class NotInS(ComplementarityError, ValueError):
    pass


class NotSL2(ComplementarityError, ValueError):
    pass


# --- constructions ---
class ZeroJ(ComplementarityError, ValueError):
    pass


class ZeroI(ComplementarityError, ValueError):
    pass


class NotOddPrime(ComplementarityError, ValueError):
    pass


class NotNonresidue(ComplementarityError, ValueError):
    pass


class WrongResidueClass(ComplementarityError, ValueError):
    pass


class InvalidSubgroup(ComplementarityError, ValueError):
    pass


class InvalidDecomposition(ComplementarityError, ValueError):
    pass


class SearchExhausted(ComplementarityError, RuntimeError):
    def __init__(self, p, attempts):
        super().__init__(f"No subgroup of SL2({p}) of order {p * p - 1} without elements of order {p} "
                         f"found after {attempts} attempts")
        self.p = p
        self.attempts = attempts


# --- numerics ---
class DimensionMismatch(ComplementarityError, ValueError):
    pass


class NotAMasa(ComplementarityError, ValueError):
    pass


class NotAFactor(ComplementarityError, ValueError):
    pass


class DegenerateSplit(ComplementarityError, RuntimeError):
    pass


class SearchDiverged(ComplementarityError, RuntimeError):
    pass


# --- file formats ---
class ParseError(ComplementarityError, ValueError):
    def __init__(self, message, field=None, line=None):
        location = []
        if field:
            location.append(f"field '{field}'")
        if line is not None:
            location.append(f"line {line}")
        suffix = f" ({', '.join(location)})" if location else ""
        super().__init__(f"{message}{suffix}")
        self.field = field
        self.line = line


class VersionMismatch(ComplementarityError, ValueError):
    pass

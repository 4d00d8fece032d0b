class BaseNCGradedException(Exception):

    code = 1

    def hint(self):
        return "Unknown Error."


class InputError(BaseNCGradedException):

    code = 2

    def hint(self):
        return f"ncgraded can't use this input: {self.args[0]}"


class DSLSyntaxError(InputError):
    def hint(self):
        message, line, column = self.args
        return f"Syntax error at line {line}, column {column}: {message}."


class UnknownGeneratorError(InputError):
    def hint(self):
        name, line, column = self.args
        return f"Unknown generator '{name}' at line {line}, column {column}."


class InhomogeneousRelationError(InputError):
    def hint(self):
        relation, line, degrees = self.args
        return (
            f"Relation '{relation}' at line {line} is not homogeneous "
            f"(it mixes degrees {', '.join(str(d) for d in degrees)}). "
            "Use a 'filtered algebra' header to homogenize it."
        )


class ZeroRelationError(InputError):
    def hint(self):
        return f"Relation at line {self.args[0]} is zero."


class UnknownBuiltinError(InputError):
    def hint(self):
        return (
            f"There is no builtin algebra called '{self.args[0]}'. "
            f"Known names: {', '.join(self.args[1])}."
        )


class InvalidFieldError(InputError):
    def hint(self):
        return f"ncgraded doesn't understand '{self.args[0]}' as a field (use Q or F<prime>)."


class BoundTooSmallError(InputError):
    def hint(self):
        return (
            f"The degree bound {self.args[0]} is smaller than the largest "
            f"relation degree {self.args[1]}."
        )


class MalformedRationalError(InputError):
    def hint(self):
        return f"'{self.args[0]}' is not a rational function in t with a nonzero constant term in the denominator."


class ZeroParameterError(InputError):
    def hint(self):
        return f"Parameter {self.args[0]} must be nonzero."


class EndomorphismError(InputError):
    def hint(self):
        return f"The map on generators is not a graded endomorphism: {self.args[0]}."


class UnreadableInputError(InputError):
    def hint(self):
        return f"Can't read '{self.args[0]}': {self.args[1]}."


class CertificationError(InputError):
    """Bounds too small for what was asked; the caller can raise them."""


class UncertifiedDegreeError(CertificationError):
    def hint(self):
        return (
            f"Degree {self.args[0]} is above the certified degree {self.args[1]}; "
            "raise the degree bound."
        )


class WindowTooSmallError(CertificationError):
    def hint(self):
        return f"The certified window ends at degree {self.args[0]}; at least {self.args[1]} is needed."


class ScanGuardError(CertificationError):
    def hint(self):
        size, degree = self.args
        return (
            f"Enumerating degree {degree} needs {size} vectors, above the 2^22 guard. "
            "Lower --scan-degree or use a smaller --scan-prime."
        )

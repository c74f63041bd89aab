"""
Jerarquía de errores del laboratorio.

Todas las excepciones de dominio heredan de ``LabError`` (que a su vez es un
``ValueError``) para que vistas y comandos puedan capturar un único tipo y
traducirlo a HTTP 400 o a ``CommandError``.
"""


class LabError(ValueError):
    """Error de dominio genérico del laboratorio."""


class GraphConstructionError(LabError):
    """Lazo, vértice fuera de rango o grafos con distinto n."""


class VertexOutOfRangeError(LabError):
    def __init__(self, vertex, n):
        self.vertex = vertex
        self.n = n
        super().__init__(f"Vértice {vertex} fuera de rango [0, {n})")


class GraphParseError(LabError):
    """
    Entrada mal formada. ``line`` se usa para listas de aristas (1-based) y
    ``offset`` para graph6 (posición del byte, 0-based).
    """

    def __init__(self, message, line=None, offset=None):
        self.line = line
        self.offset = offset
        where = ""
        if line is not None:
            where = f" (línea {line})"
        elif offset is not None:
            where = f" (byte {offset})"
        super().__init__(f"{message}{where}")


class DensityError(LabError):
    pass


class RandomModelError(LabError):
    pass


class RegularityCapError(LabError):
    """El modo exacto excede el tope configurado; usar modo muestreado."""


class IrregularPairError(LabError):
    """
    El par de entrada no cumplió la promesa de ε-regularidad.
    ``report`` lleva el ``RegularityReport`` con el testigo ya verificado
    (o ``None`` si sólo se pudo muestrear sin encontrarlo).
    """

    def __init__(self, message, report=None):
        self.report = report
        super().__init__(message)


class PairCompletionError(LabError):
    pass


class EnumerationCapError(LabError):
    def __init__(self, count, cap):
        self.count = count
        self.cap = cap
        super().__init__(
            f"El modo exacto requiere enumerar {count} conjuntos (tope {cap}); usa modo 'sampled'"
        )

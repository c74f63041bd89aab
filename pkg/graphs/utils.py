from fractions import Fraction

from django.conf import settings

from .exceptions import LabError


def lab_setting(name: str, default):
    """
    Lee un parámetro LAB_* de ``django.conf.settings``; fuera de un proyecto
    configurado (scripts, workers) devuelve el valor por defecto.
    """
    if not settings.configured:
        return default
    return getattr(settings, name, default)


def as_fraction(value) -> Fraction:
    """
    Convierte int/str/float/Fraction a ``Fraction`` exacta.
    Los float pasan por ``str`` para que 0.25 sea 1/4 y 0.2 sea 1/5.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise LabError(f"Valor racional inválido: {value!r}")
    if isinstance(value, int):
        return Fraction(value)
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as e:
        raise LabError(f"Valor racional inválido: {value!r}") from e


def format_fraction(value: Fraction) -> str:
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


# --- Bitmasks sobre vértices 0..n-1 ---

def popcount(mask: int) -> int:
    return mask.bit_count()


def mask_of(vertices) -> int:
    mask = 0
    for v in vertices:
        mask |= 1 << v
    return mask


def bits_of(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out

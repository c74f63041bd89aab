"""Salida de resultados: CSV (contrato para herramientas externas) y JSON con metadatos."""

import csv
import io
import json
import logging
from pathlib import Path

from graphs.exceptions import LabError
from graphs.utils import format_fraction

from .harness import SweepResult

logger = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "c", "p", "trials", "found", "certified_no", "unknown", "mean_coverage", "wall_time_ms")


def to_csv(result: SweepResult) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in result.rows:
        writer.writerow([
            row.n,
            format_fraction(row.c),
            repr(row.p),
            row.trials,
            row.found,
            row.certified_no,
            row.unknown,
            f"{row.mean_coverage:.6f}",
            f"{row.wall_time_ms:.3f}",
        ])
    return buffer.getvalue()


def to_json(result: SweepResult) -> str:
    return json.dumps(result.as_dict(), indent=2, ensure_ascii=False)


def emit(result: SweepResult, fmt: str, path) -> Path:
    if fmt not in ("csv", "json"):
        raise LabError(f"Formato desconocido '{fmt}' (usa csv|json)")
    text = to_csv(result) if fmt == "csv" else to_json(result)
    path = Path(path)
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        logger.error(f"❌ No se pudo escribir {path}: {e}")
        raise LabError(f"No se pudo escribir {path}: {e}") from e
    logger.info(f"✅ Resultado escrito en {path} ({fmt}, {len(result.rows)} filas)")
    return path


def load_result(path) -> SweepResult:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise LabError(f"No se pudo leer el resultado {path}: {e}") from e
    return SweepResult.from_dict(data)

import csv
import io
import json
import tempfile
import time
from fractions import Fraction
from io import StringIO
from pathlib import Path
from unittest.mock import patch

from django.conf import settings
from django.core.management import call_command
from django.core.management.base import CommandError
from django.test import SimpleTestCase, TestCase, tag
from rest_framework import serializers, status
from rest_framework.test import APITestCase

from densities.invariants import named_pattern
from graphs.exceptions import LabError

from .config import DEFAULT_C_GRID, load_sweep_config
from .exporters import CSV_COLUMNS, emit, load_result, to_csv
from .harness import SweepResult, run_base_comparison, run_extremal_demo, run_threshold_sweep
from .models import SweepRun

K3 = named_pattern("k3")


def sweep(**overrides) -> SweepResult:
    data = {"pattern": "k3", "n_values": [9], "base": "empty", "c_grid": ["1/2", "2", "8"], "trials": 4, "seed": 11, "budget": 2000}
    data.update(overrides)
    return run_threshold_sweep(load_sweep_config(data))


def csv_without_wall_time(text: str) -> list[list[str]]:
    return [row[:-1] for row in csv.reader(io.StringIO(text))]


class SweepConfigTestCase(SimpleTestCase):
    """Tests para la validación de configuraciones de barrido"""

    def test_defaults(self):
        """Test: rejilla geométrica, acoplamiento y semilla por defecto"""
        cfg = load_sweep_config({"n_values": [6], "trials": 1})
        self.assertEqual(cfg.c_grid, tuple(Fraction(c) for c in DEFAULT_C_GRID))
        self.assertTrue(cfg.coupled)
        self.assertEqual(cfg.seed, settings.LAB_DEFAULT_SEED)
        self.assertEqual(cfg.pattern.order, 3)

    def test_n_not_divisible(self):
        """Test: n no divisible por |H| se rechaza antes de ejecutar"""
        with self.assertRaises(serializers.ValidationError):
            load_sweep_config({"pattern": "k3", "n_values": [9, 10], "trials": 1})

    def test_grid_must_increase(self):
        """Test: c_grid no estrictamente creciente se rechaza"""
        for grid in (["1", "1"], ["2", "1"], ["-1", "1"]):
            with self.assertRaises(serializers.ValidationError):
                load_sweep_config({"n_values": [6], "trials": 1, "c_grid": grid})

    def test_trials_positive(self):
        """Test: trials = 0 se rechaza"""
        with self.assertRaises(serializers.ValidationError):
            load_sweep_config({"n_values": [6], "trials": 0})

    def test_extremal_condition_checked(self):
        """Test: una base extremal que no cumple b > a(|H|−1) se rechaza"""
        with self.assertRaises(serializers.ValidationError):
            load_sweep_config({"n_values": [12], "trials": 1, "base": "extremal:1/2"})

    def test_unknown_base(self):
        """Test: descriptor de base desconocido"""
        with self.assertRaises(serializers.ValidationError):
            load_sweep_config({"n_values": [6], "trials": 1, "base": "petersen"})

    def test_file_and_seed_override(self):
        """Test: lectura desde archivo y --seed sustituye a la semilla"""
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp) / "sweep.json"
            path.write_text(json.dumps({"n_values": [6], "trials": 2, "seed": 5, "c_grid": [0.5, 1]}))
            cfg = load_sweep_config(path, seed=99)
        self.assertEqual(cfg.seed, 99)
        self.assertEqual(cfg.c_grid, (Fraction(1, 2), Fraction(1)))
        self.assertEqual(cfg.as_dict()["c_grid"], ["1/2", "1"])


class ThresholdSweepTestCase(SimpleTestCase):
    """Tests para run_threshold_sweep"""

    def test_complete_base_always_found(self):
        """Test: con base K_n todos los ensayos encuentran tiling"""
        result = sweep(n_values=[6, 9], base="complete", c_grid=["0", "1"], trials=3)
        self.assertEqual(len(result.rows), 4)
        for row in result.rows:
            self.assertEqual(row.found, row.trials)
            self.assertEqual(row.mean_coverage, 1.0)

    def test_triangle_free_base_certified(self):
        """Test: c = 0 sobre la base extremal da certificados de no existencia"""
        result = sweep(n_values=[12], base="extremal:1/4", c_grid=["0"], trials=5)
        row = result.rows[0]
        self.assertEqual(row.p, 0.0)
        self.assertEqual(row.certified_no, 5)
        self.assertEqual(row.found, 0)

    def test_tally_conservation(self):
        """Test: found + certified_no + unknown == trials en cada fila"""
        for coupled in (True, False):
            result = sweep(n_values=[9, 12], coupled=coupled)
            for row in result.rows:
                self.assertEqual(row.found + row.certified_no + row.unknown, row.trials)
                self.assertLessEqual(row.lower, row.upper)

    def test_row_order_and_p(self):
        """Test: una fila por (n, c) en orden y p = min(1, c·n^{-1/d*})"""
        result = sweep(n_values=[9, 12])
        self.assertEqual([(r.n, r.c) for r in result.rows], [
            (n, Fraction(c)) for n in (9, 12) for c in ("1/2", "2", "8")
        ])
        row = result.row(9, 8)
        self.assertAlmostEqual(row.p, min(1.0, 8 * 9 ** (-2 / 3)))

    def test_reproducible(self):
        """Test: misma configuración y semilla ⇒ mismo CSV salvo wall_time_ms"""
        first = to_csv(sweep(n_values=[9, 12]))
        second = to_csv(sweep(n_values=[9, 12]))
        self.assertEqual(csv_without_wall_time(first), csv_without_wall_time(second))

    def test_coupled_monotone(self):
        """Test: con acoplamiento, Found en c₁ implica Found en c₂ ≥ c₁ por semilla"""
        result = sweep(c_grid=["1/4", "1/2", "1", "2", "4", "8"], trials=10)
        self.assertEqual(result.monotonicity_violations(), [])

    def test_parallel_matches_serial(self):
        """Test: el reparto en procesos no cambia filas ni orden"""
        serial = sweep(trials=4, workers=1)
        parallel = sweep(trials=4, workers=2)
        self.assertEqual(csv_without_wall_time(to_csv(serial)), csv_without_wall_time(to_csv(parallel)))

    def test_confidence_interval_brackets_bounds(self):
        """Test: el intervalo de confianza envuelve [lower, upper]"""
        for row in sweep(trials=6).rows:
            low, high = row.confidence_interval()
            self.assertLessEqual(low, row.lower)
            self.assertGreaterEqual(high, row.upper)

    @tag("slow")
    def test_coupled_monotone_extremal(self):
        """Test: cero violaciones de monotonía en n=30 con base extremal y 100 ensayos"""
        result = sweep(
            n_values=[30], base="extremal:1/5", c_grid=["1/4", "1/2", "1", "2", "4"], trials=100, budget=20000
        )
        self.assertEqual(result.monotonicity_violations(), [])
        for row in result.rows:
            self.assertEqual(row.found + row.certified_no + row.unknown, 100)


class ExtremalDemoTestCase(SimpleTestCase):
    """Tests para run_extremal_demo"""

    def test_verdict_rationals(self):
        """Test: el veredicto devuelve a, b y ε = b − a(|H|−1) exactos"""
        demo = run_extremal_demo(K3, 12, "1/4", ["0"], trials=2, seed=3, budget=1000)
        self.assertEqual(demo.verdict["a"], "1/4")
        self.assertEqual(demo.verdict["b"], "3/4")
        self.assertEqual(demo.verdict["eps"], "1/4")
        self.assertEqual(demo.verdict["eps_n"], "3")
        self.assertEqual((demo.verdict["x_size"], demo.verdict["y_size"]), (3, 9))

    def test_zero_probability(self):
        """Test: p = 0 ⇒ cobertura 0 dentro de Y y ningún tiling perfecto"""
        demo = run_extremal_demo(K3, 12, "1/4", ["0"], trials=3, seed=3, budget=1000)
        self.assertEqual(demo.result.rows[0].certified_no, 3)
        self.assertEqual(demo.verdict["per_c"][0]["mean_y_coverage"], 0)
        self.assertEqual(demo.verdict["per_c"][0]["y_covers_eps_n_rate"], 0)

    def test_wall_time_excludes_y_coverage(self):
        """Test: wall_time_ms mide solo la búsqueda del tiling, no la cobertura dentro de Y"""

        def slow_y_coverage(*args):
            time.sleep(0.5)
            return 0

        with patch("experiments.harness._y_coverage", side_effect=slow_y_coverage) as y_coverage:
            demo = run_extremal_demo(K3, 12, "1/4", ["0"], trials=1, seed=3, budget=1000)
        self.assertEqual(y_coverage.call_count, 1)
        self.assertLess(demo.result.rows[0].wall_time_ms, 500)

    def test_condition_violated(self):
        """Test: a demasiado grande viola b > a(|H|−1)"""
        with self.assertRaises(LabError):
            run_extremal_demo(K3, 12, "1/2", ["1"], trials=1, seed=0, budget=100)

    @tag("slow")
    def test_acceptance_run(self):
        """Test: n=60, a=1/4: certificados en c=0 y found/trials ≥ 0.8 en c=8"""
        demo = run_extremal_demo(K3, 60, "1/4", ["0", "8"], trials=50, seed=20240101, budget=5000)
        at_zero, at_eight = demo.result.rows
        self.assertEqual(at_zero.certified_no, 50)
        self.assertGreaterEqual(at_eight.found, 40)
        self.assertEqual(demo.verdict["eps"], "1/4")


class BaseComparisonTestCase(SimpleTestCase):
    """Tests para run_base_comparison"""

    def test_shared_seeds_and_dominance(self):
        """Test: ambas curvas comparten semillas y la base densa domina"""
        comparison = run_base_comparison(K3, 12, "1/4", ["1/2", "1", "4"], trials=4, seed=8, budget=2000)
        self.assertEqual(comparison.dominance_violations(), [])
        self.assertEqual(len(comparison.empty.rows), len(comparison.dense.rows))
        self.assertEqual(
            [(o.n, o.trial) for o in comparison.empty.outcomes],
            [(o.n, o.trial) for o in comparison.dense.outcomes],
        )
        for empty_row, dense_row in zip(comparison.empty.rows, comparison.dense.rows):
            self.assertLessEqual(empty_row.found, dense_row.found)

    def test_report_schema(self):
        """Test: el informe trae ambas curvas y la nota sobre el factor logarítmico"""
        report = run_base_comparison(K3, 12, "1/4", ["1"], trials=2, seed=8, budget=500).as_dict()
        self.assertIn("logarítmico", report["note"])
        self.assertEqual(report["rows"][0]["c"], "1")
        self.assertIn("found", report["rows"][0]["mindeg"])
        self.assertEqual(report["mindeg"]["metadata"]["base"], "mindeg:1/4")
        self.assertEqual(report["empty"]["metadata"]["base"], "empty")

    @tag("slow")
    def test_acceptance_run(self):
        """Test: n=60, alpha=1/4: la base densa llega a 0.8 con c estrictamente menor"""
        grid = list(DEFAULT_C_GRID)
        comparison = run_base_comparison(K3, 60, "1/4", grid, trials=50, seed=20240101, budget=20000)
        dense = comparison.dense.first_c_reaching(60)
        empty = comparison.empty.first_c_reaching(60)
        self.assertIsNotNone(dense)
        if empty is not None:
            self.assertLess(dense, empty)
        self.assertEqual(comparison.dominance_violations(), [])


class ExportTestCase(SimpleTestCase):
    """Tests para la exportación CSV/JSON"""

    def test_header_only(self):
        """Test: resultado vacío ⇒ CSV solo con cabecera"""
        self.assertEqual(to_csv(SweepResult()), ",".join(CSV_COLUMNS) + "\n")

    def test_csv_schema(self):
        """Test: columnas exactas y |n_values|·|c_grid| filas"""
        rows = list(csv.reader(io.StringIO(to_csv(sweep(n_values=[9, 12])))))
        self.assertEqual(rows[0], list(CSV_COLUMNS))
        self.assertEqual(len(rows) - 1, 2 * 3)
        self.assertEqual(rows[1][1], "1/2")

    def test_json_round_trip(self):
        """Test: el JSON emitido se vuelve a leer como el mismo resultado"""
        result = sweep()
        with tempfile.TemporaryDirectory() as tmp:
            path = emit(result, "json", Path(tmp) / "out.json")
            self.assertEqual(load_result(path), result)
            data = json.loads(path.read_text(encoding="utf-8"))
        self.assertIn("versions", data["metadata"])
        self.assertIn("ci_low", data["rows"][0])

    def test_unwritable_path(self):
        """Test: fallo de E/S ⇒ LabError"""
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(LabError):
                emit(SweepResult(), "csv", Path(tmp) / "missing" / "out.csv")

    def test_unknown_format(self):
        """Test: formato desconocido"""
        with self.assertRaises(LabError):
            emit(SweepResult(), "xml", "out.xml")


class SweepRunApiTestCase(APITestCase):
    """Tests para el endpoint de ejecuciones"""

    def test_create_sweep(self):
        """Test: crear una ejecución la ejecuta y guarda el resultado"""
        payload = {
            "kind": "SWEEP",
            "config": {"pattern": "k2", "n_values": [4], "c_grid": ["1", "4"], "trials": 2, "seed": 7},
        }
        response = self.client.post("/api/experiments/runs/", payload, format="json")
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data["status"], "COMPLETED")
        self.assertEqual(len(response.data["result"]["rows"]), 2)
        self.assertEqual(SweepRun.objects.count(), 1)

        listing = self.client.get("/api/experiments/runs/")
        self.assertEqual(listing.status_code, status.HTTP_200_OK)

    def test_create_extremal_demo(self):
        """Test: demostración extremal por la API"""
        payload = {"kind": "EXTREMAL_DEMO", "config": {"n": 12, "a": "1/4", "c_grid": ["0"], "trials": 1}}
        response = self.client.post("/api/experiments/runs/", payload, format="json")
        self.assertEqual(response.status_code, status.HTTP_201_CREATED)
        self.assertEqual(response.data["result"]["verdict"]["eps"], "1/4")

    def test_invalid_config(self):
        """Test: configuración inválida ⇒ 400 sin crear la ejecución"""
        payload = {"kind": "SWEEP", "config": {"pattern": "k3", "n_values": [10], "trials": 1}}
        response = self.client.post("/api/experiments/runs/", payload, format="json")
        self.assertEqual(response.status_code, status.HTTP_400_BAD_REQUEST)
        self.assertIn("config", response.data)
        self.assertEqual(SweepRun.objects.count(), 0)


class ExperimentCommandTestCase(TestCase):
    """Tests para los comandos sweep, extremal_demo y compare_base"""

    def write_config(self, tmp, **overrides) -> Path:
        data = {"pattern": "k3", "n_values": [6], "c_grid": ["1", "4"], "trials": 2, "seed": 4, "budget": 500}
        data.update(overrides)
        path = Path(tmp) / "config.json"
        path.write_text(json.dumps(data), encoding="utf-8")
        return path

    def test_sweep_to_stdout(self):
        """Test: sweep escribe el CSV en stdout"""
        out = StringIO()
        with tempfile.TemporaryDirectory() as tmp:
            call_command("sweep", "--config", str(self.write_config(tmp)), "--no-progress", stdout=out, stderr=StringIO())
        lines = out.getvalue().strip().splitlines()
        self.assertEqual(lines[0], ",".join(CSV_COLUMNS))
        self.assertEqual(len(lines), 3)

    def test_sweep_output_and_save(self):
        """Test: --output json y --save guardan archivo y SweepRun"""
        with tempfile.TemporaryDirectory() as tmp:
            output = Path(tmp) / "result.json"
            call_command(
                "sweep", "--config", str(self.write_config(tmp)), "--format", "json", "--output", str(output),
                "--seed", "12", "--save", "--no-progress", stdout=StringIO(), stderr=StringIO(),
            )
            result = load_result(output)
        self.assertEqual(result.metadata["seed"], 12)
        run = SweepRun.objects.get()
        self.assertEqual(run.status, "COMPLETED")
        self.assertEqual(run.config["seed"], 12)

    def test_sweep_invalid_config(self):
        """Test: configuración inválida ⇒ CommandError"""
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(CommandError):
                call_command("sweep", "--config", str(self.write_config(tmp, n_values=[7])), "--no-progress", stdout=StringIO())

    def test_sweep_missing_file(self):
        """Test: archivo inexistente ⇒ CommandError"""
        with self.assertRaises(CommandError):
            call_command("sweep", "--config", "/nonexistent/config.json", stdout=StringIO())

    def test_extremal_demo(self):
        """Test: extremal_demo imprime el veredicto"""
        out = StringIO()
        call_command(
            "extremal_demo", "--n", "12", "--a", "1/4", "--c-grid", "0,1", "--trials", "2", "--no-progress",
            stdout=out, stderr=StringIO(),
        )
        report = json.loads(out.getvalue())
        self.assertEqual(report["verdict"]["eps"], "1/4")
        self.assertEqual(len(report["rows"]), 2)

    def test_extremal_demo_violation(self):
        """Test: a que viola la condición extremal ⇒ CommandError"""
        with self.assertRaises(CommandError):
            call_command("extremal_demo", "--n", "12", "--a", "1/2", "--trials", "1", "--no-progress", stdout=StringIO())

    def test_compare_base(self):
        """Test: compare_base imprime ambas curvas"""
        out = StringIO()
        call_command(
            "compare_base", "--n", "12", "--alpha", "1/4", "--c-grid", "1,4", "--trials", "2", "--no-progress",
            stdout=out, stderr=StringIO(),
        )
        report = json.loads(out.getvalue())
        self.assertEqual(report["dominance_violations"], 0)
        self.assertEqual(len(report["rows"]), 2)

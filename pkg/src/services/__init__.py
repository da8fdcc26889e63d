"""Objective, solvers and benchmark services."""

from src.services.objective import penalized_objective
from src.services.instance_generator import generate_instance
from src.services.ding_solver import solve_ding
from src.services.mirzal_solver import solve_mirzal
from src.services.pg_solver import solve_pg
from src.services.benchmark_runner import run_grid
from src.services.report_formatter import ReportFormatter
from src.services.factorization_commands import FactorizationCommands

__all__ = [
    'penalized_objective',
    'generate_instance',
    'solve_ding',
    'solve_mirzal',
    'solve_pg',
    'run_grid',
    'FactorizationCommands',
    'ReportFormatter'
]

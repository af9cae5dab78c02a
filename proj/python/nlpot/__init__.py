"""Wolff potentials and quasilinear p-Laplace solvers."""

from ._core import (
    ConvergenceError,
    DivergenceError,
    DomainError,
    EntireRadialSolution,
    Error,
    FinitenessError,
    GridGeometry,
    GridMeasure,
    InvariantError,
    NumericalError,
    ParseError,
    RadialMeasure,
    __version__,
    bilateral_report,
    capacity_ball,
    center_identity,
    check_finiteness,
    load_measure,
    radial_mesh,
    reachability,
    run_task,
    set_threads,
    solve_grid,
    solve_radial,
    sublinear_grid,
    sublinear_radial,
    task_names,
    uniqueness_battery,
    weak_lorentz_norm,
    wolff_potential,
    wolff_profile,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]

"""VQE driver: initialization, optimization and layer sweeps."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import minimize as scipy_minimize

from .circuit import Circuit, CompiledCircuit, basis_state, build_ansatz, parameter_shift_gradient
from .configspace import ConfigurationSet
from .encode import QubitOperator
from .errors import (
    DimensionError,
    LookupFailure,
    OptimizationAbort,
    ValidationError,
    VariationalBoundViolation,
)

BOUND_TOL = 1e-9


@dataclass(frozen=True)
class InitStrategy:
    kind: str = "gaussian"  # "hf" or "gaussian"
    seed: int = 0
    variance: float = 0.3
    mean: float = 0.0

    def __post_init__(self):
        if self.kind not in ("hf", "gaussian"):
            raise ValidationError(f"init kind must be 'hf' or 'gaussian', got {self.kind!r}")
        if self.kind == "gaussian" and not self.variance > 0:
            raise ValidationError("Gaussian init needs a positive variance")

    def with_seed(self, seed: int) -> InitStrategy:
        return InitStrategy(self.kind, seed, self.variance, self.mean)


def hf_reference_state(config_set: ConfigurationSet) -> int:
    """Qubit basis index of the aufbau configuration (lowest alpha and beta orbitals)."""
    if len(config_set) == 0:
        raise LookupFailure("empty configuration set")
    bits = sum(1 << (2 * i) for i in range(config_set.n_alpha))
    bits |= sum(1 << (2 * i + 1) for i in range(config_set.n_beta))
    return config_set.encode_index(bits)


def initialize_params(strategy: InitStrategy, n_params: int) -> np.ndarray:
    if n_params < 0:
        raise ValidationError("parameter count must be nonnegative")
    if strategy.kind == "hf":
        return np.zeros(n_params)
    rng = np.random.default_rng(strategy.seed)
    return rng.normal(strategy.mean, math.sqrt(strategy.variance), n_params)


@dataclass(frozen=True)
class OptimizerConfig:
    grad_tol: float = 1e-8
    f_tol: float = 1e-10
    max_evals: int = 20000
    method: str = "SLSQP"


@dataclass
class MinimizeResult:
    x: np.ndarray
    fun: float
    history: list[tuple[int, float]]
    evaluations: int
    converged: bool
    message: str
    grad_norm: float


class _BudgetExhausted(Exception):
    pass


def minimize(
    objective: Callable,
    x0,
    config: OptimizerConfig = OptimizerConfig(),
    jac: Callable | bool | None = None,
) -> MinimizeResult:
    """Local minimization with SciPy's SLSQP and a hard evaluation budget.

    ``jac=True`` means ``objective`` returns ``(f, grad)``; a callable gives
    the gradient separately; ``None`` falls back to parameter shift, which is
    exact only for objectives built from Ry rotations. Every evaluation is
    recorded and the best point seen is returned.
    """
    x0 = np.asarray(x0, dtype=float)
    history: list[tuple[int, float]] = []
    best = {"f": math.inf, "x": x0.copy(), "g": None}

    if jac is True:
        fg = objective
    else:
        gfun = jac if callable(jac) else (lambda x: parameter_shift_gradient(objective, x))

        def fg(x):
            return objective(x), gfun(x)

    def wrapped(x):
        if len(history) >= config.max_evals:
            raise _BudgetExhausted
        f, g = fg(x)
        f = float(f)
        g = np.asarray(g, dtype=float)
        if not (math.isfinite(f) and np.all(np.isfinite(g))):
            raise OptimizationAbort(f"non-finite objective or gradient at evaluation {len(history)}: f={f}")
        history.append((len(history), f))
        if f < best["f"]:
            best.update(f=f, x=np.array(x, dtype=float), g=g)
        return f, g

    f0, g0 = wrapped(x0)
    if x0.size == 0 or np.max(np.abs(g0), initial=0.0) <= config.grad_tol:
        return MinimizeResult(x0, f0, history, len(history), True, "initial gradient below tolerance",
                              float(np.max(np.abs(g0), initial=0.0)))
    try:
        res = scipy_minimize(
            wrapped,
            x0,
            jac=True,
            method=config.method,
            options={"maxiter": config.max_evals, "ftol": config.f_tol},
        )
        message = str(res.message)
        converged = bool(res.success)
    except _BudgetExhausted:
        message = f"evaluation budget of {config.max_evals} exhausted"
        converged = False
    gnorm = float(np.max(np.abs(best["g"]), initial=0.0))
    if gnorm <= config.grad_tol:
        converged = True
    return MinimizeResult(best["x"], best["f"], history, len(history), converged, message, gnorm)


@dataclass(frozen=True)
class VqeConfig:
    optimizer: OptimizerConfig = OptimizerConfig()
    gradient: str = "adjoint"  # or "parameter_shift"
    bound_tol: float = BOUND_TOL


@dataclass
class VqeResult:
    energy: float
    params: np.ndarray
    evaluations: int
    converged: bool
    history: list[tuple[int, float]]
    init: InitStrategy
    layers: int
    ansatz: str
    initial_energy: float = math.nan
    initial_grad_norm: float = math.nan
    message: str = ""
    restart_energies: list[float] = field(default_factory=list)

    @property
    def stalled(self) -> bool:
        """True when the start point already had a vanishing gradient."""
        return self.evaluations <= 1

    def to_dict(self) -> dict:
        return {
            "energy_hartree": self.energy,
            "params": [float(p) for p in self.params],
            "evaluations": self.evaluations,
            "converged": self.converged,
            "history": [[k, e] for k, e in self.history],
            "layers": self.layers,
            "ansatz": self.ansatz,
            "init": {"kind": self.init.kind, "seed": self.init.seed, "variance": self.init.variance},
            "initial_energy": self.initial_energy,
            "initial_grad_norm": self.initial_grad_norm,
            "message": self.message,
            "restart_energies": self.restart_energies,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _operator_array(H):
    if isinstance(H, QubitOperator):
        m = H.dense()
        return m.real if H.is_real() else m
    return H


def run_vqe(
    H: QubitOperator | np.ndarray,
    circuit: Circuit,
    prep: int,
    init: InitStrategy,
    config: VqeConfig = VqeConfig(),
    reference_energy: float | None = None,
) -> VqeResult:
    """Minimize ``<0|X_prep^dag U(t)^dag H U(t) X_prep|0>`` over ``t``."""
    M = _operator_array(H)
    dim = 1 << circuit.n_qubits
    if M.shape != (dim, dim):
        raise DimensionError(f"operator dimension {M.shape[0]} vs circuit on {circuit.n_qubits} qubits")
    prepared = circuit.with_prep(prep)
    comp = CompiledCircuit(prepared)
    psi0 = basis_state(circuit.n_qubits, 0)

    if config.gradient == "adjoint":
        objective = lambda x: comp.energy_and_gradient(x, psi0, M)
    elif config.gradient == "parameter_shift":
        def energy(x):
            psi = comp.run(x, psi0)
            return float(np.real(np.vdot(psi, M @ psi)))

        objective = lambda x: (energy(x), parameter_shift_gradient(energy, x))
    else:
        raise ValidationError(f"unknown gradient method {config.gradient!r}")

    x0 = initialize_params(init, circuit.n_params)
    res = minimize(objective, x0, config.optimizer, jac=True)
    result = VqeResult(
        energy=res.fun,
        params=res.x,
        evaluations=res.evaluations,
        converged=res.converged,
        history=res.history,
        init=init,
        layers=_layers_of(circuit),
        ansatz=_family_of(circuit),
        initial_energy=res.history[0][1],
        initial_grad_norm=float(np.max(np.abs(objective(x0)[1]), initial=0.0)),
        message=res.message,
        restart_energies=[res.fun],
    )
    if reference_energy is not None:
        check_variational_bound(result.energy, reference_energy, config.bound_tol)
    return result


def check_variational_bound(energy: float, exact: float, tol: float = BOUND_TOL) -> None:
    if energy < exact - tol:
        raise VariationalBoundViolation(
            f"VQE energy {energy:.12f} lies below the exact ground energy {exact:.12f}"
        )


def _family_of(circuit: Circuit) -> str:
    return circuit.name.split("-")[0] if circuit.name else "custom"


def _layers_of(circuit: Circuit) -> int:
    try:
        return int(circuit.name.split("-")[1])
    except (IndexError, ValueError):
        return -1


def thread_cap() -> int:
    raw = os.environ.get("QEEVQE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise ValidationError(f"QEEVQE_THREADS must be an integer, got {raw!r}") from None


def _restart_job(args):
    M, family, n_qubits, layers, prep, init, config, ref = args
    return run_vqe(M, build_ansatz(family, n_qubits, layers), prep, init, config, ref)


def best_of_restarts(
    H,
    family: str,
    layers: int,
    init: InitStrategy,
    n_restarts: int = 5,
    *,
    prep: int = 0,
    config: VqeConfig = VqeConfig(),
    reference_energy: float | None = None,
    n_qubits: int | None = None,
) -> VqeResult:
    """Lowest-energy result over restarts with seeds ``init.seed + i``.

    HF starts are deterministic, so they run once whatever ``n_restarts`` is.
    """
    if n_restarts < 1:
        raise ValidationError("need at least one restart")
    M = _operator_array(H)
    nq = n_qubits if n_qubits is not None else int(round(math.log2(M.shape[0])))
    count = 1 if init.kind == "hf" else n_restarts
    jobs = [(M, family, nq, layers, prep, init.with_seed(init.seed + i), config, reference_energy) for i in range(count)]
    workers = min(thread_cap(), count)
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_restart_job, jobs))
    else:
        results = [_restart_job(j) for j in jobs]
    # ties go to the earliest seed so the merge is deterministic
    best = min(range(count), key=lambda i: (results[i].energy, i))
    out = results[best]
    out.restart_energies = [r.energy for r in results]
    return out


def layer_sweep(
    H,
    family: str,
    layer_list: Sequence[int],
    init: InitStrategy,
    n_restarts: int = 5,
    **kw,
) -> list[VqeResult]:
    if not layer_list:
        raise ValidationError("layer list is empty")
    return [best_of_restarts(H, family, L, init, n_restarts, **kw) for L in layer_list]

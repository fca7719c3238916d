"""Run configuration, result serialization, and the task entry points.

Result files are deterministic: keys are sorted, floats use shortest
round-trip representation, and timing is recorded only on request (the
default null keeps repeated runs byte-identical).  Complex matrices are
serialized as nested [re, im] pairs.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field, asdict

import numpy as np

from . import algebroid as alg
from . import gravity as grav
from . import latticeymh as lymh
from . import ncgauge, optimize, spectral
from .liealg import su_basis
from .verify import Check, run_all_checks

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Raised for malformed run configurations."""


@dataclass
class RunConfig:
    task: str = "verify"
    n: int = 2
    grid: tuple = (8, 8)
    spacing: float = 1.0
    mu: float = 1.0
    seed: int = 12345
    tol: dict = field(default_factory=dict)
    optimizer: dict = field(
        default_factory=lambda: {
            "step": 0.4,
            "max_iter": 2000,
            "gradient": "analytic",
            "grad_tol": 1e-8,
            "action_tol": 1e-7,
        }
    )
    kind: str = "matrix-model"
    out: str = None
    report_dir: str = None
    record_timing: bool = False
    workers: int = 1
    fault_injection: str = None
    spectral_triple: dict = None

    KNOWN_TASKS = (
        "verify",
        "matrix-model",
        "lattice",
        "algebroid",
        "spectral",
        "gravity",
        "minimize",
    )

    def __post_init__(self):
        self.grid = tuple(int(x) for x in self.grid)
        if self.task not in self.KNOWN_TASKS:
            raise ConfigError(f"unknown task {self.task!r}; expected one of {self.KNOWN_TASKS}")
        if self.n < 1:
            raise ConfigError(f"field 'n': must be >= 1, got {self.n}")
        if any(g < 3 for g in self.grid):
            raise ConfigError(f"field 'grid': every extent must be >= 3, got {self.grid}")
        if self.mu < 0:
            raise ConfigError(f"field 'mu': must be nonnegative, got {self.mu}")
        if self.spacing <= 0:
            raise ConfigError(f"field 'spacing': must be positive, got {self.spacing}")
        if self.kind not in ("matrix-model", "lattice-ymh", "algebroid"):
            raise ConfigError(f"field 'kind': unknown action kind {self.kind!r}")
        if self.optimizer.get("gradient", "analytic") not in ("analytic", "fd"):
            raise ConfigError("field 'optimizer.gradient': must be 'analytic' or 'fd'")

    @classmethod
    def from_dict(cls, data: dict, **overrides) -> "RunConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config fields: {sorted(unknown)}")
        merged = dict(data)
        for key, val in overrides.items():
            if val is not None:
                if key == "optimizer":
                    merged.setdefault("optimizer", {})
                    merged["optimizer"] = {**merged.get("optimizer", {}), **val}
                else:
                    merged[key] = val
        try:
            return cls(**merged)
        except TypeError as exc:
            raise ConfigError(str(exc)) from exc

    def to_dict(self) -> dict:
        d = asdict(self)
        d["grid"] = list(self.grid)
        return d

    def tolerance(self, name: str, default: float) -> float:
        return float(self.tol.get(name, default))


@dataclass
class RunResult:
    task: str
    config: dict
    results: dict
    checks: list
    timing_ms: int = None
    schema_version: int = SCHEMA_VERSION

    @property
    def passed(self) -> bool:
        return all(c["status"] != "fail" for c in self.checks)

    def to_json_str(self) -> str:
        payload = {
            "task": self.task,
            "config": self.config,
            "results": self.results,
            "checks": self.checks,
            "timing_ms": self.timing_ms,
            "schema_version": self.schema_version,
        }
        return json.dumps(payload, sort_keys=True, indent=2) + "\n"

    def write(self, path: str):
        with open(path, "w") as fh:
            fh.write(self.to_json_str())


def encode_complex_matrix(M) -> list:
    M = np.asarray(M, dtype=complex)
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def decode_complex_matrix(rows) -> np.ndarray:
    return np.array([[complex(re, im) for re, im in row] for row in rows])


def load_spectral_triple(data: dict) -> spectral.FiniteSpectralTriple:
    """Build a triple from the JSON schema: block dims, summands, matrices."""
    try:
        return spectral.FiniteSpectralTriple(
            block_dims=tuple(data["block_dims"]),
            summands=[tuple(s) for s in data["summands"]],
            D=decode_complex_matrix(data["D"]),
            gamma=decode_complex_matrix(data["gamma"]) if data.get("gamma") else None,
            J_unitary=decode_complex_matrix(data["J_unitary"])
            if data.get("J_unitary")
            else None,
            ko_dim=int(data.get("ko_dim", 0)),
        )
    except KeyError as exc:
        raise ConfigError(f"spectral triple definition missing field {exc}") from exc


def dump_spectral_triple(t: spectral.FiniteSpectralTriple) -> dict:
    return {
        "block_dims": list(t.block_dims),
        "summands": [list(s) for s in t.summands],
        "D": encode_complex_matrix(t.D),
        "gamma": encode_complex_matrix(t.gamma) if t.gamma is not None else None,
        "J_unitary": encode_complex_matrix(t.J_unitary)
        if t.J_unitary is not None
        else None,
        "ko_dim": t.ko_dim,
    }


def classify_vacuum(b: lymh.ScalarMultipletB, tolerance: float = 1e-4) -> dict:
    """Nearest flat orbit of a scalar configuration by its Gram observable.

    G_kl = tr(b_k^dag b_l) averaged over sites is gauge invariant; orbit 1
    sits at G = 0, orbit 2 at G = 2 Id.  Reports both distances and the
    maximal site deviation from the mean configuration.
    """
    lie = b.lie
    flat = b.b.reshape(-1, lie.dim, lie.n, lie.n)
    gram = np.einsum("xkab,xlab->kl", flat.conj(), flat).real / flat.shape[0]
    dev = float(np.max(np.abs(flat - flat.mean(axis=0)))) if flat.size else 0.0
    d1 = float(np.linalg.norm(gram))
    d2 = float(np.linalg.norm(gram - 2.0 * np.eye(lie.dim)))
    if d1 <= tolerance:
        label = "orbit-1"
    elif d2 <= tolerance:
        label = "orbit-2"
    else:
        label = "other"
    return {
        "classification": label,
        "distance_orbit1": d1,
        "distance_orbit2": d2,
        "max_site_deviation": dev,
        "tolerance": tolerance,
    }


# --- tasks ---------------------------------------------------------------------


def _finish(config: RunConfig, task: str, results: dict, checks, started: float) -> RunResult:
    timing = int(1000 * (time.perf_counter() - started)) if config.record_timing else None
    return RunResult(
        task=task,
        config=config.to_dict(),
        results=results,
        checks=[asdict(c) for c in checks],
        timing_ms=timing,
    )


def verify_task(config: RunConfig) -> RunResult:
    started = time.perf_counter()
    ns = (config.n,) if config.n != 2 else (1, 2, 3, 4)
    checks = run_all_checks(
        seed=config.seed,
        ns=ns,
        extents=config.grid,
        mu=config.mu,
        fault=config.fault_injection,
    )
    n_pass = sum(c.status == "pass" for c in checks)
    results = {
        "checks_total": len(checks),
        "checks_passed": n_pass,
        "checks_skipped": sum(c.status == "skipped" for c in checks),
    }
    return _finish(config, "verify", results, checks, started)


def matrix_model_task(config: RunConfig) -> RunResult:
    started = time.perf_counter()
    lie = su_basis(config.n)
    rng = np.random.default_rng(config.seed)
    c = ncgauge.random_connection(lie, rng)
    g = ncgauge.random_unitary(config.n, rng)
    s = ncgauge.action(c)
    s_g = ncgauge.action(ncgauge.gauge_transform(c, g))
    flat0 = ncgauge.action(ncgauge.MatrixConnection(lie, np.zeros((lie.dim, lie.n, lie.n))))
    flat1 = ncgauge.action(ncgauge.MatrixConnection(lie, 1j * lie.basis))
    bianchi = ncgauge.bianchi_residual(c)
    results = {
        "action": s,
        "action_gauge_transformed": s_g,
        "action_flat_zero": flat0,
        "action_flat_basis": flat1,
        "bianchi_residual": bianchi,
    }
    checks = [
        Check.from_residual(
            "matrix-model/gauge-invariance",
            abs(s_g - s) / (1 + abs(s)),
            config.tolerance("gauge-invariance", 1e-10),
        ),
        Check.from_residual(
            "matrix-model/flat-orbits", max(flat0, flat1), config.tolerance("flat-orbits", 1e-13)
        ),
        Check.from_residual(
            "matrix-model/bianchi", bianchi, config.tolerance("bianchi", 1e-10)
        ),
    ]
    return _finish(config, "matrix-model", results, checks, started)


def lattice_task(config: RunConfig) -> RunResult:
    started = time.perf_counter()
    lie = su_basis(config.n)
    lat = lymh.LatticeSpec(config.grid, config.spacing)
    p = lymh.YMHParams(config.mu, lie)
    rng = np.random.default_rng(config.seed)
    a0, b0 = lymh.zero_fields(lat, lie)
    a1, b1 = lymh.vacuum_fields(lat, lie)
    s_orbit1 = lymh.ymh_action(a0, b0, p)
    s_orbit2 = lymh.ymh_action(a1, b1, p)
    a, b = lymh.random_fields(lat, lie, rng, scale=0.5)
    s_rand = lymh.ymh_action(a, b, p)
    spectrum = lymh.mass_spectrum(b1, p)
    results = {
        "action_orbit1": s_orbit1,
        "action_orbit2": s_orbit2,
        "action_random": s_rand,
        "ym_action_random": lymh.ym_action(a),
        "mass_spectrum": [float(x) for x in spectrum[0]],
        "vacuum_classification": classify_vacuum(b1),
        "zero_classification": classify_vacuum(b0),
    }
    checks = [
        Check.from_residual(
            "lattice/flat-orbits", max(s_orbit1, s_orbit2), config.tolerance("flat-orbits", 1e-13)
        ),
        Check.from_bool(
            "lattice/action-nonnegative", s_rand >= 0.0, note=f"S = {s_rand:.6g}"
        ),
        Check.from_bool(
            "lattice/vacuum-classified",
            results["vacuum_classification"]["classification"] == "orbit-2"
            and results["zero_classification"]["classification"] == "orbit-1",
        ),
    ]
    return _finish(config, "lattice", results, checks, started)


def algebroid_task(config: RunConfig) -> RunResult:
    started = time.perf_counter()
    lie = su_basis(config.n)
    lat = lymh.LatticeSpec(config.grid, config.spacing)
    rng = np.random.default_rng(config.seed)
    K = lie.dim
    m_id = alg.MetricTriple(lat, lie, np.eye(K))
    om = 0.5 * rng.standard_normal((*lat.extents, lat.d, K))
    w_ord = alg.ordinary_connection(lat, lie, om)
    s_gen = alg.action_generalized(w_ord, m_id)
    a_field, _ = alg.to_lattice_fields(w_ord)
    s_ym = lymh.ym_action(a_field)
    mu = max(config.mu, 1e-6)
    a, b = lymh.random_fields(lat, lie, rng, scale=0.5, traceless=True)
    s_ymh = lymh.ymh_action(a, b, lymh.YMHParams(mu, lie))
    s_cal = alg.ymh_equivalent_action(alg.from_lattice_fields(a, b), mu)
    results = {
        "action_ordinary": s_gen,
        "ym_action": s_ym,
        "ymh_action": s_ymh,
        "calibrated_action": s_cal,
    }
    checks = [
        Check.from_residual(
            "algebroid/yang-mills-reduction",
            abs(s_gen - s_ym) / max(1e-300, abs(s_ym)),
            config.tolerance("yang-mills-reduction", 1e-10),
        ),
        Check.from_residual(
            "algebroid/ymh-calibration",
            abs(s_cal - s_ymh) / max(1e-300, abs(s_ymh)),
            config.tolerance("ymh-calibration", 1e-8),
        ),
    ]
    return _finish(config, "algebroid", results, checks, started)


def spectral_task(config: RunConfig) -> RunResult:
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    if config.spectral_triple is not None:
        t = load_spectral_triple(config.spectral_triple)
        name = "custom"
    else:
        t = spectral.two_point_real_triple(1.0)
        name = "two-point-real"
    rep = spectral.check_axioms(t)
    results = {
        "triple": name,
        "hilbert_dim": t.hilbert_dim,
        "axiom_residuals": {k: float(v) for k, v in sorted(rep.residuals.items())},
        "eigenvalues": [float(x) for x in np.linalg.eigvalsh(t.D)],
        "spectral_action_gaussian": spectral.spectral_action(t, spectral.chi_gaussian, 2.0),
        "spectral_action_bump": spectral.spectral_action(t, spectral.chi_bump(), 2.0),
    }
    checks = [
        Check.from_residual(
            "spectral/axioms", max(rep.residuals.values()), config.tolerance("axioms", 1e-12)
        )
    ]
    if t.J_unitary is not None:
        worst = 0.0
        for _ in range(10):
            omega = spectral.random_hermitian_one_form(t, rng)
            ublocks = spectral.random_algebra_unitary(t, rng)
            uop = t.represent(ublocks)
            lhs = spectral.gauge_transform_spectral(spectral.fluctuate(t, omega), ublocks).D
            omega_u = uop @ omega @ uop.conj().T + uop @ (
                t.D @ uop.conj().T - uop.conj().T @ t.D
            )
            worst = max(worst, float(np.max(np.abs(lhs - spectral.fluctuate(t, omega_u).D))))
        checks.append(
            Check.from_residual(
                "spectral/gauge-coincidence", worst, config.tolerance("gauge-coincidence", 1e-12)
            )
        )
    return _finish(config, "spectral", results, checks, started)


def gravity_task(config: RunConfig) -> RunResult:
    started = time.perf_counter()
    radius = 1.7
    errs = []
    for n in (48, 96, 192):
        ms = grav.sphere_grid(radius, n, 8)
        R = grav.scalar_curvature(
            ms, grav.curvature_tensors(grav.christoffel(ms), ms).ricci
        )
        window = (ms.axes[0] >= 0.6) & (ms.axes[0] <= np.pi - 0.6)
        errs.append(
            float(np.max(np.abs(R[window][:, 2:-2] - 2 / radius ** 2)) * radius ** 2 / 2)
        )
    t0 = grav.sphere_cross_flat_tetrad(radius, n_theta=14, n_other=6)
    gam_spin = grav.levi_civita_spin_connection(t0)
    t = grav.TetradField(t0.axes, t0.Lambda, t0.eta, gam_spin)
    s_frame = grav.palatini_action(t, 1.0)
    s_metric = grav.eh_action(grav.metric_from_tetrad(t), 1.0).value
    results = {
        "sphere_radius": radius,
        "curvature_errors": errs,
        "curvature_order": float(np.log2(errs[0] / errs[1])),
        "palatini_action": s_frame,
        "metric_action": s_metric,
    }
    checks = [
        Check.from_residual(
            "gravity/sphere-curvature", errs[-1], config.tolerance("sphere-curvature", 0.01)
        ),
        Check.from_residual(
            "gravity/palatini-vs-metric",
            abs(s_frame / s_metric - 1.0),
            config.tolerance("palatini-vs-metric", 0.03),
        ),
    ]
    return _finish(config, "gravity", results, checks, started)


def minimize_task(config: RunConfig) -> RunResult:
    started = time.perf_counter()
    rng = np.random.default_rng(config.seed)
    opt = config.optimizer
    lie = su_basis(config.n)
    if config.kind == "matrix-model":
        problem = optimize.MatrixModelProblem(lie)
        x0 = 0.1 * rng.standard_normal(int(np.prod(problem.shape)))
    elif config.kind == "lattice-ymh":
        lat = lymh.LatticeSpec(config.grid, config.spacing)
        problem = optimize.LatticeYMHProblem(lat, lie, config.mu)
        x0 = np.zeros(problem.shape)
        for k in range(lie.dim):
            x0[..., lat.d + k, k] = 1.0
        x0 = x0.reshape(-1) + 0.05 * rng.standard_normal(int(np.prod(problem.shape)))
    else:
        lat = lymh.LatticeSpec(config.grid, config.spacing)
        metric = alg.MetricTriple(lat, lie, np.eye(lie.dim))
        problem = optimize.AlgebroidProblem(lat, lie, metric)
        size = problem.n_omega + int(np.prod(lat.extents)) * lie.dim ** 2
        base = np.concatenate(
            [
                np.zeros(problem.n_omega),
                np.broadcast_to(
                    -np.eye(lie.dim).reshape(-1), (int(np.prod(lat.extents)), lie.dim ** 2)
                ).reshape(-1),
            ]
        )
        x0 = base + 0.05 * rng.standard_normal(size)
    res = optimize.minimize(
        problem,
        x0,
        step=float(opt.get("step", 0.4)),
        max_iter=int(opt.get("max_iter", 2000)),
        grad_tol=float(opt.get("grad_tol", 1e-8)),
        use_analytic=opt.get("gradient", "analytic") == "analytic",
        action_tol=opt.get("action_tol", 1e-7),
    )
    monotone = all(b <= a + 1e-15 for a, b in zip(res.trace, res.trace[1:]))
    results = {
        "kind": config.kind,
        "final_action": res.value,
        "gradient_norm": res.gradient_norm,
        "iterations": res.iterations,
        "converged": res.converged,
        "trace": [float(v) for v in res.trace],
    }
    if config.kind == "lattice-ymh":
        _, b_final = problem.fields(res.x)
        results["classification"] = classify_vacuum(b_final, tolerance=1e-2)
    checks = [
        Check.from_bool("minimize/monotone-trace", monotone),
        Check.from_residual(
            "minimize/final-action", res.value, config.tolerance("final-action", 1e-6)
        ),
    ]
    return _finish(config, "minimize", results, checks, started)


TASKS = {
    "verify": verify_task,
    "matrix-model": matrix_model_task,
    "lattice": lattice_task,
    "algebroid": algebroid_task,
    "spectral": spectral_task,
    "gravity": gravity_task,
    "minimize": minimize_task,
}


def run_task(config: RunConfig) -> RunResult:
    return TASKS[config.task](config)

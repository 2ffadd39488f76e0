"""Finite-statistics data acquisition for the correlator pipeline.

Each measurement setting fixes a Pauli eigenbasis per qubit; a run draws a
multinomial sample of outcome bitstrings, correlators are estimated from
outcome parities with binomial one-sigma errors, and mutual-information
error bars come from bootstrap resampling of the counts.

Sampling streams are derived from (seed, setting), not from list position,
so results are independent of setting order and of any parallel scheduling.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .darwinism import MICurve, MIPoint
from .estimator import (
    CorrelatorTable,
    StarParameters,
    diamond_mutual_information,
    plan_measurements,
    star_mutual_information,
    star_parameters,
    _xlogx,
)
from .qcore import (
    Gate,
    PauliString,
    StateVector,
    apply_gate,
    as_pauli,
    project_to_physical,  # noqa: F401  (this module owns the public surface)
)

_SEED_MASK = (1 << 64) - 1
_SAMPLE_STREAM = 0x5E77
_BOOTSTRAP_STREAM = 0xB007

_Y_ROTATION = np.array([[1, -1j], [1, 1j]], dtype=complex) / math.sqrt(2)


@dataclass(frozen=True)
class RunConfig:
    """Acquisition parameters.

    The default 4500 shots per setting corresponds to roughly nine seconds of
    coincidences at a 500/s rate.  With poisson_shots=True the total per
    setting is itself Poisson-distributed with that mean.
    """

    shots_per_setting: int = 4500
    seed: int = 0
    bootstrap_resamples: int = 500
    poisson_shots: bool = False

    def __post_init__(self) -> None:
        if self.shots_per_setting < 1:
            raise ValueError("shots_per_setting must be positive")
        if self.bootstrap_resamples < 1:
            raise ValueError("bootstrap_resamples must be positive")


@dataclass(frozen=True)
class OutcomeCounts:
    """Observed outcome histogram for one full-weight measurement setting."""

    setting: PauliString
    shots: int
    counts: dict

    def __post_init__(self) -> None:
        setting = as_pauli(self.setting)
        if setting.weight != len(setting):
            raise ValueError(f"setting {setting} contains identity symbols")
        n = len(setting)
        total = 0
        for key, count in self.counts.items():
            if len(key) != n or set(key) - {"0", "1"}:
                raise ValueError(f"outcome key {key!r} is not a {n}-bit string")
            if int(count) < 0:
                raise ValueError(f"negative count for outcome {key!r}")
            total += int(count)
        if total != self.shots:
            raise ValueError(f"counts sum to {total}, expected shots = {self.shots}")
        object.__setattr__(self, "setting", setting)
        object.__setattr__(self, "counts", dict(self.counts))

    def count_vector(self) -> np.ndarray:
        n = len(self.setting)
        vec = np.zeros(2**n, dtype=float)
        for key, count in self.counts.items():
            vec[int(key, 2)] = count
        return vec

    def to_json_dict(self) -> dict:
        return {"setting": str(self.setting), "shots": self.shots, "counts": dict(self.counts)}

    @classmethod
    def from_json_dict(cls, data: dict) -> "OutcomeCounts":
        return cls(
            setting=PauliString(data["setting"]),
            shots=int(data["shots"]),
            counts={k: int(v) for k, v in data["counts"].items()},
        )

    @classmethod
    def from_vector(cls, setting: PauliString, vector: np.ndarray) -> "OutcomeCounts":
        n = len(setting)
        counts = {
            format(idx, f"0{n}b"): int(c) for idx, c in enumerate(vector) if c > 0
        }
        return cls(setting=setting, shots=int(vector.sum()), counts=counts)


def counts_to_json(data) -> str:
    return json.dumps([oc.to_json_dict() for oc in data], indent=2) + "\n"


def counts_from_json(text: str) -> list[OutcomeCounts]:
    return [OutcomeCounts.from_json_dict(item) for item in json.loads(text)]


def _setting_code(setting: PauliString) -> int:
    code = 0
    for letter in setting.labels:
        code = code * 4 + "IXYZ".index(letter)
    return code


def _setting_rng(seed: int, setting: PauliString) -> np.random.Generator:
    entropy = [seed & _SEED_MASK, _SAMPLE_STREAM, _setting_code(setting)]
    return np.random.default_rng(np.random.SeedSequence(entropy))


def _measurement_probabilities(state, setting: PauliString) -> np.ndarray:
    """Born probabilities of the 2^n outcomes, each qubit read in the
    eigenbasis of its Pauli letter (bit 0 <-> eigenvalue +1)."""
    if isinstance(state, StateVector):
        for qubit, letter in enumerate(setting.labels, start=1):
            if letter == "X":
                state = apply_gate(state, Gate.hadamard(qubit))
            elif letter == "Y":
                state = apply_gate(state, Gate.single_qubit(_Y_ROTATION, qubit))
        probs = state.probabilities()
    else:
        unitary = np.array([[1.0 + 0j]])
        for letter in setting.labels:
            if letter == "X":
                block = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
            elif letter == "Y":
                block = _Y_ROTATION
            else:
                block = np.eye(2, dtype=complex)
            unitary = np.kron(unitary, block)
        probs = np.real(np.diag(unitary @ state.entries @ unitary.conj().T))
    probs = np.clip(probs, 0.0, None)
    return probs / probs.sum()


def sample_setting(state, setting, cfg: RunConfig) -> OutcomeCounts:
    """Multinomial sample of outcome bitstrings for one setting.

    Deterministic given cfg.seed; the stream is keyed by the setting itself.
    """
    setting = as_pauli(setting)
    if setting.weight != len(setting):
        raise ValueError(
            f"setting {setting} contains identity symbols; marginalize a "
            "full-weight setting instead"
        )
    if len(setting) != state.n_qubits:
        raise ValueError(f"setting length {len(setting)} != {state.n_qubits} qubits")
    rng = _setting_rng(cfg.seed, setting)
    probs = _measurement_probabilities(state, setting)
    shots = cfg.shots_per_setting
    if cfg.poisson_shots:
        shots = max(int(rng.poisson(cfg.shots_per_setting)), 1)
    vector = rng.multinomial(shots, probs)
    return OutcomeCounts.from_vector(setting, vector)


@lru_cache(maxsize=1024)
def _parity_vector(n: int, positions: tuple[int, ...]) -> np.ndarray:
    """Outcome parity (+-1) of the marked bit positions, over all 2^n outcomes."""
    indices = np.arange(2**n)
    parity = np.ones(2**n, dtype=float)
    for pos in positions:
        parity *= 1.0 - 2.0 * ((indices >> (n - 1 - pos)) & 1)
    parity.flags.writeable = False
    return parity


def _covers(setting: str, wanted: str) -> bool:
    return all(w == "I" or w == s for w, s in zip(wanted, setting))


@lru_cache(maxsize=64)
def _coverage_map(
    setting_labels: tuple[str, ...], wanted_labels: tuple[str, ...]
) -> tuple[tuple[str, tuple[int, ...], tuple[int, ...]], ...]:
    """For each wanted string: its non-identity positions and the indices of
    the settings it can be marginalized from."""
    n = len(wanted_labels[0])
    rows = []
    for w in wanted_labels:
        if len(w) != n:
            raise ValueError("all wanted strings must have equal length")
        positions = tuple(i for i, c in enumerate(w) if c != "I")
        covers = tuple(
            i for i, s in enumerate(setting_labels) if len(s) == len(w) and _covers(s, w)
        )
        if not covers:
            raise ValueError(f"no setting in the data covers {w}")
        rows.append((w, positions, covers))
    return tuple(rows)


def _estimate_entries(
    setting_labels: tuple[str, ...],
    vectors: list[np.ndarray],
    shots: list[int],
    wanted_labels: tuple[str, ...],
) -> dict:
    entries: dict[PauliString, tuple[float, float]] = {}
    for label, positions, covers in _coverage_map(setting_labels, wanted_labels):
        n = len(label)
        estimates = []
        for idx in covers:
            parity = _parity_vector(n, positions)
            value = float(parity @ vectors[idx]) / shots[idx]
            sigma = math.sqrt(max(1.0 - value**2, 0.0) / shots[idx])
            estimates.append((value, sigma))
        exact = [v for v, s in estimates if s == 0.0]
        if exact:
            entries[PauliString(label)] = (float(np.mean(exact)), 0.0)
        else:
            weights = np.array([1.0 / s**2 for _, s in estimates])
            values = np.array([v for v, _ in estimates])
            entries[PauliString(label)] = (
                float(np.sum(weights * values) / np.sum(weights)),
                float(1.0 / math.sqrt(np.sum(weights))),
            )
    return entries


def estimate_correlators(data, wanted) -> CorrelatorTable:
    """Estimate correlators from outcome histograms.

    A correlator is read from every covering setting as the mean outcome
    parity on its non-identity positions, with sigma = sqrt((1 - c^2)/N);
    several covering settings combine by inverse-variance weighting.
    """
    data = list(data)
    setting_labels = tuple(oc.setting.labels for oc in data)
    vectors = [oc.count_vector() for oc in data]
    shots = [oc.shots for oc in data]
    wanted_labels = tuple(as_pauli(w).labels for w in wanted)
    return CorrelatorTable(_estimate_entries(setting_labels, vectors, shots, wanted_labels))


def clip_to_two_branch_model(params: StarParameters) -> StarParameters:
    """Project sampled (P, C) onto the physical two-branch set.

    The ideal star state sits on the positivity boundary, so finite-sample
    estimates land outside it about half the time; clamping P to [0, 1] and
    |C| to sqrt(P(1-P)) is the model-space analogue of project_to_physical
    and leaves the fragment-size-1/2 values untouched.
    """
    p = min(max(params.p, 0.0), 1.0)
    c = params.c
    c_max = math.sqrt(max(p * (1.0 - p), 0.0))
    if abs(c) > c_max:
        c = 0.0 if c_max == 0.0 else c * (c_max / abs(c))
    if p == params.p and c == params.c:
        return params
    return replace(params, p=p, c=c)


def _closed_form_points(table: CorrelatorTable):
    params = clip_to_two_branch_model(star_parameters(table))
    values = [star_mutual_information(params, d) for d in (1, 2, 3)]
    system_entropy = -_xlogx(params.p) - _xlogx(1.0 - params.p)
    return values, system_entropy


def _pipeline_curve(table: CorrelatorTable, system: int, pipeline: str) -> MICurve:
    if pipeline == "closed_form":
        values, h_s = _closed_form_points(table)
        points = tuple(
            MIPoint(
                delta=d,
                mean_mi=v,
                min_mi=v,
                max_mi=v,
                n_fragments=math.comb(3, d),
            )
            for d, v in zip((1, 2, 3), values)
        )
        return MICurve(points=points, system_entropy=h_s, n_env=3)
    if pipeline == "reconstruction":
        return diamond_mutual_information(table, system)
    raise ValueError(f"unknown pipeline {pipeline!r}")


def mi_curve_from_counts(
    data,
    system: int,
    pipeline: str,
    *,
    bootstrap_resamples: int = 500,
    seed: int = 0,
) -> MICurve:
    """Run the estimation pipeline on stored outcome histograms.

    The data must cover the pipeline's correlators (17 settings for
    closed_form, the 81 tomography settings for reconstruction).  Point
    standard errors are bootstrap standard deviations over multinomially
    resampled counts, seeded for reproducibility.
    """
    if pipeline not in ("closed_form", "reconstruction"):
        raise ValueError(f"unknown pipeline {pipeline!r}")
    data = list(data)
    plan = plan_measurements("star" if pipeline == "closed_form" else "full_tomography")
    if pipeline == "closed_form":
        wanted = list(plan.correlators)
    else:
        wanted = [PauliString("IIII")] + list(plan.correlators)
    table = estimate_correlators(data, wanted)
    curve = _pipeline_curve(table, system, pipeline)

    setting_labels = tuple(oc.setting.labels for oc in data)
    vectors = [oc.count_vector() for oc in data]
    shots = [oc.shots for oc in data]
    probabilities = [vec / vec.sum() for vec in vectors]
    wanted_labels = tuple(w.labels for w in wanted)
    boot_rng = np.random.default_rng(
        np.random.SeedSequence([seed & _SEED_MASK, _BOOTSTRAP_STREAM])
    )
    replicas: list[list[float]] = []
    for _ in range(bootstrap_resamples):
        resampled = [
            boot_rng.multinomial(n, p).astype(float) for n, p in zip(shots, probabilities)
        ]
        entries = _estimate_entries(setting_labels, resampled, shots, wanted_labels)
        replica_curve = _pipeline_curve(CorrelatorTable(entries), system, pipeline)
        replicas.append(replica_curve.mean_values())
    spread = np.std(np.array(replicas), axis=0, ddof=1)
    points = tuple(
        replace(point, stderr=float(err)) for point, err in zip(curve.points, spread)
    )
    return MICurve(points=points, system_entropy=curve.system_entropy, n_env=curve.n_env)


def estimate_mi_curve(state, system: int, cfg: RunConfig, pipeline: str) -> MICurve:
    """Full simulated pipeline: plan, sample, estimate, analyze, bootstrap.

    closed_form runs the star (P, C) extraction from 17 settings;
    reconstruction runs linear inversion plus physical projection from the 81
    tomography settings.
    """
    if state.n_qubits != 4:
        raise ValueError("the estimation pipeline is defined for 4-qubit states")
    if pipeline not in ("closed_form", "reconstruction"):
        raise ValueError(f"unknown pipeline {pipeline!r}")
    plan = plan_measurements("star" if pipeline == "closed_form" else "full_tomography")
    data = [sample_setting(state, s, cfg) for s in plan.settings]
    return mi_curve_from_counts(
        data,
        system,
        pipeline,
        bootstrap_resamples=cfg.bootstrap_resamples,
        seed=cfg.seed,
    )

"""Problem instances, the hard-instance generator, and the stochastic
environment that answers scaled arm pulls with noisy reward and safety signals.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class Instance:
    """Ground truth of a simulation.

    arms: (K, d) directions; theta_star: reward parameter; mu_star: safety
    parameter; eta0 < 0: safety threshold; gamma_lb: a scale known safe for
    every arm. arm_norm_bound (L) and theta_norm_bound (D) are the bounds the
    algorithms are told; mu_norm_bound plays D's role for the safety channel.
    """

    arms: np.ndarray
    theta_star: np.ndarray
    mu_star: np.ndarray
    eta0: float
    gamma_lb: float
    arm_norm_bound: float = 0.0
    theta_norm_bound: float = 0.0
    mu_norm_bound: float = 0.0

    def __post_init__(self):
        arms = np.atleast_2d(np.asarray(self.arms, dtype=float))
        object.__setattr__(self, "arms", arms)
        object.__setattr__(self, "theta_star", np.asarray(self.theta_star, dtype=float))
        object.__setattr__(self, "mu_star", np.asarray(self.mu_star, dtype=float))
        if self.n_arms < 2:
            raise ValueError("an instance needs at least two arms")
        if arms.shape[1] != self.theta_star.shape[0] or arms.shape[1] != self.mu_star.shape[0]:
            raise ValueError("arm/parameter dimensions disagree")
        if self.eta0 >= 0:
            raise ValueError(f"safety threshold must be negative, got {self.eta0}")
        if not (0.0 < self.gamma_lb <= 1.0):
            raise ValueError(f"gamma_lb must lie in (0, 1], got {self.gamma_lb}")
        norms = np.linalg.norm(arms, axis=1)
        if self.arm_norm_bound <= 0.0:
            object.__setattr__(self, "arm_norm_bound", float(norms.max()))
        if self.theta_norm_bound <= 0.0:
            object.__setattr__(self, "theta_norm_bound", float(np.linalg.norm(self.theta_star)))
        if self.mu_norm_bound <= 0.0:
            object.__setattr__(self, "mu_norm_bound", float(np.linalg.norm(self.mu_star)) or 1.0)
        if norms.max() > self.arm_norm_bound * (1 + 1e-12):
            raise ValueError("arm_norm_bound does not bound the arm norms")
        if np.linalg.norm(self.theta_star) > self.theta_norm_bound * (1 + 1e-12):
            raise ValueError("theta_norm_bound does not bound ||theta_star||")
        safety = self.gamma_lb * (arms @ self.mu_star)
        if (safety < self.eta0 - 1e-12).any():
            raise ValueError("gamma_lb is not actually safe for every arm")

    @property
    def n_arms(self) -> int:
        return self.arms.shape[0]

    @property
    def dim(self) -> int:
        return self.arms.shape[1]


@dataclass(frozen=True)
class Action:
    arm_index: int
    coefficient: float

    def __post_init__(self):
        if not (0.0 <= self.coefficient <= 1.0):
            raise ValueError(f"coefficient must lie in [0, 1], got {self.coefficient}")


@dataclass(frozen=True)
class Observation:
    reward: float
    safety: float
    violated: bool


def hard_instance(d: int, omega: float, eta0: float, gamma_lb: float) -> Instance:
    """The perturbed canonical-basis instance: e_1..e_d plus a near-copy of e_1.

    Arm d+1 is (cos w, sin w, 0, ...); the reward parameter is 2 e_1 and the
    safety parameter is -e_2, so the informative arm e_2 is the unsafe one.
    """
    if d < 2:
        raise ValueError(f"dimension must be >= 2, got {d}")
    if not (0.0 <= omega < np.pi / 2):
        raise ValueError(f"omega must lie in [0, pi/2), got {omega}")
    if eta0 >= 0:
        raise ValueError(f"eta0 must be negative, got {eta0}")
    arms = np.vstack([np.eye(d), np.zeros(d)])
    arms[d, 0] = np.cos(omega)
    arms[d, 1] = np.sin(omega)
    theta = np.zeros(d)
    theta[0] = 2.0
    mu = np.zeros(d)
    mu[1] = -1.0
    return Instance(arms, theta, mu, eta0, gamma_lb,
                    arm_norm_bound=1.0, theta_norm_bound=2.0, mu_norm_bound=1.0)


def max_safe_coefficient(x: np.ndarray, mu_star: np.ndarray, eta0: float) -> float:
    """Largest gamma in [0, 1] with gamma * x^T mu_star >= eta0."""
    s = float(np.asarray(x) @ np.asarray(mu_star))
    if s >= eta0:
        return 1.0
    return min(1.0, eta0 / s)


def best_safe_arm(instance: Instance) -> tuple[int, float, float]:
    """Exhaustive (index, coefficient, value) of the best fully-safe action.

    Ties break toward the lowest arm index.
    """
    best = (0, 0.0, -np.inf)
    for k in range(instance.n_arms):
        gamma = max_safe_coefficient(instance.arms[k], instance.mu_star, instance.eta0)
        value = gamma * float(instance.arms[k] @ instance.theta_star)
        if value > best[2]:
            best = (k, gamma, value)
    return best


@dataclass
class Environment:
    """Owns the noise stream for one replication (single-writer).

    Each step draws exactly two normals (reward then safety channel) so that
    equal seeds give bit-identical streams regardless of the noise scales.
    """

    instance: Instance
    sigma_r: float
    sigma_s: float
    seed: int
    rng: np.random.Generator = field(init=False, repr=False)

    def __post_init__(self):
        if self.sigma_r < 0 or self.sigma_s < 0:
            raise ValueError("noise scales must be nonnegative")
        self.rng = np.random.Generator(np.random.Philox(key=self.seed & ((1 << 64) - 1)))

    def step(self, action: Action) -> Observation:
        inst = self.instance
        if not (0 <= action.arm_index < inst.n_arms):
            raise ValueError(f"arm index {action.arm_index} out of range")
        x = action.coefficient * inst.arms[action.arm_index]
        noise = self.rng.standard_normal(2)
        mean_reward = float(x @ inst.theta_star)
        mean_safety = float(x @ inst.mu_star)
        return Observation(
            reward=mean_reward + self.sigma_r * noise[0],
            safety=mean_safety + self.sigma_s * noise[1],
            violated=bool(mean_safety < inst.eta0 - 1e-12),
        )

    def choose_uniform_arm(self) -> int:
        return int(self.rng.integers(self.instance.n_arms))


def env_step(env: Environment, action: Action) -> Observation:
    return env.step(action)


def environment_for_replication(instance: Instance, sigma_r: float, sigma_s: float,
                                master_seed: int, replication: int) -> Environment:
    """Philox substream keyed by master_seed XOR replication index."""
    return Environment(instance, sigma_r, sigma_s,
                       seed=(int(master_seed) ^ int(replication)))


def instance_to_json(instance: Instance, sigma_r: float, sigma_s: float) -> str:
    """Serialize to the documented JSON schema (lossless for doubles)."""
    doc = {
        "arms": [list(map(float, row)) for row in instance.arms],
        "theta_star": list(map(float, instance.theta_star)),
        "mu_star": list(map(float, instance.mu_star)),
        "eta0": instance.eta0,
        "gamma_lb": instance.gamma_lb,
        "sigma_r": sigma_r,
        "sigma_s": sigma_s,
    }
    return json.dumps(doc)


def instance_from_json(text: str) -> tuple[Instance, float, float]:
    doc = json.loads(text)
    inst = Instance(
        np.asarray(doc["arms"], dtype=float),
        np.asarray(doc["theta_star"], dtype=float),
        np.asarray(doc["mu_star"], dtype=float),
        float(doc["eta0"]),
        float(doc["gamma_lb"]),
    )
    return inst, float(doc["sigma_r"]), float(doc["sigma_s"])

"""Gaussian random-design data-generating process.

A response is linear in ``p`` jointly Gaussian explanatory variables plus an
independent Gaussian error; the design always carries an intercept column of
ones in front.  The simulation presets construct the coefficient sequence
from a seeded ARCH(1) path, rescale it to a target signal-to-noise ratio
``beta' Sigma beta / sigma_u^2``, and rescale the regressor means so that
``gamma' beta`` hits a target value.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np
from numpy.random import Generator

from .rng import substream


@dataclass(frozen=True)
class GeometricCov:
    """Covariance family Sigma[j, k] = r**|j - k|, kept implicit until needed."""

    r: float

    def materialize(self, p: int) -> np.ndarray:
        idx = np.arange(p)
        return self.r ** np.abs(idx[:, None] - idx[None, :])


def _as_cov_matrix(sigma_x, p: int) -> np.ndarray:
    if isinstance(sigma_x, GeometricCov):
        if not -1.0 < sigma_x.r < 1.0:
            raise ValueError(f"geometric covariance needs |r| < 1, got {sigma_x.r}")
        return sigma_x.materialize(p)
    mat = np.asarray(sigma_x, dtype=float)
    if mat.shape != (p, p):
        raise ValueError(f"covariance must be {p}x{p}, got shape {mat.shape}")
    return mat


@dataclass(frozen=True)
class DgpSpec:
    """Parameters of the data-generating process.

    Parameters
    ----------
    p : int
        Number of non-intercept regressors (finite, >= 1).
    beta0 : float
        Intercept coefficient.
    beta : array of shape (p,)
        Coefficients of the non-intercept regressors.
    gamma : array of shape (p,)
        Means of the non-intercept regressors.
    sigma_x : (p, p) array or GeometricCov
        Covariance of the non-intercept regressors; must be symmetric
        positive definite.
    sigma_u : float
        Error standard deviation, > 0.
    """

    p: int
    beta0: float
    beta: np.ndarray
    gamma: np.ndarray
    sigma_x: object
    sigma_u: float

    def cov_matrix(self) -> np.ndarray:
        return _as_cov_matrix(self.sigma_x, self.p)


@dataclass(frozen=True)
class Dgp:
    """Validated process with precomputed moments and sampling factor."""

    spec: DgpSpec
    sigma: np.ndarray        # dense p x p covariance
    chol: np.ndarray         # lower Cholesky factor of sigma
    cov_xy: np.ndarray       # Cov(x, y) = sigma @ beta
    var_y: float             # beta' sigma beta + sigma_u^2
    mean_y: float            # beta0 + gamma' beta

    @property
    def p(self) -> int:
        return self.spec.p

    @property
    def sigma_u(self) -> float:
        return self.spec.sigma_u


@dataclass(frozen=True)
class TrainingSample:
    """Design matrix with leading intercept column and the responses."""

    X: np.ndarray  # n x (p + 1), first column all ones
    Y: np.ndarray  # n

    def __post_init__(self):
        if self.X.ndim != 2 or self.Y.shape != (self.X.shape[0],):
            raise ValueError(
                f"design {self.X.shape} and response {self.Y.shape} do not line up"
            )
        if self.X.shape[0] < 3:
            raise ValueError(f"need at least 3 observations, got {self.X.shape[0]}")
        if not np.all(self.X[:, 0] == 1.0):
            raise ValueError("the first design column must be the intercept (all ones)")

    @property
    def n(self) -> int:
        return self.X.shape[0]


@dataclass(frozen=True)
class FutureDraw:
    x_f: np.ndarray  # p + 1, first entry 1
    y_f: float


@dataclass(frozen=True)
class FutureSample:
    """Batch of independent future draws; indexable as FutureDraw records."""

    x: np.ndarray  # count x (p + 1)
    y: np.ndarray  # count

    def __len__(self) -> int:
        return self.x.shape[0]

    def __getitem__(self, i: int) -> FutureDraw:
        return FutureDraw(self.x[i], float(self.y[i]))


def build_dgp(spec: DgpSpec) -> Dgp:
    """Validate a spec and precompute the derived moments.

    Rejects a non-symmetric or non-positive-definite covariance and a
    non-positive error standard deviation.
    """
    if spec.p < 1:
        raise ValueError(f"need at least one non-intercept regressor, got p={spec.p}")
    if spec.sigma_u <= 0.0:
        raise ValueError(f"error standard deviation must be > 0, got {spec.sigma_u}")
    beta = np.asarray(spec.beta, dtype=float)
    gamma = np.asarray(spec.gamma, dtype=float)
    if beta.shape != (spec.p,) or gamma.shape != (spec.p,):
        raise ValueError(
            f"beta and gamma must have shape ({spec.p},), got {beta.shape} and {gamma.shape}"
        )
    sigma = spec.cov_matrix()
    if not np.allclose(sigma, sigma.T, rtol=0.0, atol=1e-12):
        raise ValueError("covariance matrix is not symmetric")
    try:
        chol = np.linalg.cholesky(sigma)
    except np.linalg.LinAlgError as exc:
        raise ValueError("covariance matrix is not positive definite") from exc
    cov_xy = sigma @ beta
    var_y = float(beta @ cov_xy + spec.sigma_u**2)
    mean_y = float(spec.beta0 + gamma @ beta)
    for arr in (beta, gamma, sigma, chol, cov_xy):
        arr.setflags(write=False)
    clean = DgpSpec(spec.p, float(spec.beta0), beta, gamma, spec.sigma_x, float(spec.sigma_u))
    return Dgp(clean, sigma, chol, cov_xy, var_y, mean_y)


def _as_generator(seed) -> Generator:
    if isinstance(seed, Generator):
        return seed
    return substream(seed)


def _draw_rows(dgp: Dgp, count: int, rng: Generator) -> tuple[np.ndarray, np.ndarray]:
    spec = dgp.spec
    z = rng.standard_normal((count, spec.p))
    x = spec.gamma + z @ dgp.chol.T
    u = dgp.sigma_u * rng.standard_normal(count)
    y = spec.beta0 + x @ spec.beta + u
    return np.hstack([np.ones((count, 1)), x]), y


def sample_training(dgp: Dgp, n: int, seed) -> TrainingSample:
    """Draw an i.i.d. training sample of size n >= 3.

    ``seed`` is either a 64-bit integer (opens the default stream for that
    seed) or an explicit numpy Generator for substream control.
    """
    if n < 3:
        raise ValueError(f"sample size must be >= 3, got {n}")
    X, Y = _draw_rows(dgp, n, _as_generator(seed))
    return TrainingSample(X, Y)


def sample_future(dgp: Dgp, count: int, seed) -> FutureSample:
    """Draw ``count`` future copies, independent of any training stream."""
    if count < 0:
        raise ValueError(f"count must be >= 0, got {count}")
    if count == 0:
        return FutureSample(np.empty((0, dgp.p + 1)), np.empty(0))
    x, y = _draw_rows(dgp, count, _as_generator(seed))
    return FutureSample(x, y)


@dataclass(frozen=True)
class ArchParams:
    """ARCH(1) recursion b_j = s_j z_j with s_j^2 = omega + alpha * b_{j-1}^2."""

    omega: float
    alpha: float

    def validate(self) -> None:
        if self.omega <= 0.0:
            raise ValueError(f"omega must be > 0, got {self.omega}")
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1) for stationarity, got {self.alpha}")


# Presets reproducing the qualitative sparse / nonsparse coefficient shapes:
# high persistence concentrates mass in a few bursts, moderate persistence
# keeps every coefficient non-negligible.
ARCH_SPARSE = ArchParams(omega=0.01, alpha=0.97)
ARCH_NONSPARSE = ArchParams(omega=0.5, alpha=0.5)


def generate_beta_arch(length: int, seed, arch_params: ArchParams) -> np.ndarray:
    """Seeded ARCH(1) coefficient path of the given length."""
    if length < 1:
        raise ValueError(f"length must be >= 1, got {length}")
    arch_params.validate()
    rng = _as_generator(seed)
    z = rng.standard_normal(length)
    beta = np.empty(length)
    var = arch_params.omega / (1.0 - arch_params.alpha)  # stationary variance
    beta[0] = np.sqrt(var) * z[0]
    for j in range(1, length):
        beta[j] = np.sqrt(arch_params.omega + arch_params.alpha * beta[j - 1] ** 2) * z[j]
    return beta


def scale_to_snr(beta: np.ndarray, sigma_x, sigma_u: float, target_snr: float) -> np.ndarray:
    """Rescale beta so that beta' Sigma beta / sigma_u^2 equals target_snr."""
    beta = np.asarray(beta, dtype=float)
    if target_snr <= 0.0:
        raise ValueError(f"target snr must be > 0, got {target_snr}")
    sigma = _as_cov_matrix(sigma_x, beta.size)
    quad = float(beta @ sigma @ beta)
    if quad <= 0.0:
        raise ValueError("cannot scale an all-zero coefficient vector to a positive snr")
    return beta * np.sqrt(target_snr * sigma_u**2 / quad)


def scale_means(gamma: np.ndarray, beta: np.ndarray, target: float) -> np.ndarray:
    """Rescale gamma so that gamma' beta equals target (applied after beta is final)."""
    gamma = np.asarray(gamma, dtype=float)
    beta = np.asarray(beta, dtype=float)
    inner = float(gamma @ beta)
    if inner == 0.0:
        raise ValueError("gamma' beta = 0: means cannot be rescaled to a nonzero target")
    if target == 0.0 and inner != 0.0:
        raise ValueError("target 0 is unreachable by rescaling when gamma' beta != 0")
    return gamma * (target / inner)


def spec_to_json(spec: DgpSpec) -> str:
    """Serialize a DgpSpec to the JSON layout documented in the README."""
    if isinstance(spec.sigma_x, GeometricCov):
        cov = {"family": "geometric", "r": spec.sigma_x.r}
    else:
        mat = spec.cov_matrix()
        cov = {"dense_lower": [list(map(float, mat[i, : i + 1])) for i in range(spec.p)]}
    payload = {
        "p": spec.p,
        "beta0": spec.beta0,
        "beta": list(map(float, np.asarray(spec.beta))),
        "gamma": list(map(float, np.asarray(spec.gamma))),
        "sigma_x": cov,
        "sigma_u": spec.sigma_u,
    }
    return json.dumps(payload, indent=2, sort_keys=True)


def spec_from_json(text: str) -> DgpSpec:
    payload = json.loads(text)
    try:
        p = int(payload["p"])
        cov_raw = payload["sigma_x"]
        if "family" in cov_raw:
            if cov_raw["family"] != "geometric":
                raise ValueError(f"unknown covariance family {cov_raw['family']!r}")
            sigma_x = GeometricCov(float(cov_raw["r"]))
        else:
            rows = cov_raw["dense_lower"]
            if len(rows) != p:
                raise ValueError(f"dense_lower must have {p} rows, got {len(rows)}")
            mat = np.zeros((p, p))
            for i, row in enumerate(rows):
                if len(row) != i + 1:
                    raise ValueError(f"dense_lower row {i} must have {i + 1} entries")
                mat[i, : i + 1] = row
                mat[: i + 1, i] = row
            sigma_x = mat
        return DgpSpec(
            p=p,
            beta0=float(payload["beta0"]),
            beta=np.asarray(payload["beta"], dtype=float),
            gamma=np.asarray(payload["gamma"], dtype=float),
            sigma_x=sigma_x,
            sigma_u=float(payload["sigma_u"]),
        )
    except KeyError as exc:
        raise ValueError(f"dgp spec is missing required field {exc.args[0]!r}") from exc

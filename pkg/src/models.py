"""Data models for the sparsification toolkit."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .errors import InvalidInputError


def as_matrix(a, name: str = "matrix") -> np.ndarray:
    """Return ``a`` as a finite 2-D float64 or complex128 array."""
    arr = np.asarray(a)
    if arr.ndim != 2 or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if np.iscomplexobj(arr):
        arr = arr.astype(np.complex128, copy=False)
    else:
        arr = arr.astype(np.float64, copy=False)
    if not np.all(np.isfinite(arr)):
        raise InvalidInputError(f"{name} contains NaN or Inf entries")
    return arr


class Pattern(BaseModel):
    """Boolean sparsity mask; True marks a free entry, False a forced zero."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    mask: np.ndarray = Field(..., description="rows x cols boolean mask")

    @field_validator("mask", mode="before")
    @classmethod
    def _coerce_mask(cls, value):
        mask = np.asarray(value)
        if mask.ndim != 2 or mask.shape[0] < 1 or mask.shape[1] < 1:
            raise ValueError(f"pattern mask must be a non-empty 2-D array, got shape {mask.shape}")
        if mask.dtype != np.bool_:
            if not np.all((mask == 0) | (mask == 1)):
                raise ValueError("pattern entries must be 0 or 1")
            mask = mask.astype(bool)
        return mask

    @property
    def rows(self) -> int:
        return int(self.mask.shape[0])

    @property
    def cols(self) -> int:
        return int(self.mask.shape[1])

    @property
    def shape(self) -> Tuple[int, int]:
        return self.rows, self.cols

    @property
    def nnz(self) -> int:
        return int(np.count_nonzero(self.mask))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Pattern):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.mask, other.mask))

    __hash__ = None  # type: ignore[assignment]


class LpParams(BaseModel):
    """Parameters of the Lp-norm pattern selection."""

    p: float = Field(default=1.0, ge=0, description="Lp exponent in [0, inf]")
    q: float = Field(default=0.8, ge=0, le=1, description="Retention parameter in [0, 1]")
    n_row: int = Field(default=0, ge=0, description="Minimum ones per row")
    n_col: int = Field(default=0, ge=0, description="Minimum ones per column")


class SpectralData(BaseModel):
    """Rank-revealing SVD partition of a matrix."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    u1: np.ndarray = Field(..., description="m x r left singular vectors of the range")
    u2: np.ndarray = Field(..., description="m x p_L basis of the left null-space")
    v1: np.ndarray = Field(..., description="n x r right singular vectors of the co-range")
    v2: np.ndarray = Field(..., description="n x p_R basis of the right null-space")
    sigma: np.ndarray = Field(..., description="r positive singular values, non-increasing")
    rank: int = Field(..., ge=0)
    rank_tol: float = Field(..., ge=0)
    kappa: Optional[float] = Field(default=None, description="sigma[0] / sigma[r-1]; None when r = 0")

    @property
    def m(self) -> int:
        return int(self.u1.shape[0])

    @property
    def n(self) -> int:
        return int(self.v1.shape[0])

    @property
    def p_r(self) -> int:
        return int(self.v2.shape[1])

    @property
    def p_l(self) -> int:
        return int(self.u2.shape[1])


class SparsifyParams(BaseModel):
    """Parameters of the full sparsification pipeline."""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    p: float = Field(default=1.0, ge=0, description="Lp exponent in [0, inf]")
    q: float = Field(default=0.8, ge=0, le=1, description="Retention parameter in [0, 1]")
    rank_tol: Optional[float] = Field(default=None, ge=0, description="Relative rank tolerance")
    n_row_override: Optional[int] = Field(default=None, ge=0)
    n_col_override: Optional[int] = Field(default=None, ge=0)
    pattern_override: Optional[Pattern] = Field(default=None, description="Imposed sparsity pattern")
    symmetric_pattern: bool = Field(default=False, description="Use the row-only pattern shortcut")
    recover_multipliers: bool = Field(default=False, description="Attach Lagrange multipliers")


class KktSystem(BaseModel):
    """First-order system restricted to the free entries of a pattern."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    free_rows: np.ndarray = Field(..., description="Row index of each free entry (row-major order)")
    free_cols: np.ndarray = Field(..., description="Column index of each free entry")
    hessian: np.ndarray = Field(..., description="nnz x nnz Hermitian restriction of the Kronecker sum")
    rhs: np.ndarray = Field(..., description="2 (A^+)^H sampled at the free entries")
    constraints: np.ndarray = Field(..., description="c x nnz null-space constraint rows")

    @property
    def free_index_map(self) -> List[Tuple[int, int]]:
        return list(zip(self.free_rows.tolist(), self.free_cols.tolist()))

    @property
    def size(self) -> int:
        return int(self.free_rows.shape[0])


class Multipliers(BaseModel):
    """Lagrange multipliers of the constrained problem."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    lambda_r: np.ndarray = Field(..., description="m x p_R right null-space multipliers")
    lambda_l: np.ndarray = Field(..., description="n x p_L left null-space multipliers")
    lambda_z: np.ndarray = Field(..., description="m x n pattern multipliers, zero on free entries")


class SparsifyOutcome(BaseModel):
    """Result of a sparsification."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    x: np.ndarray = Field(..., description="Sparse minimizer")
    pattern: Pattern
    j_min: float = Field(..., ge=0)
    grad_residual: float = Field(..., ge=0)
    nullspace_residual: float = Field(..., ge=0)
    spectral: SpectralData
    multipliers: Optional[Multipliers] = None


class Report(BaseModel):
    """Quality report of one sparsification; serializes to flat JSON."""

    model_config = ConfigDict(ser_json_inf_nan="strings")

    m: int
    n: int
    p: float
    q: float
    rank: int
    kappa_a: Optional[float] = None
    nnz_a: int
    nnz_x: int
    density_x: float = Field(..., ge=0, le=1)
    j_min: float
    grad_residual: float
    nullspace_residual: float
    cond_x: Optional[float] = None
    cond_pinva_x: Optional[float] = None
    cond_x_pinva: Optional[float] = None
    cluster_radius: float
    max_eig_distance: float
    cluster_ok: bool
    cond_bound: Optional[float] = None
    cond_bound_ok: Optional[bool] = None
    apriori_lhs: Optional[float] = None
    apriori_rhs: Optional[float] = None
    apriori_bound_ok: Optional[bool] = None
    apriori_margin: Optional[float] = None
    misfit_bound: Optional[float] = None
    misfit_bound_ok: Optional[bool] = None
    misfit_margin: Optional[float] = None
    rel_inv_diff: Optional[float] = None
    subspace_residuals: Dict[str, Optional[float]] = Field(default_factory=dict)


EVEN_KINDS = ("hamiltonian", "skew_hamiltonian", "symplectic")

TABLE_KINDS = (
    "centrosymmetric",
    "skew_centrosymmetric",
    "circulant",
    "skew_circulant",
    "complex_symmetric",
    "skew_complex_symmetric",
    "hamiltonian",
    "skew_hamiltonian",
    "hermitian",
    "skew_hermitian",
    "persymmetric",
    "skew_persymmetric",
    "symmetric",
    "skew_symmetric",
)

MatrixKind = Literal[
    "cos40",
    "exchange",
    "symplectic",
    "cyclic_plus",
    "cyclic_minus",
    "centrosymmetric",
    "skew_centrosymmetric",
    "circulant",
    "skew_circulant",
    "complex_symmetric",
    "skew_complex_symmetric",
    "hamiltonian",
    "skew_hamiltonian",
    "hermitian",
    "skew_hermitian",
    "persymmetric",
    "skew_persymmetric",
    "symmetric",
    "skew_symmetric",
]


class GenSpec(BaseModel):
    """Request for a generated test matrix."""

    kind: MatrixKind = Field(..., description="Matrix family")
    size: int = Field(..., ge=1, description="Number of rows and columns")
    seed: int = Field(default=0, ge=0, lt=2**64, description="Seed of the PCG64 generator")
    rank_deficiency: int = Field(default=0, ge=0, description="Singular values to zero out")

    @model_validator(mode="after")
    def _check_size(self) -> "GenSpec":
        if self.kind in EVEN_KINDS and self.size % 2:
            raise ValueError(f"{self.kind} requires an even size, got {self.size}")
        if self.rank_deficiency >= self.size:
            raise ValueError(
                f"rank_deficiency ({self.rank_deficiency}) must be smaller than size ({self.size})"
            )
        return self


Subcommand = Literal["pattern", "sparsify", "diagnose", "gen", "sweep"]

_REQUIRED_FLAGS: Dict[str, Tuple[str, ...]] = {
    "pattern": ("input", "output"),
    "sparsify": ("input", "output"),
    "diagnose": ("input", "report"),
    "gen": ("kind", "size", "output"),
    "sweep": ("input", "output", "p_list", "q_list"),
}


class CliInvocation(BaseModel):
    """Validated command-line request."""

    subcommand: Subcommand
    input: Optional[Path] = None
    output: Optional[Path] = None
    pattern_out: Optional[Path] = None
    report: Optional[Path] = None
    series_out: Optional[Path] = None
    correlation_out: Optional[Path] = None
    p: float = Field(default=1.0, ge=0)
    q: float = Field(default=0.8, ge=0, le=1)
    rank_tol: Optional[float] = Field(default=None, ge=0)
    n_row: Optional[int] = Field(default=None, ge=0)
    n_col: Optional[int] = Field(default=None, ge=0)
    kind: Optional[MatrixKind] = None
    size: Optional[int] = Field(default=None, ge=1)
    seed: int = Field(default=0, ge=0, lt=2**64)
    rank_deficiency: int = Field(default=0, ge=0)
    p_list: Optional[List[float]] = None
    q_list: Optional[List[float]] = None
    format: Optional[Literal["dense", "coordinate"]] = None
    workers: Optional[int] = Field(default=None, ge=1, description="Sweep threads; None uses the configured default")

    @field_validator("p", "q")
    @classmethod
    def _reject_nan(cls, value):
        if math.isnan(value):
            raise ValueError("NaN is not a valid parameter value")
        return value

    @field_validator("p_list")
    @classmethod
    def _check_p_list(cls, value):
        # NaN fails every comparison, so test for membership of the valid range
        if value is not None and not all(p >= 0 for p in value):
            raise ValueError("every p in --p-list must be a number >= 0 (inf allowed)")
        return value

    @field_validator("q_list")
    @classmethod
    def _check_q_list(cls, value):
        if value is not None and not all(0 <= q <= 1 for q in value):
            raise ValueError("every q in --q-list must lie in [0, 1]")
        return value

    @model_validator(mode="after")
    def _check_required(self) -> "CliInvocation":
        missing = [
            "--" + flag.replace("_", "-")
            for flag in _REQUIRED_FLAGS[self.subcommand]
            if getattr(self, flag) in (None, [])
        ]
        if missing:
            raise ValueError(f"{self.subcommand} requires {', '.join(missing)}")
        return self

    def sparsify_params(self) -> SparsifyParams:
        return SparsifyParams(
            p=self.p,
            q=self.q,
            rank_tol=self.rank_tol,
            n_row_override=self.n_row,
            n_col_override=self.n_col,
        )

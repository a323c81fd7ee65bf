"""Dense semidefinite programs over complex Hermitian blocks.

Problems are written in terms of real-parametrized variables (Hermitian
matrices, complex rectangular matrices and real scalars) and affine
constraints ``sum_k L_k(x_k) + C  (>=, <=, ==)  0``.  Matrix inequalities are
in the Loewner order.  Each linear map ``L_k`` receives a *stack* of basis
elements of its variable, shape ``(k, ...)``, and must return the stacked
images, so the coefficient matrix is assembled with a single vectorized
call per term.

Complex Hermitian cones are embedded as real symmetric cones of doubled
size, ``H -> [[Re H, -Im H], [Im H, Re H]]``; purely real constraints keep
their native size.  The conic program is handed to the primal-dual
interior-point method of ``cvxopt`` (Nesterov-Todd scaling with a
predictor-corrector step).
"""

from __future__ import annotations

import contextlib
import contextvars
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .matqi import MAX_DIM, DimensionError, herm

OPTIMAL = "Optimal"
INFEASIBLE = "Infeasible"
UNBOUNDED = "Unbounded"
MAXITER = "MaxIter"

DEFAULT_TOL = {"abstol": 1e-9, "reltol": 1e-9, "feastol": 1e-8, "maxiters": 200}
# progressively looser stopping rules tried when the solver stalls short of
# the requested accuracy (near-degenerate optima lose accuracy in the last
# few Newton steps)
RETRY_TOL = ({"abstol": 1e-8, "reltol": 1e-8, "feastol": 1e-8}, {"abstol": 1e-7, "reltol": 1e-7, "feastol": 1e-7})
SPARSE_FRACTION = 0.02
# iterations allowed before the first retry with looser stopping rules
FIRST_PASS_ITERS = 60
GAP_TOL = 1e-6
MAX_VARS = 12000
FEAS_TOL = 1e-7


_RECORDERS: contextvars.ContextVar = contextvars.ContextVar("sdp_recorders", default=())


@contextlib.contextmanager
def record():
    """Collect ``(problem name, solution)`` for every solve inside the block."""
    log: list = []
    token = _RECORDERS.set(_RECORDERS.get() + (log,))
    try:
        yield log
    finally:
        _RECORDERS.reset(token)


class SdpError(RuntimeError):
    """Raised when an SDP cannot be solved to the requested status."""

    def __init__(self, message, solution=None):
        super().__init__(message)
        self.solution = solution


# ---------------------------------------------------------------------------
# variables
# ---------------------------------------------------------------------------


@dataclass(eq=False)
class Var:
    name: str
    kind: str  # "herm", "complex", "scalar"
    shape: tuple
    real: bool = False
    offset: int = 0

    @property
    def size(self) -> int:
        if self.kind == "scalar":
            return 1
        if self.kind == "herm":
            d = self.shape[0]
            return d * (d + 1) // 2 if self.real else d * d
        m, n = self.shape
        return m * n if self.real else 2 * m * n

    def basis(self) -> np.ndarray:
        """Stack of basis elements; coordinates are the real parameters."""
        if self.kind == "scalar":
            return np.ones(1)
        if self.kind == "herm":
            return herm_basis(self.shape[0], self.real)
        m, n = self.shape
        k = m * n
        eye = np.eye(k).reshape(k, m, n)
        if self.real:
            return eye
        return np.concatenate([eye + 0j, 1j * eye])

    def assemble(self, x: np.ndarray):
        coords = np.asarray(x[self.offset:self.offset + self.size])
        if self.kind == "scalar":
            return float(coords[0])
        return np.tensordot(coords, self.basis(), axes=1)


def herm_basis(d: int, real: bool = False) -> np.ndarray:
    """Basis of Hermitian (or real symmetric) ``d x d`` matrices.

    Order: diagonal units, then ``E_ij + E_ji`` for ``i<j``, then
    ``i(E_ij - E_ji)`` for ``i<j`` (omitted when ``real``).
    """
    iu, ju = np.triu_indices(d, 1)
    m = len(iu)
    nb = d + m + (0 if real else m)
    b = np.zeros((nb, d, d), dtype=float if real else complex)
    b[np.arange(d), np.arange(d), np.arange(d)] = 1
    b[d + np.arange(m), iu, ju] = 1
    b[d + np.arange(m), ju, iu] = 1
    if not real:
        b[d + m + np.arange(m), iu, ju] = 1j
        b[d + m + np.arange(m), ju, iu] = -1j
    return b


def herm_coords(h: np.ndarray) -> np.ndarray:
    """Real coordinates ``(diag, Re upper, Im upper)`` of a stack of Hermitian matrices."""
    h = np.asarray(h)
    d = h.shape[-1]
    iu, ju = np.triu_indices(d, 1)
    diag = np.real(np.diagonal(h, axis1=-2, axis2=-1))
    up = h[..., iu, ju]
    return np.concatenate([diag, np.real(up), np.imag(up)], axis=-1)


def herm_from_coords_dual(y: np.ndarray, d: int) -> np.ndarray:
    """Hermitian ``Y`` with ``Re Tr(H Y) = <herm_coords(H), y>`` for all Hermitian ``H``."""
    iu, ju = np.triu_indices(d, 1)
    m = len(iu)
    out = np.zeros((d, d), dtype=complex)
    out[np.arange(d), np.arange(d)] = y[:d]
    z = (y[d:d + m] - 1j * y[d + m:d + 2 * m]) / 2
    # Re Tr(H Y) picks up 2 Re(h_ij Y_ji) for i<j
    out[ju, iu] = z
    out[iu, ju] = z.conj()
    return out


# ---------------------------------------------------------------------------
# problem
# ---------------------------------------------------------------------------


Term = tuple  # (Var, Callable[[np.ndarray], np.ndarray])


@dataclass(eq=False)
class Constraint:
    name: str
    terms: list
    sense: str  # ">=", "<=", "=="
    const: object
    kind: str  # "matrix" or "scalar"
    dim: int = 1


class SdpProblem:
    """Container for variables, constraints and a real linear objective."""

    def __init__(self, name: str = "sdp"):
        self.name = name
        self.variables: list[Var] = []
        self.constraints: list[Constraint] = []
        self.objective_terms: list = []
        self.objective_const = 0.0
        self.sense = "min"

    # -- variables --------------------------------------------------------
    def _add(self, var: Var) -> Var:
        if any(v.name == var.name for v in self.variables):
            raise ValueError(f"duplicate variable name {var.name!r}")
        var.offset = sum(v.size for v in self.variables)
        self.variables.append(var)
        return var

    def hermitian(self, name: str, dim: int, psd: bool = False, real: bool = False) -> Var:
        if dim > MAX_DIM:
            raise DimensionError(f"block dimension {dim} exceeds guard {MAX_DIM}")
        v = self._add(Var(name, "herm", (dim, dim), real))
        if psd:
            self.add_constraint(f"{name}>=0", [(v, _ident)], ">=")
        return v

    def complex_matrix(self, name: str, rows: int, cols: int, real: bool = False) -> Var:
        return self._add(Var(name, "complex", (rows, cols), real))

    def scalar(self, name: str, nonneg: bool = False) -> Var:
        v = self._add(Var(name, "scalar", ()))
        if nonneg:
            self.add_constraint(f"{name}>=0", [(v, _ident)], ">=")
        return v

    def var(self, name: str) -> Var:
        for v in self.variables:
            if v.name == name:
                return v
        raise KeyError(name)

    # -- constraints ------------------------------------------------------
    def add_constraint(self, name: str, terms: Sequence[Term], sense: str, const=None) -> Constraint:
        """Add ``sum L(x) + const  sense  0``.

        Matrix-valued maps give Loewner inequalities or Hermitian equalities,
        scalar-valued maps give ordinary (in)equalities.
        """
        if sense not in (">=", "<=", "=="):
            raise ValueError(f"unknown sense {sense!r}")
        if any(c.name == name for c in self.constraints):
            raise ValueError(f"duplicate constraint name {name!r}")
        if not terms:
            raise ValueError("constraint needs at least one term")
        probe = np.asarray(terms[0][1](terms[0][0].basis()[:1]))
        if probe.ndim == 3:
            kind, dim = "matrix", probe.shape[-1]
            if probe.shape[-2] != dim:
                raise DimensionError(f"constraint {name!r} must map to square matrices")
        elif probe.ndim == 1:
            kind, dim = "scalar", 1
        else:
            raise DimensionError(f"constraint {name!r} maps to shape {probe.shape[1:]}")
        if const is not None:
            c = np.asarray(const)
            want = (dim, dim) if kind == "matrix" else ()
            if c.shape != want:
                raise DimensionError(f"constant of {name!r} has shape {c.shape}, expected {want}")
        con = Constraint(name, list(terms), sense, const, kind, dim)
        self.constraints.append(con)
        return con

    def _objective(self, terms, const, sense):
        self.objective_terms = list(terms)
        self.objective_const = float(const)
        self.sense = sense

    def minimize(self, terms: Sequence[Term], const: float = 0.0):
        self._objective(terms, const, "min")

    def maximize(self, terms: Sequence[Term], const: float = 0.0):
        self._objective(terms, const, "max")

    # -- evaluation -------------------------------------------------------
    def evaluate(self, con: Constraint, values: dict):
        """Value of ``sum L(x) + const`` at a candidate point."""
        total = None
        for v, f in con.terms:
            x = values[v.name]
            arr = np.asarray(x)[None] if v.kind != "scalar" else np.array([float(x)])
            y = np.asarray(f(arr))[0]
            total = y if total is None else total + y
        if con.const is not None:
            total = total + np.asarray(con.const)
        if con.kind == "matrix":
            return herm(total)
        return float(np.real(total))

    def objective_value(self, values: dict) -> float:
        val = self.objective_const
        for v, f in self.objective_terms:
            x = values[v.name]
            arr = np.asarray(x)[None] if v.kind != "scalar" else np.array([float(x)])
            val += float(np.real(np.asarray(f(arr))[0]))
        return val

    @property
    def total_dim(self) -> int:
        return sum(c.dim for c in self.constraints if c.kind == "matrix")

    # -- conic form -------------------------------------------------------
    def _coeffs(self, terms, nvar):
        """Stack the images of every basis element: list of (offset, images)."""
        out = []
        for v, f in terms:
            img = np.asarray(f(v.basis()))
            out.append((v.offset, img))
        return out

    def to_conic(self) -> dict:
        """Real conic data ``min c^T x  s.t.  G x + s = h, A x = b, s in K``."""
        n = sum(v.size for v in self.variables)
        c = np.zeros(n)
        for off, img in self._coeffs(self.objective_terms, n):
            img = np.asarray(img)
            if np.iscomplexobj(img):
                if np.max(np.abs(img.imag), initial=0) > 1e-12:
                    raise ValueError("objective must be real-valued")
                img = img.real
            c[off:off + img.shape[0]] += img
        if self.sense == "max":
            c = -c
        lin_rows, lin_h = [], []
        eq_rows, eq_b = [], []
        sdp_blocks = []  # (Gblock (m*m, n), hblock, m, embedded, con)
        order = {"l": [], "s": [], "eq": []}
        for con in self.constraints:
            sign = -1.0 if con.sense == "<=" else 1.0
            imgs = self._coeffs(con.terms, n)
            if con.kind == "scalar":
                row = np.zeros(n)
                for off, img in imgs:
                    img = np.asarray(img)
                    if np.iscomplexobj(img):
                        if np.max(np.abs(img.imag), initial=0) > 1e-12:
                            raise ValueError(f"scalar constraint {con.name!r} is not real")
                        img = img.real
                    row[off:off + img.shape[0]] += img
                k = 0.0 if con.const is None else float(np.real(con.const))
                if con.sense == "==":
                    eq_rows.append(row[None])
                    eq_b.append(np.array([-k]))
                    order["eq"].append((con, 1))
                else:
                    # sign*(row x + k) >= 0  ->  -sign*row x + s = sign*k
                    lin_rows.append(-sign * row[None])
                    lin_h.append(np.array([sign * k]))
                    order["l"].append(con)
                continue
            d = con.dim
            const = np.zeros((d, d), dtype=complex) if con.const is None else np.asarray(con.const, dtype=complex)
            is_real = np.max(np.abs(const.imag), initial=0) == 0
            for _, img in imgs:
                if np.iscomplexobj(img) and np.max(np.abs(img.imag), initial=0) > 0:
                    is_real = False
            if con.sense == "==":
                rows_blk = np.zeros((d * d, n))
                for off, img in imgs:
                    rows_blk[:, off:off + img.shape[0]] += herm_coords(img).T
                eq_rows.append(rows_blk)
                eq_b.append(-herm_coords(const))
                order["eq"].append((con, d * d))
                continue
            m = d if is_real else 2 * d
            gblk = np.zeros((m * m, n))
            for off, img in imgs:
                e = _embed(img, is_real)  # (k, m, m)
                gblk[:, off:off + img.shape[0]] -= sign * e.reshape(e.shape[0], -1).T
            hblk = sign * _embed(const[None], is_real)[0].reshape(-1)
            sdp_blocks.append((gblk, hblk, m, not is_real, con))
            order["s"].append(con)
        G_parts = lin_rows + [b[0] for b in sdp_blocks]
        h_parts = lin_h + [b[1] for b in sdp_blocks]
        G = np.vstack(G_parts) if G_parts else np.zeros((0, n))
        h = np.concatenate(h_parts) if h_parts else np.zeros(0)
        A = np.vstack(eq_rows) if eq_rows else np.zeros((0, n))
        b = np.concatenate(eq_b) if eq_b else np.zeros(0)
        dims = {"l": len(lin_rows), "q": [], "s": [blk[2] for blk in sdp_blocks]}
        return {
            "c": c, "G": G, "h": h, "A": A, "b": b, "dims": dims,
            "blocks": [(blk[2], blk[3], blk[4]) for blk in sdp_blocks],
            "lin": order["l"], "eq": order["eq"],
        }

    def to_json(self) -> str:
        """Serialize the real conic data for debugging."""
        cf = self.to_conic()
        return json.dumps({
            "name": self.name,
            "sense": self.sense,
            "variables": [{"name": v.name, "kind": v.kind, "shape": list(v.shape),
                           "real": v.real, "offset": v.offset, "size": v.size} for v in self.variables],
            "constraints": [{"name": c.name, "kind": c.kind, "sense": c.sense, "dim": c.dim}
                            for c in self.constraints],
            "dims": cf["dims"],
            "c": cf["c"].tolist(), "G": cf["G"].tolist(), "h": cf["h"].tolist(),
            "A": cf["A"].tolist(), "b": cf["b"].tolist(),
        })


def _ident(x):
    return x


def _embed(stack: np.ndarray, real: bool) -> np.ndarray:
    stack = np.asarray(stack)
    if real:
        return np.real(stack)
    re, im = np.real(stack), np.imag(stack)
    top = np.concatenate([re, -im], axis=-1)
    bot = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def _multiplier(z: np.ndarray, m: int, embedded: bool) -> np.ndarray:
    zz = z.reshape(m, m).T  # cvxopt stores column-major
    zz = (zz + zz.T) / 2
    if not embedded:
        return zz.astype(complex)
    d = m // 2
    z11, z12, z21, z22 = zz[:d, :d], zz[:d, d:], zz[d:, :d], zz[d:, d:]
    return herm((z11 + z22) + 1j * (z21 - z12))


# ---------------------------------------------------------------------------
# solution
# ---------------------------------------------------------------------------


@dataclass
class SdpSolution:
    status: str
    primal_value: float
    dual_value: float
    values: dict = field(default_factory=dict)
    duals: dict = field(default_factory=dict)
    iterations: int = 0
    gap: float = float("nan")
    residuals: dict = field(default_factory=dict)
    certificate: object = None

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL

    def __getitem__(self, name):
        return self.values[name]


def _independent_rows(A: np.ndarray, b: np.ndarray, tol: float = 1e-10):
    """Drop linearly dependent equality rows; report inconsistency."""
    if A.shape[0] == 0:
        return A, b, True
    q, r, piv = scipy.linalg.qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(r))
    scale = diag[0] if diag.size and diag[0] > 0 else 1.0
    k = int(np.sum(diag > tol * scale))
    keep = np.sort(piv[:k])
    A2, b2 = A[keep], b[keep]
    consistent = True
    if k < A.shape[0]:
        sol, *_ = np.linalg.lstsq(A2, b2, rcond=None)
        consistent = np.max(np.abs(A @ sol - b)) <= 1e-8 * max(1.0, np.max(np.abs(b)))
    return A2, b2, consistent


def _to_cvx(M: np.ndarray):
    from cvxopt import matrix, spmatrix

    if M.size and np.count_nonzero(M) < SPARSE_FRACTION * M.size:
        r, c = np.nonzero(M)
        return spmatrix(M[r, c].tolist(), r.tolist(), c.tolist(), M.shape, "d")
    return matrix(np.asfortranarray(M, dtype=float), M.shape, "d")


def solve(problem: SdpProblem, tolerances: dict | None = None, raise_on_fail: bool = False) -> SdpSolution:
    """Solve with the interior-point method and report primal/dual data.

    :param problem: the program to solve.
    :param tolerances: overrides for ``abstol``, ``reltol``, ``feastol`` and
        ``maxiters``.
    :param raise_on_fail: raise :class:`SdpError` unless the status is Optimal.
    """
    if problem.total_dim > MAX_DIM:
        raise DimensionError(f"total block dimension {problem.total_dim} exceeds guard {MAX_DIM}")
    nvars = sum(v.size for v in problem.variables)
    if nvars > MAX_VARS:
        # the dense Newton system grows as nvars^2 in memory and nvars^3 in time
        raise DimensionError(f"{nvars} real variables exceed the dense solver guard {MAX_VARS}")
    opts = dict(DEFAULT_TOL)
    if tolerances:
        opts.update(tolerances)
    cf = problem.to_conic()
    if tolerances:
        sol = _solve_conic(problem, cf, opts)
    else:
        cap = opts["maxiters"]
        sol = _solve_conic(problem, cf, {**opts, "maxiters": min(cap, FIRST_PASS_ITERS)})
        used = sol.iterations
        for extra in RETRY_TOL:
            if sol.status != MAXITER or used >= cap:
                break
            sol = _solve_conic(problem, cf, {**opts, **extra, "maxiters": cap - used})
            used += sol.iterations
        sol.iterations = used
    for log in _RECORDERS.get():
        log.append((problem.name, sol))
    if raise_on_fail and sol.status != OPTIMAL:
        raise SdpError(f"{problem.name}: solver returned {sol.status}", sol)
    return sol


def _solve_conic(problem: SdpProblem, cf: dict, opts: dict) -> SdpSolution:
    from cvxopt import matrix, solvers

    opts = {**opts, "show_progress": False}
    A, b, consistent = _independent_rows(cf["A"], cf["b"])
    flip = -1.0 if problem.sense == "max" else 1.0
    if not consistent:
        return SdpSolution(INFEASIBLE, math.nan, math.nan, certificate="inconsistent equalities")
    n = cf["c"].size
    args = dict(
        c=matrix(cf["c"], (n, 1), "d"),
        G=_to_cvx(cf["G"]),
        h=matrix(cf["h"], (cf["h"].size, 1), "d"),
        dims=cf["dims"],
    )
    if A.shape[0]:
        args["A"] = _to_cvx(A)
        args["b"] = matrix(b, (b.size, 1), "d")
    try:
        try:
            res = solvers.conelp(options=opts, kktsolver="chol", **args)
        except (ValueError, ArithmeticError):
            # the Cholesky KKT route needs [G; A] of full column rank
            res = solvers.conelp(options=opts, **args)
    except (ValueError, ArithmeticError) as exc:
        return SdpSolution(MAXITER, math.nan, math.nan, certificate=str(exc))
    st = res["status"]
    z = np.array(res["z"]).reshape(-1) if res["z"] is not None else None
    if st == "primal infeasible":
        sol = SdpSolution(INFEASIBLE, math.nan, math.nan, iterations=res["iterations"], certificate=z)
    elif st == "dual infeasible":
        sol = SdpSolution(UNBOUNDED, -flip * math.inf, -flip * math.inf, iterations=res["iterations"],
                          certificate=np.array(res["x"]).reshape(-1))
    else:
        x = np.array(res["x"]).reshape(-1)
        y = np.array(res["y"]).reshape(-1) if res["y"] is not None else np.zeros(0)
        values = {v.name: v.assemble(x) for v in problem.variables}
        pval = problem.objective_value(values)
        dval_std = -float(cf["h"] @ z) - (float(b @ y) if b.size else 0.0)
        dval = flip * dval_std + problem.objective_const
        duals = _extract_duals(cf, z)
        resid = verify(problem, values)
        gap = abs(pval - dval)
        feas = max([r for k, r in resid.items() if k != "objective"], default=0.0)
        # cvxopt's "optimal" uses its own scaled residuals; accept only what
        # the unscaled check confirms, and rescue "unknown" when it passes
        good = gap <= GAP_TOL * (1 + abs(pval)) and feas <= FEAS_TOL
        status = OPTIMAL if good else MAXITER
        sol = SdpSolution(status, pval, dval, values, duals, res["iterations"], gap, resid)
    return sol


def _extract_duals(cf: dict, z: np.ndarray) -> dict:
    duals = {}
    pos = 0
    for con in cf["lin"]:
        duals[con.name] = float(z[pos])
        pos += 1
    for m, embedded, con in cf["blocks"]:
        duals[con.name] = _multiplier(z[pos:pos + m * m], m, embedded)
        pos += m * m
    return duals


def verify(problem: SdpProblem, candidate: dict) -> dict:
    """Per-constraint violation and objective at ``candidate``.

    Inequalities report the amount by which they fail (negative minimum
    eigenvalue for matrix constraints), equalities report the largest absolute
    error.  ``candidate`` maps variable names to values and is not modified.
    """
    report = {}
    for v in problem.variables:
        if v.name not in candidate:
            raise DimensionError(f"candidate is missing variable {v.name!r}")
        x = candidate[v.name]
        want = () if v.kind == "scalar" else v.shape
        if np.shape(x) != want:
            raise DimensionError(f"variable {v.name!r} has shape {np.shape(x)}, expected {want}")
    for con in problem.constraints:
        val = problem.evaluate(con, candidate)
        if con.kind == "matrix":
            if con.sense == "==":
                r = float(np.max(np.abs(val)))
            else:
                w = np.linalg.eigvalsh(val)
                r = max(0.0, -w[0]) if con.sense == ">=" else max(0.0, w[-1])
        else:
            r = abs(val) if con.sense == "==" else max(0.0, -val if con.sense == ">=" else val)
        report[con.name] = float(r)
    report["objective"] = problem.objective_value(candidate)
    return report


# ---------------------------------------------------------------------------
# common batched linear maps
# ---------------------------------------------------------------------------


def trace_map(x: np.ndarray) -> np.ndarray:
    return np.real(np.trace(x, axis1=-2, axis2=-1))


def inner_map(m: np.ndarray) -> Callable:
    """``X -> Re Tr(m^dag X)``."""
    mc = np.asarray(m).conj()

    def f(x):
        return np.real(np.einsum("kij,ij->k", x, mc))

    return f


def kron_left(a: np.ndarray) -> Callable:
    """``X -> a ⊗ X`` on a stack."""
    a = np.asarray(a)

    def f(x):
        k, m, n = x.shape
        out = np.einsum("ij,kab->kiajb", a, x)
        return out.reshape(k, a.shape[0] * m, a.shape[1] * n)

    return f


def kron_right(a: np.ndarray) -> Callable:
    """``X -> X ⊗ a`` on a stack."""
    a = np.asarray(a)

    def f(x):
        k, m, n = x.shape
        out = np.einsum("kab,ij->kaibj", x, a)
        return out.reshape(k, m * a.shape[0], n * a.shape[1])

    return f


def scalar_times(m: np.ndarray) -> Callable:
    """``t -> t * m`` for a scalar variable."""
    m = np.asarray(m)

    def f(t):
        return np.asarray(t)[:, None, None] * m[None]

    return f


def scalar_id(t):
    return np.asarray(t, dtype=float)


def congruence(left: np.ndarray, right: np.ndarray | None = None) -> Callable:
    """``X -> left X right`` (``right`` defaults to ``left^dag``)."""
    left = np.asarray(left)
    right = left.conj().T if right is None else np.asarray(right)

    def f(x):
        return left[None] @ x @ right[None]

    return f


def block_map(shape: tuple, pos: tuple, mode: str = "plain") -> Callable:
    """Place ``X`` (or its adjoint) at block ``pos`` of a block matrix.

    :param shape: row sizes and column sizes as ``(rows, cols)`` tuples.
    :param pos: ``(i, j)`` block index.
    :param mode: ``"plain"`` places ``X``; ``"herm"`` places ``X`` at
        ``(i, j)`` and ``X^dag`` at ``(j, i)``.
    """
    rows, cols = shape
    ro = np.concatenate([[0], np.cumsum(rows)])
    co = np.concatenate([[0], np.cumsum(cols)])
    i, j = pos

    def f(x):
        k = x.shape[0]
        out = np.zeros((k, ro[-1], co[-1]), dtype=complex)
        out[:, ro[i]:ro[i + 1], co[j]:co[j + 1]] = x
        if mode == "herm":
            out[:, ro[j]:ro[j + 1], co[i]:co[i + 1]] += np.conj(np.swapaxes(x, 1, 2))
        return out

    return f


def compose(*fs) -> Callable:
    """Right-to-left composition of batched maps."""

    def f(x):
        for g in reversed(fs):
            x = g(x)
        return x

    return f


def ptrace_map(dims: Sequence[int], keep: Sequence[int]) -> Callable:
    from .matqi import ptrace

    def f(x):
        return ptrace(x, dims, keep)

    return f


def scaled(f: Callable, a: float) -> Callable:
    def g(x):
        return a * f(x)

    return g

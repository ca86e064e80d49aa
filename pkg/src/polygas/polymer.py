"""Polymer sampling and volume estimation for an arrangement: per base,
draw one direction per hyperplane, solve the linear system that pins the
configuration, and accept when every non-base functional exceeds its
radius.  Also: the planar radius-invariance check, the projection laws
onto the last d coordinates, and the warped-surface variant.

The volume of a base's stratum is measured on direction space (the product
of surface measures), so each base contributes
(total surface measure)^n * acceptance probability.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass

import numpy as np

from .arrangement import Arrangement
from .exact_linalg import exact_inverse
from .geometry import (RNGStream, bounding_halfwidth, sample_unit_sphere,
                       sphere_area, surface_measure_total)
from .matroid import LinearOrder, MatroidView, mask_elements
from .mayer import (MCEstimate, _box_volume, _check_shapes, _draw_box, mc_sum,
                    run_chunked, z_score)


@dataclass(frozen=True)
class PolymerSample:
    """One draw for a base: directions per base hyperplane, the solved
    configuration, and whether all non-base constraints hold strictly."""

    base_mask: int
    directions: np.ndarray    # (n, dim) unit vectors (complex rows if needed)
    x: np.ndarray             # (n, dim) configuration
    accepted: bool


def _base_inverse(arr: Arrangement, base_mask: int) -> np.ndarray:
    rows = [arr.normals[e] for e in mask_elements(base_mask)]
    inv = exact_inverse(rows)
    if arr.complexified:
        return np.array([[float(v) for v in row] for row in inv], dtype=float)
    from .exact_linalg import Cyclotomic
    return np.array([[v.to_complex() if isinstance(v, Cyclotomic) else complex(v)
                      for v in row] for row in inv], dtype=complex)


def _polymer_dims(arr: Arrangement, dim: int):
    """Real ambient dimension per point -> per-point storage (complex halves
    the column count for non-complexified arrangements)."""
    if dim < 2:
        raise ValueError("polymer dimension must be >= 2")
    if arr.complexified:
        return dim, False
    if dim % 2:
        raise ValueError("cyclotomic arrangements need an even polymer dimension")
    return dim, True


def _draw_directions(arr: Arrangement, rng, count: int, dim: int) -> np.ndarray:
    """(count, n, .) unit direction vectors, complex for cyclotomic fields."""
    _, as_complex = _polymer_dims(arr, dim)
    flat = sample_unit_sphere(dim, rng, count * arr.ambient_dim)
    u = flat.reshape(count, arr.ambient_dim, dim)
    if as_complex:
        u = u[..., 0::2] + 1j * u[..., 1::2]
    return u


def _accept_batch(arr: Arrangement, base_mask: int, dim: int, rng, count: int,
                  radii, inv: np.ndarray):
    """Draw `count` samples for one base; returns (accepted bool array, x)."""
    radii = np.asarray(radii, dtype=float)
    base_idx = list(mask_elements(base_mask))
    outside_idx = [e for e in range(arr.size) if not base_mask >> e & 1]
    u = _draw_directions(arr, rng, count, dim)
    targets = u * radii[base_idx][None, :, None]
    x = np.einsum("ij,cjd->cid", inv, targets)
    if not outside_idx:
        return np.ones(count, dtype=bool), x
    vals = np.einsum("en,cnd->ced", arr.coeff[outside_idx], x)
    norms_sq = np.sum((vals * vals.conj()).real, axis=2)
    accepted = np.all(norms_sq > radii[outside_idx][None, :] ** 2, axis=1)
    return accepted, x


def sample_for_base(arr: Arrangement, base_mask: int, dim: int,
                    rng: np.random.Generator, radii=None) -> PolymerSample:
    """One polymer draw for a base: the configuration solving
    h_e(x) = R_e * u_e for e in the base, accepted iff every other
    hyperplane's value strictly exceeds its radius."""
    view = MatroidView(arr)
    if not view.is_base(base_mask):
        raise ValueError("mask is not a base")
    radii = tuple(float(r) for r in (radii if radii is not None else arr.radii))
    inv = _base_inverse(arr, base_mask)
    accepted, x = _accept_batch(arr, base_mask, dim, rng, 1, radii, inv)
    base_idx = list(mask_elements(base_mask))
    u = (arr.coeff[base_idx] @ x[0]) / np.asarray(radii)[base_idx][:, None]
    return PolymerSample(base_mask, u, x[0], bool(accepted[0]))


def volume_mc(arr: Arrangement, dim: int, n_samples: int, seed: int,
              workers: int = 1, radii=None) -> MCEstimate:
    """Total polymer volume at the given ambient dimension: sum over bases of
    (sphere area)^n times that base's acceptance rate, the sample budget
    split evenly across bases."""
    view = MatroidView(arr)
    radii = tuple(float(r) for r in (radii if radii is not None else arr.radii))
    bases = list(view.bases())
    per_base = max(1, n_samples // len(bases))
    weight = sphere_area(dim) ** arr.ambient_dim
    parts = []
    for b_index, base_mask in enumerate(bases):
        inv = _base_inverse(arr, base_mask)

        def values(rng, count, base_mask=base_mask, inv=inv):
            accepted, _ = _accept_batch(arr, base_mask, dim, rng, count,
                                        radii, inv)
            return accepted * weight

        parts.append(run_chunked(per_base, seed, workers, values,
                                 stream_base=b_index << 32))
    return mc_sum(parts, seed, workers)


# --------------------------------------------------------------------------
# planar radius invariance
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InvarianceReport:
    radii_list: tuple
    estimates: tuple          # MCEstimate per radii assignment
    target: float             # (2 pi)^n |chi(0)|
    z_to_target: tuple
    max_pairwise_z: float
    passed: bool
    wall_time: float

    def to_json_dict(self) -> dict:
        return {
            "radii_list": [list(r) for r in self.radii_list],
            "estimates": [e.to_json_dict() for e in self.estimates],
            "target": self.target,
            "z_to_target": list(self.z_to_target),
            "max_pairwise_z": self.max_pairwise_z,
            "pass": self.passed,
            "wall_time": self.wall_time,
        }


def planar_invariance_check(arr: Arrangement, radii_list, n_samples: int,
                            seed: int, workers: int = 1) -> InvarianceReport:
    """Planar polymer volume for several radii assignments; each must agree
    with (2 pi)^n |chi(0)| and with the others within 4 sigma."""
    start = time.perf_counter()
    view = MatroidView(arr)
    n = arr.ambient_dim
    target = (2.0 * math.pi) ** n * abs(view.chi_at_zero())
    target_est = MCEstimate(target, 0.0, 0, seed, workers)
    estimates = []
    for i, radii in enumerate(radii_list):
        est = volume_mc(arr, 2, n_samples, seed + i, workers, radii=radii)
        estimates.append(est)
    z_target = tuple(z_score(e, target_est) for e in estimates)
    pair = 0.0
    for i in range(len(estimates)):
        for j in range(i + 1, len(estimates)):
            pair = max(pair, abs(z_score(estimates[i], estimates[j])))
    passed = all(abs(z) < 4.0 for z in z_target) and pair < 4.0
    return InvarianceReport(tuple(tuple(float(r) for r in rs) for rs in radii_list),
                            tuple(estimates), target, z_target, pair, passed,
                            time.perf_counter() - start)


# --------------------------------------------------------------------------
# projection laws
# --------------------------------------------------------------------------

G_FUNCTIONS = {
    "const1": lambda y: np.ones(y.shape[0]),
    "norm_sq": lambda y: np.sum(y * y, axis=(1, 2)),
    "indicator_halfspace": lambda y: (y[:, 0, 0] > 0).astype(float),
}


def _checked(g):
    def wrapped(y):
        values = np.asarray(g(y), dtype=float)
        if not np.all(np.isfinite(values)):
            raise ValueError("g produced non-finite values on samples")
        return values
    return wrapped


@dataclass(frozen=True)
class ProjectionReport:
    polymer_side: MCEstimate
    mmc_side: MCEstimate
    z: float
    passed: bool

    def to_json_dict(self) -> dict:
        return {"polymer_side": self.polymer_side.to_json_dict(),
                "mmc_side": self.mmc_side.to_json_dict(),
                "z_score": self.z, "pass": self.passed}


def project_expectation(arr: Arrangement, d: int, g, n_samples: int, seed: int,
                        workers: int = 1) -> ProjectionReport:
    """Expectation of a function of the last d coordinates, two ways: over
    accepted polymer samples at dimension d + 2 (weighted by surface totals),
    and as (-2 pi)^n times the region-decomposition integral of
    g * chi_G(0)."""
    if not arr.complexified:
        raise ValueError("projection laws are stated for real arrangements")
    if d < 1:
        raise ValueError("d must be >= 1")
    if isinstance(g, str):
        g = G_FUNCTIONS[g]
    g = _checked(g)
    dim = d + 2
    view = MatroidView(arr)
    n = arr.ambient_dim
    weight = sphere_area(dim) ** n
    bases = list(view.bases())
    per_base = max(1, n_samples // len(bases))
    parts = []
    for b_index, base_mask in enumerate(bases):
        inv = _base_inverse(arr, base_mask)

        def values(rng, count, base_mask=base_mask, inv=inv):
            accepted, x = _accept_batch(arr, base_mask, dim, rng, count,
                                        arr.radii, inv)
            return accepted * g(x[:, :, 2:]) * weight

        parts.append(run_chunked(per_base, seed, workers, values,
                                 stream_base=b_index << 32))
    polymer_side = mc_sum(parts, seed, workers)

    box = bounding_halfwidth(arr)
    vol = _box_volume(arr, d, box.halfwidth)

    def mmc_values(rng, count):
        pts = _draw_box(arr, rng, count, d, box.halfwidth)
        masks = arr.gamma_masks(pts)
        uniq, inverse = np.unique(masks, return_inverse=True)
        chi = np.array([view.chi_if_spanning(int(m)) for m in uniq], dtype=float)
        return chi[inverse] * g(pts) * vol

    # separate seed so the two sides are statistically independent
    mmc_side = run_chunked(n_samples, seed + 1, workers, mmc_values).scaled(
        (-2.0 * math.pi) ** n)
    z = z_score(polymer_side, mmc_side)
    return ProjectionReport(polymer_side, mmc_side, z, abs(z) < 4.0)


def safe_projection_expectation(arr: Arrangement, d: int, g, order: LinearOrder,
                                n_samples: int, seed: int,
                                workers: int = 1) -> MCEstimate:
    """Positive-weight form of the projection integral: count order-safe
    bases of the within-radius subset instead of adding its chi(0), and scale
    by (2 pi)^n.  Agrees with the chi path for every fixed order."""
    if not arr.complexified:
        raise ValueError("projection laws are stated for real arrangements")
    if isinstance(g, str):
        g = G_FUNCTIONS[g]
    g = _checked(g)
    view = MatroidView(arr)
    box = bounding_halfwidth(arr)
    vol = _box_volume(arr, d, box.halfwidth)

    def values(rng, count):
        pts = _draw_box(arr, rng, count, d, box.halfwidth)
        masks = arr.gamma_masks(pts)
        uniq, inverse = np.unique(masks, return_inverse=True)
        counts = np.array(
            [view.safe_count_if_spanning(int(m), order) for m in uniq], dtype=float)
        return counts[inverse] * g(pts) * vol

    est = run_chunked(n_samples, seed, workers, values)
    return est.scaled((2.0 * math.pi) ** arr.ambient_dim)


# --------------------------------------------------------------------------
# warped-surface polymers
# --------------------------------------------------------------------------

def asa_volume_mc(arr: Arrangement, shapes, n_samples: int, seed: int,
                  workers: int = 1) -> MCEstimate:
    """Polymer volume with per-hyperplane surfaces: base functional values
    are drawn uniformly from each surface (bottom point + circle angle), the
    configuration solved, and a sample is accepted when every non-base value
    lies outside that hyperplane's closed solid body (bottom membership and
    circle part within the warp radius never both hold)."""
    if not arr.complexified:
        raise ValueError("warped-surface polymers need a real arrangement")
    dims = {s.dim for s in shapes}
    if len(dims) != 1:
        raise ValueError("all shapes must share one ambient dimension")
    dim = dims.pop()
    d = dim - 2
    shapes = _check_shapes(arr, shapes, d)
    view = MatroidView(arr)
    bases = list(view.bases())
    per_base = max(1, n_samples // len(bases))
    parts = []
    for b_index, base_mask in enumerate(bases):
        base_idx = list(mask_elements(base_mask))
        outside_idx = [e for e in range(arr.size) if not base_mask >> e & 1]
        inv = _base_inverse(arr, base_mask)
        weight = 1.0
        for e in base_idx:
            weight *= surface_measure_total(shapes[e])

        def values(rng, count, base_idx=base_idx, outside_idx=outside_idx,
                   inv=inv, weight=weight):
            targets = np.stack([shapes[e].sample_surface(rng, count)
                                for e in base_idx], axis=1)
            x = np.einsum("ij,cjd->cid", inv, targets)
            if not outside_idx:
                return np.full(count, weight)
            vals = np.einsum("en,cnd->ced", arr.coeff[outside_idx], x)
            accepted = np.ones(count, dtype=bool)
            for pos, e in enumerate(outside_idx):
                w_part = vals[:, pos, :2]
                y_part = vals[:, pos, 2:]
                rho = shapes[e].warp(y_part)
                inside_solid = (shapes[e].bottom_contains(y_part)
                                & (np.sum(w_part * w_part, axis=1) <= rho ** 2))
                accepted &= ~inside_solid
            return accepted * weight

        parts.append(run_chunked(per_base, seed, workers, values,
                                 stream_base=b_index << 32))
    return mc_sum(parts, seed, workers)


# --------------------------------------------------------------------------
# diagnostics output
# --------------------------------------------------------------------------

def dump_samples_csv(path, arr: Arrangement, dim: int, n_samples: int,
                     seed: int, radii=None):
    """Write (base mask, accepted, flattened coordinates) rows for a small
    number of draws from every base."""
    view = MatroidView(arr)
    radii = tuple(float(r) for r in (radii if radii is not None else arr.radii))
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["base_mask", "accepted"]
                        + [f"x{i}_{j}" for i in range(arr.ambient_dim)
                           for j in range(dim)])
        for b_index, base_mask in enumerate(view.bases()):
            rng = RNGStream(seed, b_index).generator()
            inv = _base_inverse(arr, base_mask)
            accepted, x = _accept_batch(arr, base_mask, dim, rng, n_samples,
                                        radii, inv)
            coords = x.reshape(n_samples, -1)
            if np.iscomplexobj(coords):
                coords = np.concatenate([coords.real, coords.imag], axis=1)
            for row in range(n_samples):
                writer.writerow([base_mask, int(accepted[row])]
                                + [f"{v:.9g}" for v in coords[row]])


def polymer_svg(path, arr: Arrangement, seed: int = 0, tries: int = 1000):
    """Draw one accepted planar sample as an SVG of disks (documentation aid;
    meaningful for difference-functional arrangements)."""
    view = MatroidView(arr)
    bases = list(view.bases())
    rng = RNGStream(seed, 0).generator()
    sample = None
    for _ in range(tries):
        base_mask = bases[int(rng.integers(len(bases)))]
        cand = sample_for_base(arr, base_mask, 2, rng)
        if cand.accepted:
            sample = cand
            break
    if sample is None:
        raise RuntimeError("no accepted sample found")
    pts = sample.x.real if np.iscomplexobj(sample.x) else sample.x
    rmin = min(arr.radii)
    lo = pts.min() - rmin
    hi = pts.max() + rmin
    span = max(hi - lo, 1e-9)
    scale = 400.0 / span

    def sx(v):
        return 20 + (v - lo) * scale

    disks = "\n".join(
        f'  <circle cx="{sx(p[0]):.2f}" cy="{sx(p[1]):.2f}" '
        f'r="{rmin / 2 * scale:.2f}" fill="#8aa" stroke="#345"/>'
        for p in pts)
    svg = (f'<svg xmlns="http://www.w3.org/2000/svg" width="440" height="440">\n'
           f"{disks}\n</svg>\n")
    with open(path, "w") as fh:
        fh.write(svg)
    return path

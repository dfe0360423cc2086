"""Critical lines, their forward orbits, and the evidence used to rule a map
in or out as a Lattès example at the level of line configurations."""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field

import numpy as np

from .errors import NotALineError, VerificationFailure
from .groups import HALF_PERIOD, AffineLine, classification_registry, is_reflection, situation5_group, stabilizer_of_line
from .maps import HomogeneousMap, proj_distance
from .quotient import theta_lift

LINE_TOL = 1e-8
_PARAMS = (0.31 + 0.17j, -0.72 + 0.44j, 1.13 - 0.61j, -0.28 - 0.93j, 0.57 + 1.21j, 1.9 + 0.3j, -1.4 + 0.8j)


@dataclass(frozen=True, eq=False)
class ProjLine:
    """The line ``{l . z = 0}``; coefficients have unit norm and their first
    nonzero entry is real positive."""

    coeffs: np.ndarray

    def __post_init__(self):
        l = np.asarray(self.coeffs, dtype=complex).reshape(3)
        n = np.linalg.norm(l)
        if not n > 0:
            raise ValueError("line needs a nonzero coefficient vector")
        l = l / n
        k = int(np.argmax(np.abs(l) > 1e-9))
        l = l * (abs(l[k]) / l[k])
        l = np.where(np.abs(l.real) < 1e-15, 0, l.real) + 1j * np.where(np.abs(l.imag) < 1e-15, 0, l.imag)
        l.setflags(write=False)
        object.__setattr__(self, "coeffs", l)

    def same(self, other: "ProjLine", tol: float = LINE_TOL) -> bool:
        return proj_distance(self.coeffs, other.coeffs) <= tol

    def points(self, params=_PARAMS) -> list[np.ndarray]:
        """Points ``u + s v`` on the line for a fixed list of parameters."""
        _, _, vh = np.linalg.svd(self.coeffs[None, :])
        u, v = vh[1].conj(), vh[2].conj()
        return [u + s * v for s in params]

    def evaluate(self, z) -> complex:
        return complex(self.coeffs @ np.asarray(z, dtype=complex))

    @property
    def label(self) -> str:
        return line_label(self)

    def __repr__(self):
        return f"ProjLine{self.label}"


NAMED_LINES = {
    (1, 0, 0): "{X=0}",
    (0, 1, 0): "{Y=0}",
    (0, 0, 1): "{Z=0}",
    (0, 1, -1): "{Y=Z}",
    (1, -1, 0): "{X=Y}",
    (1, 0, -1): "{X=Z}",
    (1, -2, 0): "{2Y=X}",
    (1, 0, -2): "{2Z=X}",
}


def named_line(label: str) -> ProjLine:
    for k, v in NAMED_LINES.items():
        if v == label:
            return ProjLine(k)
    raise KeyError(label)


def _integer_form(l: np.ndarray) -> tuple[int, ...] | None:
    if np.max(np.abs(l.imag)) > 1e-9:
        return None
    r = l.real
    nz = np.abs(r[np.abs(r) > 1e-9])
    for mult in range(1, 13):
        s = r / nz.min() * mult
        if np.max(np.abs(s - np.round(s))) < 1e-6:
            return tuple(int(v) for v in np.round(s))
    return None


def line_label(line: ProjLine) -> str:
    ints = _integer_form(line.coeffs)
    if ints is not None:
        g = math.gcd(*ints)
        ints = tuple(v // g for v in ints)
        if ints in NAMED_LINES:
            return NAMED_LINES[ints]
        terms = []
        for c, name in zip(ints, "XYZ"):
            if c:
                mag = "" if abs(c) == 1 else str(abs(c))
                terms.append(("-" if c < 0 else "+") + mag + name)
        s = "".join(terms).lstrip("+")
        return "{" + s + "=0}"
    c = line.coeffs
    return "{" + "+".join(f"({v.real:.4g}{v.imag:+.4g}i){n}" for v, n in zip(c, "XYZ")) + "=0}"


def fit_line(points, tol: float = LINE_TOL) -> ProjLine:
    """Line through the given points of P^2; raises if they are not collinear
    or all coincide."""
    W = np.array([np.asarray(p, dtype=complex) / np.linalg.norm(p) for p in points])
    _, s, vh = np.linalg.svd(W)
    if len(s) < 3 or s[2] > tol * max(1.0, s[0]):
        raise NotALineError(f"points are not collinear (singular values {s})")
    if s[1] <= tol:
        raise NotALineError("points collapse to a single point")
    # W v = 0 for v = conj(vh[-1])
    return ProjLine(vh[-1].conj())


def image_of_line(F: HomogeneousMap, line: ProjLine) -> ProjLine:
    images = [F(p) for p in line.points()]
    return fit_line(images)


def critical_lines(F: HomogeneousMap, tol: float = LINE_TOL) -> list[ProjLine]:
    """Critical components of a map whose coordinates are squares of linear
    forms ``l_k``: the Jacobian determinant is ``8 det(L) prod l_k``, so the
    components are the lines ``{l_k = 0}``. Each is verified by sampling."""
    if F.linear_forms is None or F.degree != 2:
        raise VerificationFailure("critical lines are only derived for squared-linear-form maps")
    L = F.linear_forms
    if abs(np.linalg.det(L)) < 1e-12:
        raise VerificationFailure("linear forms are dependent; map is not regular")
    lines = [ProjLine(row) for row in L]
    for line in lines:
        for p in line.points():
            p = p / np.linalg.norm(p)
            if abs(F.jacobian_det(p)) > tol * max(1.0, abs(F.scale) ** 3):
                raise VerificationFailure(f"Jacobian does not vanish on {line.label}")
    return lines


def transverse_multiplicity(F: HomogeneousMap, line: ProjLine) -> int:
    """Local degree of ``F`` transverse to a critical line: one more than the
    vanishing order of the Jacobian determinant across the line."""
    p = line.points()[0]
    p = p / np.linalg.norm(p)
    v = line.coeffs.conj()
    e1, e2 = 1e-3, 5e-4
    a, b = abs(F.jacobian_det(p + e1 * v)), abs(F.jacobian_det(p + e2 * v))
    order = round(math.log(a / b) / math.log(e1 / e2))
    return order + 1


@dataclass
class PostCriticalGraph:
    map_name: str
    nodes: list[ProjLine]
    edges: dict[int, int]
    critical: list[int]
    closed: bool
    depth: int
    error: str | None = None

    @property
    def post_critical(self) -> list[int]:
        return sorted(set(self.edges.values()))

    def labels(self) -> list[str]:
        return [n.label for n in self.nodes]

    def arrows(self) -> list[tuple[str, str]]:
        lab = self.labels()
        return [(lab[i], lab[j]) for i, j in sorted(self.edges.items())]

    def to_json(self) -> dict:
        def cplx(v):
            return [float(v.real), float(v.imag)]

        return {
            "map": self.map_name,
            "closed": self.closed,
            "depth": self.depth,
            "error": self.error,
            "nodes": [
                {"id": i, "label": n.label, "coeffs": [cplx(c) for c in n.coeffs]}
                for i, n in enumerate(self.nodes)
            ],
            "edges": [[i, j] for i, j in sorted(self.edges.items())],
            "critical": list(self.critical),
            "post_critical": self.post_critical,
        }

    def to_text(self) -> str:
        lines = [f"post-critical line graph of {self.map_name}"]
        lab = self.labels()
        for i in self.critical:
            lines.append(f"critical: {lab[i]}")
        for a, b in self.arrows():
            lines.append(f"  {a} -> {b}")
        status = "closed" if self.closed else "not closed"
        lines.append(f"{len(self.post_critical)} post-critical lines, {status} at depth {self.depth}")
        if self.error:
            lines.append(f"stopped: {self.error}")
        return "\n".join(lines)


def post_critical_graph(F: HomogeneousMap, max_depth: int = 8) -> PostCriticalGraph:
    """Forward orbits of the critical lines, deduplicated.

    Stops when no new line appears (``closed``) or at ``max_depth``. A line
    whose image is not a line ends the search with ``closed=False``.
    """
    if max_depth < 6:
        raise ValueError("max_depth must be at least 6")
    nodes = critical_lines(F)
    critical = list(range(len(nodes)))
    edges: dict[int, int] = {}
    frontier = list(critical)
    depth = 0
    error = None

    def index(line):
        for i, n in enumerate(nodes):
            if n.same(line):
                return i
        nodes.append(line)
        return len(nodes) - 1

    while frontier and depth < max_depth:
        depth += 1
        nxt = []
        for i in frontier:
            try:
                img = image_of_line(F, nodes[i])
            except NotALineError as exc:
                error = f"image of {nodes[i].label} is not a line ({exc})"
                frontier = []
                break
            n_before = len(nodes)
            j = index(img)
            edges[i] = j
            if j >= n_before:
                nxt.append(j)
        else:
            frontier = nxt
            continue
        break
    closed = error is None and not frontier
    return PostCriticalGraph(F.name, nodes, edges, critical, closed, depth, error)


EXPECTED_G_ARROWS = (
    ("{X=0}", "{Z=0}"),
    ("{Z=0}", "{Y=Z}"),
    ("{Y=Z}", "{X=Y}"),
    ("{X=Y}", "{X=Z}"),
    ("{X=Z}", "{Y=Z}"),
    ("{2Y=X}", "{X=0}"),
    ("{2Z=X}", "{Y=0}"),
    ("{Y=0}", "{X=Z}"),
)


def _torus_line_image(x0: np.ndarray, n: np.ndarray) -> ProjLine | None:
    pts = []
    for s in _PARAMS:
        v = theta_lift(*(x0 + s * 0.37 * n), normalized=False)
        if np.max(np.abs(v)) > 1e-12:
            pts.append(v)
    try:
        return fit_line(pts, tol=1e-7)
    except NotALineError:
        return None


def situation5_branch_lines() -> list[ProjLine]:
    """Images under ``sigma`` of the mirrors (fixed lines of reflections)
    of the situation-5 group."""
    G = situation5_group()
    L2 = G.lattice
    found: list[ProjLine] = []
    box = [(a, b, c, d) for a in (-1, 0, 1) for b in (-1, 0, 1) for c in (-1, 0, 1) for d in (-1, 0, 1)]
    for g in G:
        from .groups import GroupElement

        if not is_reflection(GroupElement(g.A, np.zeros(2), L2)):
            continue
        K = g.A - np.eye(2)
        _, _, vh = np.linalg.svd(K)
        n = vh[-1].conj()
        for coeffs in box:
            rhs = L2.point(coeffs) - g.t
            x0, *_ = np.linalg.lstsq(K, rhs, rcond=None)
            if np.max(np.abs(K @ x0 - rhs)) > 1e-9:
                continue
            line = _torus_line_image(x0, n)
            if line is not None and not any(line.same(f, 1e-6) for f in found):
                found.append(line)
    return found


def _branch_line_counts() -> dict[int, int]:
    counts = {}
    for e in classification_registry():
        m = re.match(r"(\d+) lines", e.branch_locus)
        counts[e.label] = int(m.group(1)) if m else 0
    return counts


@dataclass
class ObstructionReport:
    map_name: str
    critically_finite: bool
    post_critical_lines: int
    candidate_entries: list[int]
    inside_situation5_branch_locus: bool | None = None
    target_line_stabilizer_order: int | None = None
    source_line_stabilizer_order: int | None = None
    critical_fold_order: int | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def multiplicity_mismatch(self) -> bool | None:
        if self.target_line_stabilizer_order is None:
            return None
        source = self.source_line_stabilizer_order * self.critical_fold_order
        return source != self.target_line_stabilizer_order

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["multiplicity_mismatch"] = self.multiplicity_mismatch
        return d


def lattes_obstruction_report(F: HomogeneousMap, max_depth: int = 8) -> ObstructionReport:
    """Numerical facts about ``F`` relevant to the Lattès question.

    For ``g`` this includes the branching comparison along ``{X=0}``: the
    line ``{(x, x + (1+i)/2)}`` maps by ``D`` onto ``{(x, ix + (1+i)/2)}``
    while ``{X=0}`` maps by ``g`` onto ``{Z=0}``. The report only states the
    orders; it proves nothing.
    """
    graph = post_critical_graph(F, max_depth)
    if not graph.closed:
        return ObstructionReport(F.name, False, len(graph.post_critical), [],
                                 notes=["not critically finite at line level: " + (graph.error or "orbit did not close")])
    n_pc = len(graph.post_critical)
    counts = _branch_line_counts()
    candidates = [label for label, c in counts.items() if c >= n_pc]
    report = ObstructionReport(F.name, True, n_pc, candidates)
    if 5 in candidates:
        branch = situation5_branch_lines()
        report.inside_situation5_branch_locus = all(
            any(graph.nodes[i].same(b, 1e-6) for b in branch) for i in graph.post_critical
        )
        report.notes.append(f"situation-5 branch locus: {len(branch)} lines")
    if F.name == "g":
        G = situation5_group()
        target = stabilizer_of_line(G, AffineLine(1j, HALF_PERIOD))
        source = stabilizer_of_line(G, AffineLine(1, HALF_PERIOD))
        report.target_line_stabilizer_order = len(target)
        report.source_line_stabilizer_order = len(source)
        report.critical_fold_order = transverse_multiplicity(F, ProjLine((1, 0, 0)))
        report.notes.append(
            "branching of sigma o D near {(x, x+(1+i)/2)} equals the stabilizer order of its image line; "
            "g o sigma branches to order (source stabilizer) x (fold of g along {X=0})"
        )
    return report

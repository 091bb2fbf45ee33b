"""Tropical column spans: membership, containment and the planar section
{x_3 = 0} of span(A) for n = 3, with SVG output."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from jinja2 import Environment, FileSystemLoader, select_autoescape

from config import Config
from tropcore import (
    BOTTOM, DimensionError, DomainError, TropMatrix, ext, format_ext,
    normalize_A0, require_real,
)

logger = logging.getLogger(__name__)

Point = Tuple[Fraction, Fraction]

_env = Environment(
    loader=FileSystemLoader(Config.TEMPLATE_DIR),
    autoescape=select_autoescape(['svg', 'j2']),
    trim_blocks=True,
    lstrip_blocks=True,
    keep_trailing_newline=True,
)


@dataclass(frozen=True)
class SpanCertificate:
    """Residuation result: lam is the greatest solution of A lam <= x."""

    member: bool
    lam: Tuple[Fraction, ...]
    image: Tuple[Fraction, ...]

    def __bool__(self):
        return self.member


def span_member(A: TropMatrix, x: Sequence) -> SpanCertificate:
    require_real(A)
    point = tuple(ext(v) for v in x)
    if len(point) != A.rows:
        raise DimensionError(f'point has {len(point)} coordinates, A has {A.rows} rows')
    if any(v is BOTTOM for v in point):
        raise DomainError('span membership is tested for real points only')
    lam = tuple(min(point[i] - A[i, j] for i in range(A.rows)) for j in range(A.cols))
    image = tuple(max(A[i, j] + lam[j] for j in range(A.cols)) for i in range(A.rows))
    return SpanCertificate(image == point, lam, image)


def first_missing_column(A: TropMatrix, B: TropMatrix) -> Optional[int]:
    """Index of the first column of B outside span(A), if any"""
    if A.rows != B.rows:
        raise DimensionError(f'A has {A.rows} rows, B has {B.rows}')
    require_real(B, 'B')
    for j, column in enumerate(B.columns()):
        if not span_member(A, column).member:
            return j
    return None


def span_contains(A: TropMatrix, B: TropMatrix) -> bool:
    """span(A) contains span(B)"""
    return first_missing_column(A, B) is None


def span_intersection_check(A: TropMatrix, B: TropMatrix) -> Optional[bool]:
    """For commuting A, B: every column of AB lies in span(A) and span(B)"""
    product = A @ B
    if product != B @ A:
        return None
    return span_contains(A, product) and span_contains(B, product)


def _generators(A: TropMatrix) -> Tuple[TropMatrix, Tuple[Point, ...]]:
    if A.shape != (3, 3):
        raise DimensionError('sections are computed for 3x3 matrices only')
    require_real(A)
    A0 = normalize_A0(A)
    return A0, tuple((A0[0, j], A0[1, j]) for j in range(3))


def sector_check(A: TropMatrix) -> bool:
    """Column j of A0 lies in the closed sector S_j"""
    _, ((x1, y1), (x2, y2), (x3, y3)) = _generators(A)
    return (x1 >= 0 and x1 >= y1) and (x2 <= y2 and y2 >= 0) and (x3 <= 0 and y3 <= 0)


@dataclass(frozen=True)
class Cell:
    dim: int
    points: Tuple[Point, ...]
    pieces: Tuple[Tuple[Point, ...], ...] = ()
    vertices: frozenset = frozenset()


@dataclass(frozen=True)
class SpanSection:
    matrix: TropMatrix
    generators: Tuple[Point, ...]
    cells: Tuple[Cell, ...]
    bbox: Tuple[Fraction, Fraction, Fraction, Fraction]
    vertices: frozenset

    def two_cells(self) -> List[Cell]:
        return [c for c in self.cells if c.dim == 2]

    def one_cells(self) -> List[Cell]:
        return [c for c in self.cells if c.dim == 1]

    def zero_cells(self) -> List[Cell]:
        return [c for c in self.cells if c.dim == 0]

    def soma(self) -> frozenset:
        """Arrangement vertices on the 2-dimensional part"""
        return frozenset().union(*(c.vertices for c in self.two_cells()))

    def antennas(self) -> List[Tuple[Point, ...]]:
        return [c.points for c in self.one_cells()]

    def contains(self, point: Point) -> bool:
        x, y = point
        return span_member(self.matrix, (x, y, 0)).member

    def is_connected(self) -> bool:
        if not self.cells:
            return False
        parent = list(range(len(self.cells)))

        def find(a):
            while parent[a] != a:
                parent[a] = parent[parent[a]]
                a = parent[a]
            return a

        owner = {}
        for index, cell in enumerate(self.cells):
            for vertex in cell.vertices:
                if vertex in owner:
                    parent[find(index)] = find(owner[vertex])
                else:
                    owner[vertex] = index
        return len({find(i) for i in range(len(self.cells))}) == 1

    def summary(self) -> Dict:
        return {
            'generators': [list(g) for g in self.generators],
            'bbox': list(self.bbox),
            'two_cells': len(self.two_cells()),
            'one_cells': len(self.one_cells()),
            'zero_cells': len(self.zero_cells()),
            'connected': self.is_connected(),
            'antennas': [[list(p) for p in points] for points in self.antennas()],
        }


def _y_at(line, x: Fraction) -> Fraction:
    kind, c = line
    return c if kind == 'h' else x - c


def _dedupe(points: List[Point]) -> Tuple[Point, ...]:
    result = []
    for p in points:
        if not result or result[-1] != p:
            result.append(p)
    if len(result) > 1 and result[0] == result[-1]:
        result.pop()
    return tuple(result)


def _simplify(path: List[Point]) -> Tuple[Point, ...]:
    """Drop interior points where a polyline continues straight on"""
    if len(path) < 3:
        return tuple(path)
    kept = [path[0]]
    for middle, after in zip(path[1:], path[2:]):
        before = kept[-1]
        cross = (middle[0] - before[0]) * (after[1] - middle[1]) - (middle[1] - before[1]) * (after[0] - middle[0])
        dot = (middle[0] - before[0]) * (after[0] - middle[0]) + (middle[1] - before[1]) * (after[1] - middle[1])
        if cross != 0 or dot <= 0:
            kept.append(middle)
    kept.append(path[-1])
    return tuple(kept)


def section_complex(A: TropMatrix) -> SpanSection:
    """Cell structure of {x_3 = 0} cap span(A).

    The plane is cut by the lines x = p, y = q and x - y = p - q through
    every generator (p, q), then by vertical lines through every crossing.
    Each resulting trapezoid, edge and vertex is tested for membership at
    an interior point. Member trapezoids glued along edges of positive
    length form the 2-cells; member edges with no member trapezoid beside
    them are chained into 1-cells.
    """
    A0, generators = _generators(A)
    xs = [g[0] for g in generators]
    ys = [g[1] for g in generators]
    xmin, xmax, ymin, ymax = min(xs), max(xs), min(ys), max(ys)
    horizontals = sorted(set(ys))
    diagonals = sorted({x - y for x, y in generators})
    lines = [('h', c) for c in horizontals] + [('d', c) for c in diagonals]
    breaks = set(xs)
    breaks.update(h + d for h in horizontals for d in diagonals)
    breaks = sorted(b for b in breaks if xmin <= b <= xmax)

    def member(x, y):
        return span_member(A0, (x, y, 0)).member

    def band(x):
        return sorted({_y_at(line, x) for line in lines if ymin <= _y_at(line, x) <= ymax})

    vertices = {}
    for b in breaks:
        for y in band(b):
            vertices[(b, y)] = member(b, y)
    member_vertices = frozenset(p for p, inside in vertices.items() if inside)

    # trapezoids per strip: (lo line, hi line, member)
    strips = []
    for x0, x1 in zip(breaks, breaks[1:]):
        xm = (x0 + x1) / 2
        active = sorted((line for line in lines if ymin <= _y_at(line, xm) <= ymax),
                        key=lambda line: _y_at(line, xm))
        pieces = []
        for lo, hi in zip(active, active[1:]):
            pieces.append((lo, hi, member(xm, (_y_at(lo, xm) + _y_at(hi, xm)) / 2)))
        strips.append((x0, x1, active, pieces))

    trapezoids = []
    index_of = {}
    for s, (x0, x1, _, pieces) in enumerate(strips):
        for t, (lo, hi, inside) in enumerate(pieces):
            if inside:
                index_of[(s, t)] = len(trapezoids)
                trapezoids.append((s, t, x0, x1, lo, hi))

    parent = list(range(len(trapezoids)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for (s, t), k in index_of.items():
        if (s, t + 1) in index_of:
            parent[find(k)] = find(index_of[(s, t + 1)])
        if s + 1 < len(strips):
            _, x1, _, _ = strips[s]
            lo, hi = _y_at(trapezoids[k][4], x1), _y_at(trapezoids[k][5], x1)
            for u, (lo2, hi2, inside) in enumerate(strips[s + 1][3]):
                if not inside:
                    continue
                overlap = min(hi, _y_at(hi2, x1)) - max(lo, _y_at(lo2, x1))
                if overlap > 0:
                    parent[find(k)] = find(index_of[(s + 1, u)])

    def closure_vertices(trapezoid):
        _, _, x0, x1, lo, hi = trapezoid
        return frozenset(
            (vx, vy) for vx, vy in member_vertices
            if vx in (x0, x1) and _y_at(lo, vx) <= vy <= _y_at(hi, vx)
        )

    groups: Dict[int, List[int]] = {}
    for k in range(len(trapezoids)):
        groups.setdefault(find(k), []).append(k)
    cells = []
    two_cell_vertices = set()
    for root in sorted(groups, key=lambda r: groups[r][0]):
        polygons, touched = [], set()
        for k in groups[root]:
            _, _, x0, x1, lo, hi = trapezoids[k]
            polygons.append(_dedupe([
                (x0, _y_at(lo, x0)), (x1, _y_at(lo, x1)), (x1, _y_at(hi, x1)), (x0, _y_at(hi, x0)),
            ]))
            touched |= closure_vertices(trapezoids[k])
        two_cell_vertices |= touched
        cells.append(Cell(2, tuple(sorted(touched)), tuple(polygons), frozenset(touched)))

    # dangling edges along the arrangement lines
    edges = []
    for s, (x0, x1, active, pieces) in enumerate(strips):
        xm = (x0 + x1) / 2
        for t, line in enumerate(active):
            if not member(xm, _y_at(line, xm)):
                continue
            below = t > 0 and pieces[t - 1][2]
            above = t < len(pieces) and pieces[t][2]
            if not (below or above):
                edges.append(((x0, _y_at(line, x0)), (x1, _y_at(line, x1))))
    for index, b in enumerate(breaks):
        column = band(b)
        for ya, yb in zip(column, column[1:]):
            if not member(b, (ya + yb) / 2):
                continue
            beside = False
            for s in (index - 1, index):
                if not 0 <= s < len(strips):
                    continue
                for lo, hi, inside in strips[s][3]:
                    if inside and _y_at(lo, b) <= ya and yb <= _y_at(hi, b):
                        beside = True
            if not beside:
                edges.append(((b, ya), (b, yb)))

    adjacency: Dict[Point, List[int]] = {}
    for e, (p, q) in enumerate(edges):
        adjacency.setdefault(p, []).append(e)
        adjacency.setdefault(q, []).append(e)

    def anchor(node):
        return len(adjacency[node]) != 2 or node in two_cell_vertices

    used = set()

    def walk(start, edge):
        path, current = [start], start
        while True:
            used.add(edge)
            p, q = edges[edge]
            current = q if p == current else p
            path.append(current)
            if anchor(current):
                return path
            following = [f for f in adjacency[current] if f not in used]
            if not following:
                return path
            edge = following[0]

    chains = []
    for node in sorted(adjacency):
        if anchor(node):
            for edge in adjacency[node]:
                if edge not in used:
                    chains.append(walk(node, edge))
    for edge in range(len(edges)):
        if edge not in used:
            chains.append(walk(edges[edge][0], edge))
    for path in chains:
        cells.append(Cell(1, _simplify(path), (), frozenset(path)))

    on_edges = set(adjacency)
    for vertex in sorted(member_vertices):
        if vertex not in two_cell_vertices and vertex not in on_edges:
            cells.append(Cell(0, (vertex,), (), frozenset([vertex])))

    logger.debug('section: %d trapezoids, %d dangling edges, %d cells',
                 len(trapezoids), len(edges), len(cells))
    return SpanSection(A0, generators, tuple(cells), (xmin, ymin, xmax, ymax), member_vertices)


def _px(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return format(float(value), '.3f').rstrip('0').rstrip('.')


def _panel(section: SpanSection, label: str, offset: int, scale: int, margin: int) -> Dict:
    xmin, ymin, xmax, ymax = section.bbox
    left, right = min(xmin, 0) - margin, max(xmax, 0) + margin
    bottom, top = min(ymin, 0) - margin, max(ymax, 0) + margin

    def place(point):
        return (point[0] - left) * scale, (top - point[1]) * scale

    def points_attr(points):
        return ' '.join(f'{_px(x)},{_px(y)}' for x, y in map(place, points))

    dots = []
    for cell in section.zero_cells():
        cx, cy = place(cell.points[0])
        dots.append({'cx': _px(cx), 'cy': _px(cy)})
    generators = []
    for x, y in section.generators:
        cx, cy = place((x, y))
        generators.append({'cx': _px(cx), 'cy': _px(cy), 'x': format_ext(x), 'y': format_ext(y)})
    ox, oy = place((Fraction(0), Fraction(0)))
    width = (right - left) * scale
    height = (top - bottom) * scale
    return {
        'offset': offset,
        'width': _px(width),
        'height': _px(height),
        'raw_width': width,
        'raw_height': height,
        'label': label,
        'label_x': _px(width / 2),
        'label_y': _px(height + 16),
        'polygons': [points_attr(piece) for cell in section.two_cells() for piece in cell.pieces if len(piece) >= 3],
        'polylines': [points_attr(cell.points) for cell in section.one_cells()],
        'dots': dots,
        'generators': generators,
        'origin': {'cx': _px(ox), 'cy': _px(oy)},
    }


def render_svg_text(sections: Sequence[SpanSection], labels: Sequence[str] = None,
                    scale: int = None, margin: int = None, gap: int = None) -> str:
    scale = scale or Config.SVG_SCALE
    margin = Config.SVG_MARGIN if margin is None else margin
    gap = Config.SVG_PANEL_GAP if gap is None else gap
    labels = list(labels or [])
    panels = []
    offset = Fraction(0)
    for index, section in enumerate(sections):
        label = labels[index] if index < len(labels) else ''
        panel = _panel(section, label, 0, scale, margin)
        panel['offset'] = _px(offset)
        panels.append(panel)
        offset += panel['raw_width'] + gap
    if panels:
        width = offset - gap
        height = max(p['raw_height'] for p in panels) + (24 if labels else 0)
    else:
        width = height = Fraction(2 * scale)
    template = _env.get_template('section.svg.j2')
    return template.render(width=_px(width), height=_px(height), panels=panels)


def render_svg(sections: Sequence[SpanSection], path, labels: Sequence[str] = None, **options) -> str:
    text = render_svg_text(sections, labels, **options)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(text)
    logger.info('wrote %d-panel figure to %s', len(sections), path)
    return str(path)

"""Deterministic SVG figures for sweep results and code layouts."""
from enum import Enum
from typing import List, Sequence

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt
from matplotlib.patches import Polygon

from .results import group
from ..codes import CodeInstance, face_qubits
from ..exceptions import ParameterError
from ..montecarlo import ExperimentPoint, improvement_ratio, logical_bias
from ..noise import QubitType
from ..pauli import Letter

matplotlib.rcParams['svg.hashsalt'] = 'heteroqec'
matplotlib.rcParams['svg.fonttype'] = 'path'

_FACE_COLOURS = {Letter.X: '#f4a582', Letter.Y: '#92c5de', Letter.Z: '#b8e186'}
_TYPE_COLOURS = {QubitType.TYPE_A: '#d6604d', QubitType.TYPE_B: '#4393c3'}
_CLASS_MARKERS = {Letter.X: 'o', Letter.Y: 's', Letter.Z: '^'}


class PlotKind(Enum):
    FAILURE_VS_P = 'failure-vs-p'
    RATIO_VS_D = 'ratio-vs-d'
    DISAGGREGATED = 'disaggregated'


def _save(figure, path: str, config_hash: str = None) -> None:
    metadata = {'Date': None}
    if config_hash:
        metadata['Description'] = f'config {config_hash}'
    figure.savefig(path, format='svg', metadata=metadata)
    plt.close(figure)


def _axes(count: int):
    figure, axes = plt.subplots(1, count, figsize=(5 * count, 4), squeeze=False)
    return figure, list(axes[0])


def _title(key: tuple) -> str:
    regime, placement, deformation, eta_low, eta_high = key[:5]
    eta = eta_low if eta_low == eta_high else f'{eta_low}/{eta_high}'
    return f'{regime} {placement} {deformation} eta={eta}'


def _error_bars(points: Sequence[ExperimentPoint]):
    lower, upper = [], []
    for point in points:
        lo, hi = point.wilson
        lower.append(point.p_fail - lo)
        upper.append(hi - point.p_fail)
    return [lower, upper]


def plot_failure_vs_p(points: List[ExperimentPoint], path: str, config_hash: str = None) -> None:
    groups = group(points)
    figure, axes = _axes(len(groups))
    for ax, (key, members) in zip(axes, groups.items()):
        for d, series in sorted(group(members, ('d',)).items()):
            series = sorted(series, key=lambda point: point.p)
            ax.errorbar([point.p for point in series], [point.p_fail for point in series],
                        yerr=_error_bars(series), marker='o', capsize=2, label=f'd = {d[0]}')
        ax.set_yscale('log')
        ax.set_xlabel('p' if key[0] != 'A' else 'p_noisy')
        ax.set_ylabel('logical failure rate')
        ax.set_title(_title(key))
        ax.legend()
    figure.tight_layout()
    _save(figure, path, config_hash)


def plot_ratio_vs_d(points: List[ExperimentPoint], path: str, config_hash: str = None) -> None:
    figure, axes = _axes(1)
    ax = axes[0]
    plotted = 0
    for key, members in group(points, ('regime', 'deformation', 'eta_low', 'eta_high', 'p')).items():
        by_placement = group(members, ('placement',))
        boundary, bulk = by_placement.get(('BoundaryNoisy',)), by_placement.get(('BulkNoisy',))
        if not boundary or not bulk:
            continue
        series = improvement_ratio(boundary, bulk)
        entries = [entry for entry in series.entries if entry.ratio is not None]
        two_sided = [entry for entry in entries if entry.bound is None]
        label = f'eta={key[2] if key[2] == key[3] else key[3]}, p={key[4]}'
        line = ax.errorbar([entry.d for entry in two_sided], [entry.ratio for entry in two_sided],
                           yerr=[entry.sigma for entry in two_sided], marker='o', capsize=2, label=label)
        for bound, marker in (('lower', '^'), ('upper', 'v')):
            bounds = [entry for entry in entries if entry.bound == bound]
            if bounds:
                ax.scatter([entry.d for entry in bounds], [entry.ratio for entry in bounds], marker=marker,
                           color=line[0].get_color())
        plotted += 1
    if not plotted:
        plt.close(figure)
        raise ParameterError('ratio-vs-d needs BoundaryNoisy and BulkNoisy points at matching parameters')
    ax.axhline(1, color='grey', linewidth=0.8)
    ax.set_yscale('log')
    ax.set_xlabel('d')
    ax.set_ylabel('p_L(BoundaryNoisy) / p_L(BulkNoisy)')
    ax.legend()
    figure.tight_layout()
    _save(figure, path, config_hash)


def plot_disaggregated(points: List[ExperimentPoint], path: str, config_hash: str = None) -> None:
    groups = group(points, ('regime', 'placement', 'deformation', 'eta_low', 'eta_high', 'p'))
    figure, axes = _axes(len(groups))
    for ax, (key, members) in zip(axes, groups.items()):
        members = sorted(members, key=lambda point: point.d)
        for letter, marker in _CLASS_MARKERS.items():
            ax.plot([point.d for point in members], [point.rate(letter) for point in members], marker=marker,
                    label=f'{letter.value}_L')
        for point in members:
            bias = logical_bias(point)
            prefix = '>' if bias.bound == 'lower' else ''
            ax.annotate(f'eta_L {prefix}{bias.eta_l:.2g}', (point.d, point.rate(Letter.Z)), fontsize=7,
                        textcoords='offset points', xytext=(0, 6), ha='center')
        ax.set_yscale('log')
        ax.set_xlabel('d')
        ax.set_ylabel('logical error rate')
        ax.set_title(f'{_title(key)} p={key[5]}')
        ax.legend()
    figure.tight_layout()
    _save(figure, path, config_hash)


def plot(kind, points: List[ExperimentPoint], path: str, config_hash: str = None) -> None:
    try:
        kind = PlotKind(kind)
    except ValueError:
        raise ParameterError(f'unknown plot kind {kind!r}, expected one of {[k.value for k in PlotKind]}')
    if not points:
        raise ParameterError('no points selected; nothing to plot')
    {
        PlotKind.FAILURE_VS_P: plot_failure_vs_p,
        PlotKind.RATIO_VS_D: plot_ratio_vs_d,
        PlotKind.DISAGGREGATED: plot_disaggregated,
    }[kind](points, path, config_hash)


def plot_layout(code: CodeInstance, types: Sequence[QubitType], path: str) -> None:
    """Faces coloured by stabilizer type, qubits by qubit type; row 0 at the top."""
    d = code.d
    figure, axes = _axes(1)
    ax = axes[0]
    for stabilizer in code.stabilizers:
        r, c = stabilizer.face
        corners = [(col, -row) for row, col in face_qubits(d, r, c)]
        if len(corners) == 2:
            # boundary faces drawn as triangles bulging outwards
            (x0, y0), (x1, y1) = corners
            mid_x, mid_y = (x0 + x1) / 2, (y0 + y1) / 2
            out_x = -0.5 if c == -1 else 0.5 if c == d - 1 else 0
            out_y = 0.5 if r == -1 else -0.5 if r == d - 1 else 0
            corners = [(x0, y0), (mid_x + out_x, mid_y + out_y), (x1, y1)]
        else:
            corners = [corners[0], corners[1], corners[3], corners[2]]
        ax.add_patch(Polygon(corners, closed=True, facecolor=_FACE_COLOURS[stabilizer.kind], edgecolor='black',
                             linewidth=0.6))
    for qubit_type, colour in _TYPE_COLOURS.items():
        cells = [code.geometry[q] for q in range(code.n) if types[q] is qubit_type]
        ax.scatter([qubit.col for qubit in cells], [-qubit.row for qubit in cells], s=60, color=colour,
                   edgecolors='black', zorder=3, label=f'type {qubit_type.value}')
    ax.set_aspect('equal')
    ax.set_xlim(-1, d)
    ax.set_ylim(-d, 1)
    ax.axis('off')
    ax.legend(loc='upper right', bbox_to_anchor=(1.3, 1))
    ax.set_title(f'd = {d} {code.deformation.value}')
    _save(figure, path)

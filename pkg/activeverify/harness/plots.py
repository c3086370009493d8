# Author: Johnny Chou
# Email: johnny071531@gmail.com
# Project: activeverify


from __future__ import annotations

import logging
from pathlib import Path

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt
from matplotlib.figure import Figure

from ..logging import LogConfig
from .report import ComparisonReport


LOGGER = logging.getLogger(__name__)
LOGGER.addFilter(LogConfig.PREFIX_FILTER)

BAND = 0.5
"""Half-width of the shaded band, in standard deviations."""

SVG_PARAMS = {'svg.hashsalt': 'activeverify', 'svg.fonttype': 'path'}

PLOTS = {
    'error': ('error.svg', 'Total misclassification error'),
    'filtered_error': ('filtered_error.svg', 'Misclassification error, confident locations'),
    'winrate': ('winrate.svg', 'Runs where the reference matches or beats'),
}


def build_figure(report: ComparisonReport, kind: str) -> Figure:
    """
    One comparison figure: `error` and `filtered_error` draw mean curves with
    bands of +-0.5 std against `|L|`; `winrate` draws the fraction of runs won.
    """
    if kind not in PLOTS:
        raise ValueError(f'Unknown plot "{kind}", expected one of {list(PLOTS)}.')
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    ax.set_xlabel('Training set size |L|')
    ax.set_ylabel(PLOTS[kind][1])
    if kind == 'winrate':
        for w in report.winrates:
            if w.competitor == report.reference:
                continue
            keep = w.runs > 0
            ax.plot(
                w.training_size[keep], w.win_rate[keep],
                marker='o', ms=3, label=f'vs {w.competitor}', gid=f'winrate-{w.competitor}'
            )
        ax.set_ylim(-0.02, 1.02)
    else:
        for c in report.curves:
            mean = c.error_mean if kind == 'error' else c.filtered_error_mean
            std = c.error_std if kind == 'error' else c.filtered_error_std
            keep = c.runs > 0
            x, m, s = c.training_size[keep], mean[keep], std[keep]
            (line,) = ax.plot(x, m, label=c.label, gid=f'{kind}-{c.label}')
            ax.fill_between(x, m - BAND * s, m + BAND * s, color=line.get_color(), alpha=0.2, linewidth=0)
    if ax.get_legend_handles_labels()[0]:
        ax.legend(loc='best', fontsize='small')
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    return fig


def render_plots(report: ComparisonReport, out_dir: str | Path) -> list[Path]:
    """Write every comparison figure as SVG; identical reports give identical bytes."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    with matplotlib.rc_context(SVG_PARAMS):
        for kind, (name, _) in PLOTS.items():
            fig = build_figure(report, kind)
            path = out_dir / name
            fig.savefig(path, format='svg', metadata={'Date': None})
            plt.close(fig)
            paths.append(path)
    LOGGER.info('Wrote %d plots to %s.', len(paths), out_dir)
    return paths

# Copyright (c) 2026 motionseg authors
# GNU General Public License v3.0+ (see COPYING or https://www.gnu.org/licenses/gpl-3.0.txt)

from __future__ import absolute_import, division, print_function
__metaclass__ = type

import os

import matplotlib
matplotlib.use('Agg')
import matplotlib.pyplot as plt  # noqa: E402

from motionseg.module_utils.common import display, ensure_dir  # noqa: E402


def plot_histograms(histograms, path, level='element'):
    """Bar chart of NLD histograms, one panel per method."""
    methods = [m for m in histograms if level in histograms[m]]
    if not methods:
        return None
    fig, axes = plt.subplots(1, len(methods), figsize=(3.2 * len(methods), 2.8),
                             sharey=True, squeeze=False)
    for ax, method in zip(axes[0], methods):
        data = histograms[method][level]
        edges = data['edges']
        widths = [b - a for a, b in zip(edges[:-1], edges[1:])]
        ax.bar(edges[:-1], data['counts'], width=widths, align='edge', edgecolor='black')
        ax.set_xlim(0.0, 1.0)
        ax.set_title(method)
        ax.set_xlabel('NLD')
    axes[0][0].set_ylabel('trials')
    fig.tight_layout()
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    fig.savefig(path, dpi=120)
    plt.close(fig)
    display.vvv("MOTIONSEG-REPORT-DEBUG: wrote %s" % path)
    return path


def plot_timeline(intervals, path, rate_hz=None, title=None):
    """Coloured class intervals, one row per sequence.

    Arguments:
        intervals {list} -- (sequence id, [(start, end, class), ...]) per row
        path {str} -- output image
        rate_hz {float} -- when set the x axis is in seconds
    """
    if not intervals:
        return None
    cmap = plt.get_cmap('tab20')
    scale = 1.0 / rate_hz if rate_hz else 1.0
    fig, ax = plt.subplots(figsize=(10, 0.25 * len(intervals) + 1.2))
    for row, (_, spans) in enumerate(intervals):
        bars = [(start * scale, (end - start) * scale) for start, end, _ in spans]
        colors = [cmap(int(c) % cmap.N) for _, _, c in spans]
        ax.broken_barh(bars, (row - 0.4, 0.8), facecolors=colors)
    ax.set_yticks(range(len(intervals)))
    ax.set_yticklabels([sid for sid, _ in intervals], fontsize=6)
    ax.invert_yaxis()
    ax.set_xlabel('time (s)' if rate_hz else 'timestep')
    if title:
        ax.set_title(title)
    fig.tight_layout()
    ensure_dir(os.path.dirname(os.path.abspath(path)))
    fig.savefig(path, dpi=120)
    plt.close(fig)
    display.vvv("MOTIONSEG-REPORT-DEBUG: wrote %s" % path)
    return path

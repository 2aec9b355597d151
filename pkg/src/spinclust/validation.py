"""Cross-validation of sweep results: likelihood curves, ARI curves, phases.

The temperature axis is segmented by reading the susceptibility: every
prominent peak marks a transition, the window between the first and last
peak is the super-paramagnetic regime, and the report tabulates cluster
sizes per segment.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.signal import find_peaks

from .dataset import CorrelationMatrix
from .errors import DomainError, InsufficientGridError
from .evaluation import adjusted_rand_index
from .fspc import likelihood
from .spc import TemperatureStats

PEAK_FRACTION = 0.1  # a peak counts if it reaches 10% of the global chi maximum


def lc_vs_temperature(sweep: list[TemperatureStats],
                      corr: CorrelationMatrix) -> list[tuple[float, float]]:
    """Likelihood of each temperature's extracted labeling."""
    if not sweep:
        raise DomainError("sweep is empty")
    n = corr.values.shape[0]
    if sweep[0].labeling.size != n:
        raise DomainError("sweep labelings and correlation matrix disagree on N")
    return [(st.temperature, likelihood(st.labeling, corr)) for st in sweep]


def ari_vs_temperature(sweep: list[TemperatureStats],
                       reference) -> list[tuple[float, float]]:
    """ARI of each temperature's labeling against a reference labeling."""
    reference = np.asarray(reference)
    if not sweep:
        raise DomainError("sweep is empty")
    if sweep[0].labeling.size != reference.size:
        raise DomainError("reference labeling length does not match sweep")
    return [(st.temperature, adjusted_rand_index(st.labeling, reference))
            for st in sweep]


@dataclass
class PhaseReport:
    """Chi peaks and the induced ferro / super-paramagnetic / para segments."""

    temperatures: list[float]
    chi: list[float]
    peaks: list[tuple[float, float]]            # (T, chi) at each prominent peak
    sp_window: tuple[float, float] | None       # first to last peak temperature
    segments: dict[str, list[float]]            # phase name -> grid temperatures
    cluster_sizes: dict[str, list[tuple[float, list[int]]]] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"kind": "phase_report",
                "temperatures": self.temperatures,
                "chi": self.chi,
                "peaks": [{"T": t, "chi": c} for t, c in self.peaks],
                "sp_window": list(self.sp_window) if self.sp_window else None,
                "segments": self.segments,
                "cluster_sizes": {seg: [{"T": t, "sizes": sizes} for t, sizes in rows]
                                  for seg, rows in self.cluster_sizes.items()}}

    def to_markdown(self) -> str:
        lines = ["# Phase report", ""]
        if not self.peaks:
            lines.append("No prominent susceptibility peaks; no transitions detected.")
            lines.append("")
        else:
            lines.append(f"Susceptibility peaks at: "
                         + ", ".join(f"T={t:g} (chi={c:.4g})" for t, c in self.peaks))
            lo, hi = self.sp_window
            lines.append(f"Super-paramagnetic window: [{lo:g}, {hi:g}]")
            lines.append("")
        for seg in ("ferromagnetic", "super_paramagnetic", "paramagnetic"):
            ts = self.segments.get(seg, [])
            lines.append(f"## {seg} ({len(ts)} grid points)")
            lines.append("")
            if ts:
                lines.append("| T | cluster sizes (top 8) |")
                lines.append("|---|---|")
                for t, sizes in self.cluster_sizes.get(seg, []):
                    head = ", ".join(str(s) for s in sizes[:8])
                    more = " ..." if len(sizes) > 8 else ""
                    lines.append(f"| {t:g} | {head}{more} |")
            lines.append("")
        return "\n".join(lines)


def phase_report(sweep: list[TemperatureStats]) -> PhaseReport:
    """Locate chi peaks and split the grid into the three phases.

    The ferromagnetic segment runs up to (not including) the first peak,
    the super-paramagnetic segment spans first to last peak inclusive, and
    the paramagnetic segment follows. Without any prominent peak the whole
    grid is reported as a single unsegmented span.
    """
    if len(sweep) < 3:
        raise InsufficientGridError("phase_report needs at least 3 grid points")
    ts = [st.temperature for st in sweep]
    chi = np.array([st.susceptibility for st in sweep])
    height = PEAK_FRACTION * chi.max() if chi.max() > 0 else np.inf
    idx, _ = find_peaks(chi, height=height)
    peaks = [(ts[i], float(chi[i])) for i in idx]

    segments: dict[str, list[float]] = {"ferromagnetic": [], "super_paramagnetic": [],
                                        "paramagnetic": []}
    sp_window = None
    if peaks:
        lo, hi = peaks[0][0], peaks[-1][0]
        sp_window = (lo, hi)
        for t in ts:
            if t < lo:
                segments["ferromagnetic"].append(t)
            elif t <= hi:
                segments["super_paramagnetic"].append(t)
            else:
                segments["paramagnetic"].append(t)
    else:
        segments["paramagnetic"] = list(ts)

    sizes: dict[str, list[tuple[float, list[int]]]] = {}
    by_t = {st.temperature: st.cluster_sizes for st in sweep}
    for seg, seg_ts in segments.items():
        sizes[seg] = [(t, by_t[t]) for t in seg_ts]
    return PhaseReport(list(ts), chi.tolist(), peaks, sp_window, segments, sizes)

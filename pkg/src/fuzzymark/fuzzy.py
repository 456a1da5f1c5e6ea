"""Mamdani fuzzy engine mapping feature maps to embedding strength.

Saliency, edge concentration and intensity each get a low/medium/high term
set. Saliency and intensity terms are fixed parametric shapes; the edge
terms are fitted per image by fuzzy c-means over the edge-concentration
samples. Twenty-seven rules (written compactly with any/not_ antecedents)
pick among five output strength levels on [0.1, 0.27]; inference is min-max
with centroid defuzzification.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

OUTPUT_TERMS = ("very_weak", "weak", "moderate", "strong", "very_strong")
_ATOMIC = ("low", "medium", "high")


@dataclass(frozen=True)
class MF:
    """Membership function: gauss(mu, sigma), s(foot, shoulder) rising,
    or z(shoulder, foot) falling."""

    shape: str
    p1: float
    p2: float

    def __call__(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.shape == "gauss":
            return np.exp(-((x - self.p1) ** 2) / (2.0 * self.p2**2))
        if self.shape == "s":
            return _smf(x, self.p1, self.p2)
        if self.shape == "z":
            return 1.0 - _smf(x, self.p1, self.p2)
        raise ValueError(f"unknown membership shape {self.shape!r}")


def _smf(x, a, b):
    """Smooth step, 0 at/below a and 1 at/above b (quadratic splines)."""
    if b <= a:
        return (x >= a).astype(np.float64)
    t = np.clip((x - a) / (b - a), 0.0, 1.0)
    return np.where(t < 0.5, 2.0 * t * t, 1.0 - 2.0 * (1.0 - t) ** 2)


@dataclass(frozen=True)
class TermSet:
    low: MF
    medium: MF
    high: MF

    def membership(self, term: str, x):
        """Evaluate a rule antecedent: low/medium/high, not_low/not_high/any."""
        if term == "any":
            return np.ones_like(np.asarray(x, dtype=np.float64))
        if term.startswith("not_"):
            return 1.0 - self.membership(term[4:], x)
        return getattr(self, term)(x)


@dataclass(frozen=True)
class Rule:
    saliency: str
    edge: str
    intensity: str
    consequent: str


@dataclass
class FcmResult:
    centers: np.ndarray
    memberships: np.ndarray  # (n_samples, n_clusters), rows sum to 1
    objective: float
    iterations: int
    history: list = field(default_factory=list)


def fcm(samples, clusters, m=2.0, tol=1e-6, max_iter=300, seed=0):
    """Fuzzy c-means on 1-D data with seeded quantile initialization."""
    x = np.asarray(samples, dtype=np.float64).ravel()
    if clusters < 2:
        raise ValueError("need at least 2 clusters")
    if m <= 1.0:
        raise ValueError("fuzzifier m must be > 1")
    if np.unique(x).size < clusters:
        raise ValueError(
            f"need at least {clusters} distinct samples, got {np.unique(x).size}"
        )
    rng = np.random.default_rng(seed)
    levels = np.sort(rng.uniform(0.0, 1.0, clusters))
    centers = np.quantile(x, levels)
    span = x.max() - x.min()
    # quantiles of heavily repeated data may coincide; force distinct starts
    for k in range(1, clusters):
        if centers[k] <= centers[k - 1]:
            centers[k] = centers[k - 1] + max(span, 1.0) * 1e-9

    exponent = 1.0 / (m - 1.0)
    history = []
    u = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = (x[:, None] - centers[None, :]) ** 2
        zero = d2 < 1e-300
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = d2 ** (-exponent)
            u = inv / inv.sum(axis=1, keepdims=True)
        hit = zero.any(axis=1)
        if hit.any():
            u[hit] = zero[hit] / zero[hit].sum(axis=1, keepdims=True)
        um = u**m
        history.append(float((um * d2).sum()))
        new_centers = (um.T @ x) / um.sum(axis=0)
        shift = np.abs(new_centers - centers).max()
        centers = new_centers
        if shift < tol:
            break
    return FcmResult(centers, u, history[-1], iterations, history)


def _weighted_stats(x, w):
    total = w.sum()
    mean = float((w * x).sum() / total)
    var = float((w * (x - mean) ** 2).sum() / total)
    return mean, max(np.sqrt(var), 1e-4)


def _bhattacharyya(m1, s1, m2, s2):
    ss = s1 * s1 + s2 * s2
    return np.sqrt(2.0 * s1 * s2 / ss) * np.exp(-((m1 - m2) ** 2) / (4.0 * ss))


def build_edge_mfs(samples, clusters=9, m=2.0, tol=1e-6, max_iter=300, seed=0) -> TermSet:
    """Cluster edge-concentration samples and derive low/medium/high terms.

    The clusters are fitted as weighted Gaussians, sorted, and greedily
    merged (most Bhattacharyya overlap first) down to three groups. The
    final merge prefers splits where every group keeps >= 15% of the
    membership mass. low/high become z/s shoulders at the outer group
    means, medium a Gaussian at the middle group.
    """
    x = np.asarray(samples, dtype=np.float64).ravel()
    result = fcm(x, clusters, m=m, tol=tol, max_iter=max_iter, seed=seed)
    order = np.argsort(result.centers)
    weights = [result.memberships[:, k].copy() for k in order]

    while len(weights) > 3:
        stats = [_weighted_stats(x, w) for w in weights]
        pairs = [
            (_bhattacharyya(*stats[i], *stats[i + 1]), i)
            for i in range(len(weights) - 1)
        ]
        pairs.sort(key=lambda p: (-p[0], p[1]))
        pick = pairs[0][1]
        if len(weights) == 4:
            total = x.size
            best_floor = -1.0
            for _, i in pairs:
                merged = [w.sum() for w in weights[:i]] + [
                    weights[i].sum() + weights[i + 1].sum()
                ] + [w.sum() for w in weights[i + 2 :]]
                floor = min(merged) / total
                if floor >= 0.15:
                    pick = i
                    break
                if floor > best_floor:
                    best_floor, pick = floor, i
        weights[pick : pick + 2] = [weights[pick] + weights[pick + 1]]

    (m_lo, s_lo), (m_md, s_md), (m_hi, s_hi) = [_weighted_stats(x, w) for w in weights]
    return TermSet(
        low=MF("z", m_lo, m_lo + 2.0 * s_lo),
        medium=MF("gauss", m_md, s_md),
        high=MF("s", m_hi - 2.0 * s_hi, m_hi),
    )


@dataclass
class FisConfig:
    saliency: TermSet
    intensity: TermSet
    outputs: dict  # name -> MF, keys == OUTPUT_TERMS
    rules: tuple
    universe: np.ndarray
    edge: TermSet | None = None  # None: fit per image with fcm
    fcm_clusters: int = 9
    fcm_m: float = 2.0
    fcm_tol: float = 1e-6
    fcm_max_iter: int = 300
    fcm_seed: int = 0

    def edge_terms_for(self, edge_map) -> TermSet:
        """The edge term set for one image: fixed, or fitted to its samples."""
        if self.edge is not None:
            return self.edge
        return build_edge_mfs(
            edge_map,
            clusters=self.fcm_clusters,
            m=self.fcm_m,
            tol=self.fcm_tol,
            max_iter=self.fcm_max_iter,
            seed=self.fcm_seed,
        )


def _mf_from_list(spec):
    shape, p1, p2 = spec
    if shape not in ("gauss", "s", "z"):
        raise ValueError(f"unknown membership shape {shape!r}")
    return MF(shape, float(p1), float(p2))


def _term_set_from_dict(d):
    return TermSet(**{k: _mf_from_list(d[k]) for k in _ATOMIC})


def load_fis(config: dict) -> FisConfig:
    """Build a FisConfig from a parsed JSON dict (see data/default_fis.json)."""
    uni = config["universe"]
    lo, hi, n = float(uni["lo"]), float(uni["hi"]), int(uni["samples"])
    if not (lo < hi and n >= 2):
        raise ValueError(f"bad output universe {uni}")
    rules = []
    for entry in config["rules"]:
        rule = Rule(*entry)
        for term, allowed_not in (
            (rule.saliency, True), (rule.edge, True), (rule.intensity, True),
        ):
            base = term[4:] if term.startswith("not_") else term
            if term != "any" and base not in _ATOMIC:
                raise ValueError(f"bad rule antecedent {term!r}")
        if rule.consequent not in OUTPUT_TERMS:
            raise ValueError(f"bad rule consequent {rule.consequent!r}")
        rules.append(rule)
    outputs = {name: _mf_from_list(config["outputs"][name]) for name in OUTPUT_TERMS}
    edge_spec = config["inputs"]["edge"]
    fcm_cfg = config.get("fcm", {})
    return FisConfig(
        saliency=_term_set_from_dict(config["inputs"]["saliency"]),
        intensity=_term_set_from_dict(config["inputs"]["intensity"]),
        outputs=outputs,
        rules=tuple(rules),
        universe=np.linspace(lo, hi, n),
        edge=None if edge_spec == "fcm" else _term_set_from_dict(edge_spec),
        fcm_clusters=int(fcm_cfg.get("clusters", 9)),
        fcm_m=float(fcm_cfg.get("m", 2.0)),
        fcm_tol=float(fcm_cfg.get("tol", 1e-6)),
        fcm_max_iter=int(fcm_cfg.get("max_iter", 300)),
        fcm_seed=int(fcm_cfg.get("seed", 0)),
    )


def default_fis() -> FisConfig:
    """The bundled rule base and membership parameters."""
    text = resources.files("fuzzymark.data").joinpath("default_fis.json").read_text()
    return load_fis(json.loads(text))


def rule_strengths(fis: FisConfig, edge_terms: TermSet, sal, edge, inten):
    """Firing level of every rule; min over the three antecedents."""
    sal = np.asarray(sal, dtype=np.float64)
    out = np.empty((len(fis.rules),) + sal.shape)
    for r, rule in enumerate(fis.rules):
        w = np.minimum(
            fis.saliency.membership(rule.saliency, sal),
            edge_terms.membership(rule.edge, edge),
        )
        out[r] = np.minimum(w, fis.intensity.membership(rule.intensity, inten))
    return out


def aggregate(fis: FisConfig, edge_terms: TermSet, sal, edge, inten) -> np.ndarray:
    """Mamdani min-max aggregation, sampled on the output universe."""
    firing = rule_strengths(fis, edge_terms, float(sal), float(edge), float(inten))
    ys = np.zeros_like(fis.universe)
    for r, rule in enumerate(fis.rules):
        clipped = np.minimum(firing[r], fis.outputs[rule.consequent](fis.universe))
        ys = np.maximum(ys, clipped)
    return ys


def defuzz(xs: np.ndarray, ys: np.ndarray) -> float:
    """Centroid of a sampled fuzzy set; an empty set falls to the low end."""
    total = ys.sum()
    if total <= 0.0:
        return float(xs[0])
    return float((xs * ys).sum() / total)


def strength_map(fis: FisConfig, sal, edge, inten, edge_terms=None) -> np.ndarray:
    """Per-cell embedding strength from the three 64x64 feature maps."""
    sal = np.asarray(sal, dtype=np.float64)
    edge = np.asarray(edge, dtype=np.float64)
    inten = np.asarray(inten, dtype=np.float64)
    if not sal.shape == edge.shape == inten.shape:
        raise ValueError("feature maps must share a shape")
    if edge_terms is None:
        edge_terms = fis.edge_terms_for(edge.ravel())

    shape = sal.shape
    firing = rule_strengths(
        fis, edge_terms, sal.ravel(), edge.ravel(), inten.ravel()
    )  # (n_rules, n_cells)
    levels = {name: None for name in OUTPUT_TERMS}
    for r, rule in enumerate(fis.rules):
        cur = levels[rule.consequent]
        levels[rule.consequent] = firing[r] if cur is None else np.maximum(cur, firing[r])

    xs = fis.universe
    agg = np.zeros((sal.size, xs.size))
    for name in OUTPUT_TERMS:
        if levels[name] is None:
            continue
        np.maximum(agg, np.minimum(levels[name][:, None], fis.outputs[name](xs)[None, :]), out=agg)
    mass = agg.sum(axis=1)
    centroid = np.where(mass > 0.0, (agg * xs[None, :]).sum(axis=1) / np.where(mass > 0, mass, 1.0), xs[0])
    return centroid.reshape(shape)

"""Synthetic signed networks with tunable emotion, diffusion and personality signal.

Generation, all randomness drawn from named streams of ``cfg.seed``:

1. Each user gets latent optimism and pessimism, independently, from a
   two-mode Beta mixture.
2. Ratings. Items are either low- or high-quality. On a low item a user
   gives a high score with a probability that, at personality strength
   ``s``, mixes ``s`` parts of the user's latent optimism with ``1 - s``
   parts of the population mean; high items and pessimism likewise.
3. Links. Sources are drawn with a rate that grows with both latent
   traits at personality strength above zero. A share ``0.5 * s_diffusion`` of the links close a path
   ``i -> k -> j`` through an existing followee ``k``; the rest are
   placed uniformly.
4. Emotions. A share ``0.9 * s_emotion`` of the emotion pairs sit on
   linked pairs, the rest on uniform random pairs. Each pair draws a
   latent affect and splits a random total count into positive and
   negative emotions by it.
5. Signs follow a logistic model over the pairwise feature blocks (emotion,
   diffusion, personality) with block weights scaled by the strengths. The
   diffusion block depends on the signs themselves, so signs are refined
   over a few synchronous sweeps with common random numbers. The intercept
   is solved each sweep so the expected positive share hits the target.
6. Each sign flips with probability ``noise``.

With every strength at zero, link placement, emotions and ratings are all
independent of the signs, so no feature carries information about them.
"""

import json
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import InfeasibleConfig
from .features import di_features, ei_features
from .graph import build_network
from .io import InteractionLedger, RatingsTable, write_dataset
from .learn.logistic import sigmoid
from .personality import compute_scores
from .rng import stream

CLOSURE_SHARE = 0.5
EMOTION_ON_LINK_SHARE = 0.9
SIGN_SWEEPS = 4

# logistic weights of the sign model at strength 1
EMOTION_PAIR_WEIGHT = 6.0
EMOTION_USER_WEIGHT = 2.0
DIFFUSION_WEIGHT = 5.0
PERSONALITY_WEIGHT = 4.0
ACTIVITY_WEIGHT = 1.0


@dataclass(frozen=True)
class SynthConfig:
    n_users: int = 500
    n_items: int = 200
    density: float = 0.01
    pos_neg_ratio: float = 4.0
    emotion: float = 1.0
    diffusion: float = 1.0
    personality: float = 1.0
    noise: float = 0.0
    seed: int = 0
    ratings_per_user: int = 20
    emotion_pairs_per_link: float = 1.0

    def __post_init__(self):
        for name in ("emotion", "diffusion", "personality", "noise"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise InfeasibleConfig(f"{name} must lie in [0, 1], got {v}")
        if not 0.0 < self.density < 1.0:
            raise InfeasibleConfig(f"density must lie in (0, 1), got {self.density}")
        if self.pos_neg_ratio <= 0:
            raise InfeasibleConfig("pos_neg_ratio must be positive")
        if self.n_users < 3:
            raise InfeasibleConfig("need at least 3 users")
        if not 0 <= self.seed < 2**64:
            raise InfeasibleConfig("seed must be a non-negative 64-bit integer")
        if self.n_items < 2 or not 1 <= self.ratings_per_user <= self.n_items:
            raise InfeasibleConfig("ratings_per_user must be between 1 and n_items")

    @property
    def positive_share(self):
        return self.pos_neg_ratio / (1.0 + self.pos_neg_ratio)

    @property
    def expected_links(self):
        return self.density * self.n_users * (self.n_users - 1)

    def to_dict(self):
        return asdict(self)


@dataclass
class SyntheticData:
    network: object
    ledger: InteractionLedger
    ratings: RatingsTable
    helpfulness: list
    latent_optimism: np.ndarray
    latent_pessimism: np.ndarray
    config: SynthConfig

    def __iter__(self):
        return iter((self.network, self.ledger, self.ratings))

    def write(self, directory):
        """Write the four dataset files plus ``manifest.json``; returns paths."""
        from pathlib import Path

        paths = write_dataset(
            directory, self.network, self.ledger, self.ratings, self.helpfulness
        )
        manifest = Path(directory) / "manifest.json"
        doc = {"generator": "signet.synth", "config": self.config.to_dict()}
        manifest.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return paths + [manifest]


def _bimodal(rng, n):
    high = rng.random(n) < 0.5
    return np.where(high, rng.beta(6.0, 2.0, n), rng.beta(2.0, 6.0, n))


def _ratings(cfg, opt, pes):
    rng = stream(cfg.seed, "ratings")
    s = cfg.personality
    low_item = rng.random(cfg.n_items) < 0.5
    # population means of the latents are 0.5
    p_high_on_low = 0.05 + 0.5 * (s * opt + (1 - s) * 0.5)
    p_low_on_high = 0.05 + 0.5 * (s * pes + (1 - s) * 0.5)
    ratings = {}
    for u in range(cfg.n_users):
        items = np.sort(rng.choice(cfg.n_items, size=cfg.ratings_per_user, replace=False))
        draws = rng.random(len(items))
        values = rng.integers(0, 2, len(items))
        for k, d, v in zip(items.tolist(), draws.tolist(), values.tolist()):
            if low_item[k]:
                score = 4 + v if d < p_high_on_low[u] else 1 + v
            else:
                score = 2 + v if d < p_low_on_high[u] else 4 + v
            ratings[(u, k)] = score
    return RatingsTable(ratings, cfg.n_users, cfg.n_items, [f"i{k}" for k in range(cfg.n_items)])


def _links(cfg, opt, pes):
    rng = stream(cfg.seed, "links")
    n = cfg.n_users
    # optimists and pessimists both seek out relationships more actively
    activity = np.exp(cfg.personality * ACTIVITY_WEIGHT * (opt + pes - 1.0))
    activity /= activity.sum()
    m_total = int(round(cfg.expected_links))
    m_close = int(round(m_total * CLOSURE_SHARE * cfg.diffusion))
    m_base = m_total - m_close
    edges = set()
    while len(edges) < m_base:
        src = rng.choice(n, size=m_base - len(edges), p=activity)
        dst = rng.integers(0, n, size=m_base - len(edges))
        for a, b in zip(src.tolist(), dst.tolist()):
            if a != b:
                edges.add((a, b))
    out = [[] for _ in range(n)]
    for a, b in sorted(edges):
        out[a].append(b)
    base = sorted(edges)
    attempts = 0
    added = 0
    while added < m_close and attempts < 50 * (m_close + 1):
        attempts += 1
        i, k = base[int(rng.integers(len(base)))]
        if not out[k]:
            continue
        j = out[k][int(rng.integers(len(out[k])))]
        if j == i or (i, j) in edges:
            continue
        edges.add((i, j))
        added += 1
    return sorted(edges)


def _emotions(cfg, links):
    rng = stream(cfg.seed, "emotions")
    n = cfg.n_users
    m_emo = int(round(len(links) * cfg.emotion_pairs_per_link))
    m_on_links = min(len(links), int(round(m_emo * EMOTION_ON_LINK_SHARE * cfg.emotion)))
    chosen = set()
    if m_on_links:
        for r in rng.choice(len(links), size=m_on_links, replace=False).tolist():
            chosen.add(links[r])
    while len(chosen) < m_emo:
        a, b = (int(x) for x in rng.integers(0, n, size=2))
        if a != b:
            chosen.add((a, b))
    pos, neg = {}, {}
    for pair in sorted(chosen):
        positive = rng.random() < 0.75
        affect = rng.beta(5.0, 1.5) if positive else rng.beta(1.5, 5.0)
        total = 1 + int(rng.poisson(4.0))
        p = int(rng.binomial(total, affect))
        if p:
            pos[pair] = p
        if total - p:
            neg[pair] = total - p
    return InteractionLedger(pos, neg, n)


def _helpfulness_events(cfg, ledger):
    rng = stream(cfg.seed, "helpfulness")
    events = []
    for pair in sorted(set(ledger.pos) | set(ledger.neg)):
        scores = [4 + int(rng.integers(0, 2)) for _ in range(ledger.pos.get(pair, 0))]
        scores += [1 + int(rng.integers(0, 2)) for _ in range(ledger.neg.get(pair, 0))]
        for s in scores:
            events.append((pair[0], pair[1], s))
    return events


def _solve_intercept(z, target):
    lo, hi = -50.0, 50.0
    f = lambda b: float(np.mean(sigmoid(z + b))) - target
    return brentq(f, lo, hi, xtol=1e-12)


def _signs(cfg, links, ledger, scores):
    n_links = len(links)
    ei = np.array([ei_features(ledger, i, j) for i, j in links]).reshape(n_links, 6)
    o, p = scores.o, scores.p
    src = np.array([i for i, _ in links])
    dst = np.array([j for _, j in links])
    emotion_term = EMOTION_PAIR_WEIGHT * (ei[:, 1] - ei[:, 0]) + EMOTION_USER_WEIGHT * (
        ei[:, 3] - ei[:, 2] + ei[:, 5] - ei[:, 4]
    )
    personality_term = PERSONALITY_WEIGHT * (o[src] - p[src] + o[dst] - p[dst])
    static = cfg.emotion * emotion_term + cfg.personality * personality_term
    u = stream(cfg.seed, "signs").random(n_links)
    target = cfg.positive_share

    z = static
    signs = np.where(u < sigmoid(z + _solve_intercept(z, target)), 1, -1)
    if cfg.diffusion > 0:
        for _ in range(SIGN_SWEEPS):
            net = build_network(
                [(i, j, int(s)) for (i, j), s in zip(links, signs)], n_users=cfg.n_users
            )
            di = np.array([di_features(net, i, j) for i, j in links]).reshape(n_links, 2)
            z = static + cfg.diffusion * DIFFUSION_WEIGHT * (di[:, 1] - di[:, 0])
            signs = np.where(u < sigmoid(z + _solve_intercept(z, target)), 1, -1)
    if cfg.noise > 0:
        flip = stream(cfg.seed, "noise").random(n_links) < cfg.noise
        signs = np.where(flip, -signs, signs)
    return signs


def synth_generate(cfg):
    """Generate a :class:`SyntheticData` bundle; a pure function of ``cfg``."""
    neg_expected = cfg.expected_links * (1.0 - cfg.positive_share)
    if neg_expected < 10:
        raise InfeasibleConfig(
            f"configuration yields about {neg_expected:.1f} negative links; need at least 10"
        )
    rng = stream(cfg.seed, "latent")
    opt = _bimodal(rng, cfg.n_users)
    pes = _bimodal(rng, cfg.n_users)
    ratings = _ratings(cfg, opt, pes)
    scores = compute_scores(ratings, "rating", cfg.n_users)
    links = _links(cfg, opt, pes)
    ledger = _emotions(cfg, links)
    signs = _signs(cfg, links, ledger, scores)
    labels = [f"u{i}" for i in range(cfg.n_users)]
    net = build_network(
        [(i, j, int(s)) for (i, j), s in zip(links, signs)], n_users=cfg.n_users, labels=labels
    )
    if sum(1 for s in signs if s < 0) < 10:
        raise InfeasibleConfig("generated fewer than 10 negative links")
    events = _helpfulness_events(cfg, ledger)
    return SyntheticData(net, ledger, ratings, events, opt, pes, cfg)

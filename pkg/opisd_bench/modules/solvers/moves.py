"""Radiality-preserving moves. Every operator is a sequence of branch exchanges."""

import numpy as np

from ..network import RadialConfiguration, branch_exchange, detect_loop


def exchangeable_ids(net, cfg: RadialConfiguration) -> list:
    """Open branches whose closing creates a loop with at least one other branch."""
    return [b for b in net.ordered(cfg.open_ids) if b not in net.self_loop_ids]


def has_exchange(net, cfg: RadialConfiguration) -> bool:
    return bool(exchangeable_ids(net, cfg))


def open_only_in(net, cfg: RadialConfiguration, target: RadialConfiguration) -> list:
    """Branches open in `cfg` and closed in `target`, from the bitwise difference of their genes."""
    mask = cfg.genes(net) < target.genes(net)
    return [net.branches[i].id for i in np.flatnonzero(mask)]


def _pick(items, rng):
    return items[int(rng.integers(len(items)))]


def guided_exchange(net, cfg, close_id, target_open, rng):
    """Close `close_id`, then open a loop branch, preferring branches in `target_open`."""
    loop = detect_loop(net, cfg, close_id)[:-1]
    if not loop:
        return cfg
    preferred = [b for b in loop if b in target_open]
    return branch_exchange(net, cfg, close_id, _pick(preferred or list(loop), rng))


def random_exchange(net, cfg, rng):
    candidates = exchangeable_ids(net, cfg)
    if not candidates:
        return None
    return guided_exchange(net, cfg, _pick(candidates, rng), frozenset(), rng)


def gene_exchange(net, cfg, branch_id, rng):
    """Flip one gene through an exchange: close it if open, otherwise open it.

    Opening a closed branch needs an open branch whose loop contains it; bridges stay closed.
    """
    if branch_id in cfg.open_ids:
        if branch_id in net.self_loop_ids:
            return cfg
        return guided_exchange(net, cfg, branch_id, frozenset(), rng)

    candidates = [e for e in exchangeable_ids(net, cfg) if branch_id in detect_loop(net, cfg, e)]
    if not candidates:
        return cfg
    return branch_exchange(net, cfg, _pick(candidates, rng), branch_id)


def move_towards(net, cfg, target, n_moves, rng):
    """Apply up to `n_moves` exchanges that close branches open in `cfg` but closed in `target`."""
    for _ in range(n_moves):
        differing = open_only_in(net, cfg, target)
        if not differing:
            break
        cfg = guided_exchange(net, cfg, _pick(differing, rng), target.open_ids, rng)
    return cfg


def crossover(net, parent_a, parent_b, rng):
    """Child of `parent_a` that takes each differing open branch of `parent_b` with probability 1/2.

    Each step closes an open branch of parent A that parent B keeps closed, and repairs the loop
    by reopening a branch from parent B's open set when the loop holds one.
    """
    child = parent_a
    differing = open_only_in(net, parent_a, parent_b)
    for idx in rng.permutation(len(differing)):
        close_id = differing[idx]
        if close_id in child.open_ids and rng.random() < 0.5:
            child = guided_exchange(net, child, close_id, parent_b.open_ids, rng)
    return child


def mutate(net, cfg, p_m, rng):
    """Per-gene mutation: each of the B genes is selected with probability p_m."""
    n_genes = int(rng.binomial(net.n_branches, p_m)) if p_m > 0.0 else 0
    if n_genes == 0:
        return cfg
    for idx in rng.choice(net.n_branches, size=n_genes, replace=False):
        cfg = gene_exchange(net, cfg, net.branches[int(idx)].id, rng)
    return cfg

import itertools

import numpy as np

from gftmpnn.graph import new_graph


def random_connected_graph(rng, n, p=0.3, max_weight=2.0):
    """Random spanning tree plus extra edges; weights uniform in (0, max_weight]."""
    edges = {}
    order = rng.permutation(n)
    for idx in range(1, n):
        a, b = int(order[idx]), int(order[rng.integers(0, idx)])
        edges[(min(a, b), max(a, b))] = None
    for i, j in itertools.combinations(range(n), 2):
        if rng.random() < p:
            edges[(i, j)] = None
    weights = max_weight - rng.uniform(0.0, max_weight, size=len(edges))
    return new_graph(n, [(i, j, float(w)) for (i, j), w in zip(edges, weights)])


def assert_valid_eigensystem(eig, source, laplacian_input=False, check_sign=True):
    vals, vecs = eig.eigenvalues, eig.eigenvectors
    n = source.shape[0]
    assert vals.shape == (n,) and vecs.shape == (n, n)
    assert np.all(np.diff(vals) >= 0)
    assert np.max(np.abs(vecs.T @ vecs - np.eye(n))) <= 1e-8
    scale = max(1.0, float(np.max(np.sum(np.abs(source), axis=1))))
    assert np.max(np.abs(source @ vecs - vecs * vals)) <= 1e-8 * scale
    if laplacian_input:
        assert vals.min() >= -1e-10
        assert vals[0] <= 1e-10
    if check_sign:
        for k in range(n):
            first = vecs[np.flatnonzero(np.abs(vecs[:, k]) > 1e-9)[0], k]
            assert first > 0


def relu_masks(p, x, adjacency, eig):
    """Signs of every ReLU input, used to detect finite differences that cross a kink."""
    from gftmpnn.mpnn import forward

    t = forward(p, x, adjacency, eig)
    z1 = x @ p.W_mp1 + p.b_mp1
    z2 = t.aggregated @ p.W_mp2 + p.b_mp2
    z4 = t.h3 @ p.W_fc1 + p.b_fc1
    return np.concatenate([(z > 0).ravel() for z in (z1, z2, z4)])


def gradient_check(seed, n=12, d=8, h=6, c=3, step=1e-5):
    """Max relative error of analytic vs central-difference gradients on one random instance.

    Returns (max_rel_err, checked, skipped). Entries whose perturbation flips a
    ReLU mask are skipped: the loss is not differentiable across the kink.
    """
    from gftmpnn.graph import laplacian
    from gftmpnn.mpnn import backward, cross_entropy, effective_adjacency, forward, init_model
    from gftmpnn.spectral import eigendecompose_symmetric

    rng = np.random.default_rng(seed)
    g = random_connected_graph(rng, n)
    adj = effective_adjacency(g, "normalized")
    eig = eigendecompose_symmetric(laplacian(g))
    x = rng.uniform(0.0, 1.0, size=(n, d))
    y = rng.integers(0, c, size=n)
    p = init_model(d, h, n, c, seed)
    # Move away from the trivial init so every parameter gets a non-zero gradient.
    p.g = rng.uniform(0.5, 1.5, size=n)
    for name in ("b_mp1", "b_mp2", "b_fc1", "b_fc2"):
        setattr(p, name, rng.normal(0.0, 0.1, size=getattr(p, name).shape))

    trace = forward(p, x, adj, eig)
    grads = backward(p, trace, x, adj, eig, y)
    base_mask = relu_masks(p, x, adj, eig)
    worst, checked, skipped = 0.0, 0, 0
    for name, value in p.items():
        analytic = getattr(grads, name)
        for idx in np.ndindex(value.shape):
            losses, masks_ok = [], True
            for sign in (1.0, -1.0):
                q = p.copy()
                getattr(q, name)[idx] += sign * step
                masks_ok &= bool(np.array_equal(relu_masks(q, x, adj, eig), base_mask))
                losses.append(cross_entropy(forward(q, x, adj, eig).probs, y))
            if not masks_ok:
                skipped += 1
                continue
            numeric = (losses[0] - losses[1]) / (2.0 * step)
            a = float(analytic[idx])
            err = abs(a - numeric) / max(abs(a), abs(numeric), 1e-6)
            worst = max(worst, err)
            checked += 1
    return worst, checked, skipped

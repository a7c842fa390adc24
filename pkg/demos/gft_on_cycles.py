"""
Graph Fourier transform on a cycle
==================================

On a cycle graph the Laplacian eigenvectors are sampled sines and cosines,
so the GFT is a real-valued rearrangement of the DFT.
"""
import numpy as np

from gftmpnn import cycle_graph, eigendecompose_symmetric, gft, igft, laplacian

n = 8
eig = eigendecompose_symmetric(laplacian(cycle_graph(n)))

# Eigenvalues come in pairs 2 - 2 cos(2 pi k / n), except k = 0 and k = n/2.
print("eigenvalues:", np.round(eig.eigenvalues, 4))

# A smooth signal concentrates on the low eigen-indices...
t = np.arange(n)
smooth = np.cos(2 * np.pi * t / n)
print("smooth:", np.round(gft(smooth, eig).coefficients, 4))

# ...while an alternating one lives entirely on the largest eigenvalue, 4.
alternating = (-1.0) ** t
print("alternating:", np.round(gft(alternating, eig).coefficients, 4))

# Energy per eigenvalue matches the unitary DFT energy of the frequency pair {k, n-k}.
f = np.random.default_rng(0).normal(size=n)
coeffs = gft(f, eig).coefficients
dft = np.fft.fft(f, norm="ortho")
for k in range(n // 2 + 1):
    lam = 2 - 2 * np.cos(2 * np.pi * k / n)
    gft_energy = np.sum(coeffs[np.isclose(eig.eigenvalues, lam)] ** 2)
    dft_energy = sum(abs(dft[j]) ** 2 for j in {k, (n - k) % n})
    print(f"lambda={lam:.4f}  gft {gft_energy:.6f}  dft {dft_energy:.6f}")

# The inverse recovers the signal.
print("round-trip error:", np.max(np.abs(igft(gft(f, eig), eig) - f)))

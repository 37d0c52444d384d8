"""Numerical laboratory for magnetic monopoles on the two-sphere.

Submodules:

* :mod:`monopole_lab.geometry`     line bundles over S^2, gauge fields, flux, holonomy
* :mod:`monopole_lab.spectral`     magnetic Laplacian spectra (numeric and closed form)
* :mod:`monopole_lab.semiclassics` Bohr-Sommerfeld and invariant-torus quantization
* :mod:`monopole_lab.dynamics`     Poincare's charged particle in a monopole field
* :mod:`monopole_lab.cli`          command-line front end
"""

__version__ = "0.1.0"

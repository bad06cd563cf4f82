"""Exact algebra and numerical geometry around the mirror of projective hypersurfaces.

Submodules:

* ``exact``, ``linalg``: cyclotomic scalars and exact graded linear algebra;
* ``algebra``: exterior algebras, diagonal groups, smash products and the
  trivial extension category;
* ``hochschild``, ``bar``: Hochschild cohomology by closed formula and by the
  bar complex;
* ``lg``, ``zonotope``, ``coamoeba``: critical points, zonotopes and coamoebas;
* ``monodromy``: flows of the meromorphic local model and their phases;
* ``acceptance``, ``cli``: the numbered checks and the command line.
"""

from __future__ import annotations

__version__ = "0.1.0"

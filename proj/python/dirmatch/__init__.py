"""Dense correspondence between nearly isometric shapes.

Thin python surface over the C++ core: spectral embeddings, local mapping
distortion, anchor-driven functional-map refinement, and geodesic-signature
matching for patches and partial shapes.
"""

try:  # installed wheel layout (module lives inside the package)
    from ._dirmatch import *  # noqa: F401,F403
    from ._dirmatch import __version__  # noqa: F401
except ImportError:  # in-tree build (module on PYTHONPATH next to the package)
    from _dirmatch import *  # noqa: F401,F403
    from _dirmatch import __version__  # noqa: F401

"""Fine-grained rib fracture analysis toolkit.

Subpackages cover the pipeline downstream of pretrained encoders:
annotation worksheets and clinical descriptions (:mod:`ribfx.annotations`),
per-slice detection linking (:mod:`ribfx.tracking`), HU windowing and patch
extraction (:mod:`ribfx.volume`), rib side/number assignment
(:mod:`ribfx.anatomy`), Lorentz-manifold geometry (:mod:`ribfx.manifold`),
the hyperbolic multi-head classification model and its training loop
(:mod:`ribfx.model`, :mod:`ribfx.training`), consensus inference and
metrics (:mod:`ribfx.inference`), RibScore severity reports
(:mod:`ribfx.ribscore`), synthetic data generators (:mod:`ribfx.synth`),
and the on-disk formats (:mod:`ribfx.formats`).
"""

__version__ = "0.1.0"

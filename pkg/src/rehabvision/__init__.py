"""Upper-limb rehabilitation exercise video assessment toolkit.

Subpackages:

* ``pose`` — keypoint selection and 17-dim skeleton features
* ``dataset`` — sliding-window sample construction
* ``model`` — skeleton-guided dual-stream action classifier and training
* ``segmentation`` — windowed inference to per-exercise segments and clips
* ``knowledge`` — chunked corpus indexing and per-action retrieval
* ``reports`` — hierarchical LLM assessment report orchestration
* ``service`` — HTTP service, persistence, jobs, analytics
* ``evaluation`` — metrics, ablations, baselines, statistics
"""

__version__ = "0.1.0"

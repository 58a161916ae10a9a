"""Bilingual data-engineering and evaluation toolkit for detecting
patronizing and condescending language (PCL).

Subpackages cover the whole pipeline: corpus model and persistence
(:mod:`pclkit.model`), lexicon calibration and multi-pattern filtering
(:mod:`pclkit.lexicon`), social-media cleaning (:mod:`pclkit.webclean`),
toxicity scoring (:mod:`pclkit.toxicity`), instruction-sample building
(:mod:`pclkit.instruct`), classifier evaluation (:mod:`pclkit.evaluation`),
the human-annotation workflow (:mod:`pclkit.annotation`), the HTTP
annotation service (:mod:`pclkit.service`) and the CLI (:mod:`pclkit.cli`).
"""

__version__ = "0.1.0"

"""Tournament combinatorics: tr, families, mutant gadgets, smooth structures and probes."""

from .core import (Digraph, Tournament, canonical_form, contains, directed_density,
                   enumerate_tournaments, from_text, is_epsilon_critical, random_tournament, tr,
                   verify_lemma_h)
from .families import (FamilySpec, build_asteroid, build_beta_asteroid, build_family,
                       recognize, validate)
from .lab import criticality_scan, epsilon_estimate, min_tr_H_free, soundness_sweep
from .mutants import apply_operation, corresponding_digraph, mutant_beta_asteroid
from .smooth import (SmoothStructure, extract_asterism, find_embedding, verify_smooth,
                     xi_labels)

__version__ = "0.1.0"

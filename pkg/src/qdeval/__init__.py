"""Quality-diversity evaluation metrics, Pareto frontiers, and
divergence-compatibility analysis for text generation."""

from .bleu import (
    BleuConfig,
    EnumSpec,
    corpus_bleu,
    expected_bleu_enumerate,
    expected_nsbleu_unigram,
    expected_selfbleu_enumerate,
    expected_unigram_bleu,
    nsbleu,
    self_bleu,
)
from .corpus import Corpus, NoiseMixSpec, ingest, noise_mix_sample, split
from .discrepancy import (
    CompatReport,
    PenaltyConfig,
    drate_denominator_generalform,
    maximize_combined,
    maximize_functional,
    qdisc_curve_interp,
    qdisc_frontier,
    qdisc_penalty,
)
from .distributions import (
    CategoricalDist,
    entropy,
    mix_with_noise,
    random_toy,
    read_dist,
    temper,
    write_dist,
)
from .frontier import (
    Dominance,
    FrontierPoint,
    FrontierSweep,
    compute_B,
    dominates,
    frontier_point,
    solve_b,
    sweep,
)
from .functionals import (
    Functional,
    bleu_nsbleu_functionals,
    gram_cr_nrr_functionals,
    pair_functionals,
)
from .metric_pairs import (
    MetricPair,
    RationalityReport,
    bleu_expect,
    check_rationality,
    combined_psi,
    compatibility_analytic,
    cr_nrr,
    cr_se,
    divergence,
    diversity,
    get_pair,
    ll_nrr,
    ll_se,
    make_pair,
    quality,
)
from .ngram_metrics import (
    NGramDist,
    cnd,
    cr,
    ngram_dist,
    ngram_dist_from_categorical,
    nrr,
    psi_n,
)
from .oracle import OracleSpec, oracle_enumerate

__version__ = "0.1.0"

"""maskattack: black-box adversarial attacks on text classifiers driven by
masked-language-model token replacement and insertion, plus the evaluation
harness (accuracy drop, similarity, budget curves, ablation splits, and
human-evaluation packaging).
"""

from .attack import (
    AttackConfig,
    CandidateEval,
    StepOutcome,
    SweepResult,
    attack,
    attack_corpus,
    attack_with_trace,
    capped_sweep,
)
from .backends import (
    AntonymLexicon,
    BackendError,
    Backends,
    BagOfWordsEncoder,
    BagOfWordsLogisticClassifier,
    ClassifierBackend,
    ConfigError,
    CorpusMaskedLM,
    CountingClassifier,
    MaskedLMBackend,
    PosTaggerBackend,
    SentenceEncoderBackend,
    ToyFixture,
    load_adapter_config,
    load_stopwords,
    toy_backends,
)
from .core import (
    MASK_TOKEN,
    AttackMode,
    AttackResult,
    AttackStatus,
    EmptyText,
    Label,
    PerturbationKind,
    PerturbationOp,
    PositionResolutionError,
    ProbDist,
    Sentence,
    StopReason,
    apply_perturbation,
    detokenize,
    misclassifies,
    perturbation_ratio,
    replay_ops,
    tokenize,
)
from .evaluation import (
    AblationSplits,
    EvaluationReport,
    HumanEvalPacket,
    IncompleteAnnotations,
    MismatchedCorpora,
    ablation_splits,
    aggregate_human_scores,
    effectiveness_curve,
    export_human_eval,
    summarize,
)
from .importance import ImportanceScores, rank_tokens, token_importance
from .ingestion import (
    Dataset,
    Example,
    LabelRangeError,
    ParseError,
    SchemaVersionError,
    load_dataset,
    load_results,
    persist_results,
)
from .perturb import (
    Candidate,
    CandidateSet,
    filter_candidates,
    generate_candidates,
    make_masked,
)

__version__ = "0.1.0"
